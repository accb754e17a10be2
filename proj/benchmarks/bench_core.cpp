#include <benchmark/benchmark.h>

#include "mosacd/bayes_net.hpp"
#include "mosacd/citest.hpp"
#include "mosacd/graph.hpp"
#include "mosacd/orient.hpp"
#include "mosacd/skeleton.hpp"
#include "mosacd/theory.hpp"

using namespace mosacd;

namespace {

void BM_OracleSkeleton(benchmark::State& state) {
    Rng rng(1);
    const Dag g = random_dag(static_cast<int>(state.range(0)), 0.3, rng);
    const OracleTest ci(g);
    for (auto _ : state) benchmark::DoNotOptimize(skel_search(ci, SkeletonConfig{}));
}
BENCHMARK(BM_OracleSkeleton)->Arg(10)->Arg(20);

void BM_G2Skeleton(benchmark::State& state) {
    Rng rng(2);
    const Dag g = random_dag(10, 0.3, rng);
    const BayesNet net = random_bayes_net(g, 2, 3, 1.0, rng);
    const Dataset data = forward_sample(net, static_cast<std::size_t>(state.range(0)), rng);
    const G2Test ci(data);
    for (auto _ : state) benchmark::DoNotOptimize(skel_search(ci, SkeletonConfig{}));
}
BENCHMARK(BM_G2Skeleton)->Arg(1000)->Arg(10000);

void BM_OrientFromSkeleton(benchmark::State& state) {
    Rng rng(3);
    const Dag g = random_dag(static_cast<int>(state.range(0)), 0.3, rng);
    const Skeleton s = skel_search(OracleTest(g), SkeletonConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(orient_pdag(s.graph, s.sepsets, {}, OrientConfig{}));
}
BENCHMARK(BM_OrientFromSkeleton)->Arg(10)->Arg(20);

void BM_CpdagOf(benchmark::State& state) {
    Rng rng(4);
    const Dag g = random_dag(static_cast<int>(state.range(0)), 0.3, rng);
    for (auto _ : state) benchmark::DoNotOptimize(cpdag_of(g));
}
BENCHMARK(BM_CpdagOf)->Arg(10)->Arg(30);

void BM_IFactor(benchmark::State& state) {
    const auto method = state.range(0) == 0 ? theory::IMethod::ClosedSum : theory::IMethod::Quadrature;
    for (auto _ : state) benchmark::DoNotOptimize(theory::i_factor(8, 8, 0.9, 0.05, method));
}
BENCHMARK(BM_IFactor)->Arg(0)->Arg(1);

}  // namespace
BENCHMARK_MAIN();
