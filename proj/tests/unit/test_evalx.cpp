#include <gtest/gtest.h>

#include <sstream>

#include "mosacd/error.hpp"
#include "mosacd/evalx.hpp"
#include "mosacd/metadata.hpp"

using namespace mosacd;

namespace {

Dag path_dag(int n) {
    std::vector<Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Dag(n, e);
}

}  // namespace

TEST(F1, PerfectAndReversed) {
    const Dag g = path_dag(5);
    EXPECT_DOUBLE_EQ(orientation_f1(g, g).f1, 1.0);
    std::vector<Edge> rev;
    for (const Edge& e : g.edges()) rev.push_back({e.to, e.from});
    const EvalReport r = orientation_f1(Dag(5, rev), g);
    EXPECT_EQ(r.f1, 0.0);
    EXPECT_EQ(r.fp, 4);
    EXPECT_EQ(r.fn, 4);
}

TEST(F1, EightCorrectTwoReversed) {
    const Dag g = path_dag(11);
    Pdag pred = Pdag::from_dag(g);
    pred.set_directed(3, 2);
    pred.set_directed(8, 7);
    const EvalReport r = orientation_f1(pred, g);
    EXPECT_EQ(r.tp, 8);
    EXPECT_EQ(r.fp, 2);
    EXPECT_EQ(r.fn, 2);
    EXPECT_DOUBLE_EQ(r.precision, 0.8);
    EXPECT_DOUBLE_EQ(r.recall, 0.8);
    EXPECT_DOUBLE_EQ(r.f1, 0.8);
}

TEST(F1, UndirectedEdgesCostRecallOnly) {
    const Dag g = path_dag(4);
    Pdag pred = Pdag::from_dag(g);
    pred.set_undirected(1, 2);
    const EvalReport lax = orientation_f1(pred, g);
    EXPECT_DOUBLE_EQ(lax.precision, 1.0);
    EXPECT_DOUBLE_EQ(lax.recall, 2.0 / 3.0);
    const EvalReport strict = orientation_f1(pred, g, {true, false});
    EXPECT_DOUBLE_EQ(strict.precision, 2.0 / 3.0);
    // against the CPDAG of a path (fully undirected), the all-undirected prediction has no target
    const EvalReport cp = orientation_f1(Pdag::skeleton_of(g), g, {false, true});
    EXPECT_EQ(cp.tp + cp.fp + cp.fn, 0);
    EXPECT_THROW(orientation_f1(Pdag(3), g), InputError);
}

TEST(SeedAccuracy, CountsReversedAndAbsentAsFalse) {
    const Dag g = path_dag(4);
    const std::vector<Edge> seeds{{0, 1}, {2, 1}, {0, 3}};
    const SeedTally t = seed_accuracy(seeds, g);
    EXPECT_EQ(t.true_count, 1);
    EXPECT_EQ(t.false_count, 2);
    EXPECT_EQ(seed_accuracy(std::vector<Edge>{}, g).true_count, 0);
}

TEST(Paired, NoSeedsPerfectOracleMatchesMeekBaseline) {
    Rng rng(79);
    TrialSetup setup;
    setup.alpha = setup.beta = 0.0;
    setup.skeleton.max_level = setup.nodes;
    for (int t = 0; t < 20; ++t) {
        const TrialInstance inst = make_instance(setup, rng);
        const Pdag mosacd = mosacd_with_seeds(inst, {}, OrientConfig{});
        const Pdag meek = meek_with_seeds(inst, {});
        EXPECT_EQ(mosacd, meek);
        EXPECT_EQ(orientation_f1(mosacd, inst.truth).f1, orientation_f1(meek, inst.truth).f1);
    }
}

TEST(Paired, AllTrueSeedsGivePerfectF1) {
    Rng rng(83);
    TrialSetup setup;
    setup.alpha = setup.beta = 0.0;
    setup.skeleton.max_level = setup.nodes;
    for (int t = 0; t < 10; ++t) {
        const TrialInstance inst = make_instance(setup, rng);
        const auto edges = inst.truth.edges();
        const Pdag out = mosacd_with_seeds(inst, edges, OrientConfig{});
        if (inst.truth.edge_count() > 0) EXPECT_DOUBLE_EQ(orientation_f1(out, inst.truth).f1, 1.0);
    }
}

TEST(SampleSeeds, DrawsTheRequestedMix) {
    Rng rng(89);
    TrialSetup setup;
    setup.alpha = setup.beta = 0.0;
    setup.nodes = 8;
    setup.edge_probability = 0.5;
    const TrialInstance inst = make_instance(setup, rng);
    const int m = static_cast<int>(inst.truth.edge_count());
    const auto seeds = sample_seeds(inst, m / 2, m - m / 2, rng);
    ASSERT_TRUE(seeds);
    const SeedTally t = seed_accuracy(*seeds, inst.truth);
    EXPECT_EQ(t.true_count, m / 2);
    EXPECT_EQ(t.false_count, m - m / 2);
    EXPECT_FALSE(sample_seeds(inst, m + 1, 0, rng));
}

TEST(Ablation, FalseSeedSweepDoesNotImprove) {
    AblationConfig c;
    c.vary = AblationAxis::FalseSeedFraction;
    c.grid = {0.0, 0.25, 0.5};
    c.trials = 30;
    c.seed = 5;
    const auto rows = run_ablation(c);
    ASSERT_EQ(rows.size(), 6u);
    std::vector<double> mosacd;
    for (const auto& r : rows)
        if (r.method == "mosacd") mosacd.push_back(r.mean_f1);
    EXPECT_GE(mosacd[0] + 1e-9, mosacd[1]);
    EXPECT_GE(mosacd[1] + 1e-9, mosacd[2]);
    std::ostringstream out;
    write_ablation_csv(out, c, rows);
    EXPECT_EQ(out.str().rfind(std::string("# f1 policy: ") + kF1Policy, 0), 0u);
}

TEST(Ablation, InfeasibleGridPointsAreSkippedWithNotice) {
    AblationConfig c;
    c.vary = AblationAxis::TrueSeeds;
    c.grid = {100};
    c.trials = 3;
    std::ostringstream notices;
    const auto rows = run_ablation(c, &notices);
    EXPECT_EQ(rows[0].trials, 0);
    EXPECT_EQ(rows[0].skipped, 3);
    EXPECT_NE(notices.str().find("skipping"), std::string::npos);
    EXPECT_THROW(parse_ablation_axis("seeds"), InputError);
}

TEST(Ablation, FullyMaskedDescriptionsYieldNoSeeds) {
    Rng rng(97);
    TrialSetup setup;
    const TrialInstance inst = make_instance(setup, rng);
    GroundTruthExpert truthful(inst.truth, {0.0, 0.0, 1});
    UninformedGuessExpert masked(truthful);
    masked.set_names(inst.names);
    const Metadata meta = blank_metadata(inst.names);
    const auto [graph, seeds] = mosacd_with_expert(inst, masked, meta, SeedingConfig{}, OrientConfig{});
    EXPECT_TRUE(seeds.seeds.empty());
    EXPECT_EQ(graph, mosacd_with_seeds(inst, {}, OrientConfig{}));
}
