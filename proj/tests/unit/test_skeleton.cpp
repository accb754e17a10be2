#include <gtest/gtest.h>

#include <algorithm>

#include "mosacd/citest.hpp"
#include "mosacd/error.hpp"
#include "mosacd/skeleton.hpp"
#include "oracles.hpp"

using namespace mosacd;

namespace {

/// Counts queries so tests can reason about the search.
class CountingOracle final : public CiTest {
public:
    explicit CountingOracle(const Dag& g) : inner_(g) {}
    int node_count() const override { return inner_.node_count(); }
    CiResult test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const override {
        ++calls;
        return inner_.test(x, y, s, threshold);
    }
    std::string describe() const override { return "counting"; }
    mutable std::size_t calls = 0;

private:
    OracleTest inner_;
};

}  // namespace

TEST(Skeleton, ParseVariantNames) {
    EXPECT_EQ(parse_skeleton_variant("pc"), SkeletonVariant::PC);
    EXPECT_EQ(parse_skeleton_variant("pc-stable"), SkeletonVariant::PCStable);
    EXPECT_EQ(parse_skeleton_variant("cpc"), SkeletonVariant::CPC);
    EXPECT_THROW(parse_skeleton_variant("ges"), InputError);
}

class SkeletonVariants : public ::testing::TestWithParam<SkeletonVariant> {};

TEST_P(SkeletonVariants, PerfectOracleRecoversTrueAdjacencies) {
    Rng rng(7);
    SkeletonConfig config;
    config.variant = GetParam();
    config.max_level = 6;
    for (int t = 0; t < 40; ++t) {
        const Dag g = random_dag(4 + t % 4, 0.45, rng);
        const Skeleton s = skel_search(OracleTest(g), config);
        const int n = g.node_count();
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                ASSERT_EQ(s.graph.adjacent(a, b), g.adjacent(a, b)) << "trial " << t;
                ASSERT_EQ(s.sepsets.contains(a, b), !g.adjacent(a, b));
                // every recorded set really separates, and none mentions a or b
                for (const SepsetEntry& e : s.sepsets.find(a, b)) {
                    EXPECT_TRUE(oracle::d_separated_moral(g, a, b, e.set));
                    EXPECT_TRUE(std::is_sorted(e.set.begin(), e.set.end()));
                    EXPECT_EQ(std::count(e.set.begin(), e.set.end(), a) + std::count(e.set.begin(), e.set.end(), b), 0);
                }
            }
        EXPECT_EQ(s.graph.directed_count(), 0u);
    }
}

INSTANTIATE_TEST_SUITE_P(All, SkeletonVariants,
                         ::testing::Values(SkeletonVariant::PC, SkeletonVariant::PCStable, SkeletonVariant::CPC));

TEST(Skeleton, PcKeepsOneSetAndCpcKeepsEveryAcceptedSetOfTheLevel) {
    // 0 -> 1 -> 3, 0 -> 2 -> 3: {0,3} is separated by {1,2} only, at level 2.
    // 4 is isolated: {0,4} separated by the empty set at level 0.
    const std::vector<Edge> e{{0, 1}, {1, 3}, {0, 2}, {2, 3}};
    const Dag g(5, e);
    SkeletonConfig pc;
    const Skeleton a = skel_search(OracleTest(g), pc);
    ASSERT_EQ(a.sepsets.find(0, 3).size(), 1u);
    EXPECT_EQ(a.sepsets.find(0, 3)[0].set, (std::vector<int>{1, 2}));
    // Chain 1 -> 3 <- 2 with parents 0: {1,2} separated by {0}; CPC may also accept {0,4}.
    SkeletonConfig cpc;
    cpc.variant = SkeletonVariant::CPC;
    const Skeleton c = skel_search(OracleTest(g), cpc);
    std::vector<std::vector<int>> want;
    for (const auto& s : oracle::subsets({0, 3, 4}, 1))
        if (oracle::d_separated_moral(g, 1, 2, s)) want.push_back(s);
    std::vector<std::vector<int>> got;
    for (const auto& entry : c.sepsets.find(1, 2)) got.push_back(entry.set);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, want);
    EXPECT_GE(got.size(), 1u);
}

TEST(Skeleton, MaxLevelCapsTheSearch) {
    const std::vector<Edge> e{{0, 1}, {1, 3}, {0, 2}, {2, 3}};
    const Dag g(4, e);
    SkeletonConfig c;
    c.max_level = 1;
    const Skeleton s = skel_search(OracleTest(g), c);
    EXPECT_TRUE(s.graph.adjacent(0, 3));  // needs a level-2 set
}

TEST(Skeleton, CountsTests) {
    Rng rng(9);
    const Dag g = random_dag(6, 0.4, rng);
    CountingOracle ci(g);
    const Skeleton s = skel_search(ci, SkeletonConfig{});
    EXPECT_EQ(s.tests, ci.calls);
    EXPECT_GE(s.tests, 15u);  // every pair is tested at level 0
}

TEST(Sepsets, MembershipClassification) {
    SepsetRecord r;
    r.add(0, 1, {{2}, 0.3});
    r.add(0, 1, {{2, 3}, 0.6});
    EXPECT_EQ(r.membership(0, 1, 2), Membership::All);
    EXPECT_EQ(r.membership(1, 0, 3), Membership::Mixed);
    EXPECT_EQ(r.membership(0, 1, 4), Membership::None);
    EXPECT_EQ(r.membership(0, 4, 2), Membership::Unknown);
    EXPECT_DOUBLE_EQ(r.max_p(1, 0), 0.6);
    EXPECT_EQ(r.max_p(2, 3), 0.0);
}

TEST(Sepsets, JsonRoundTrip) {
    Rng rng(12);
    SkeletonConfig c;
    c.variant = SkeletonVariant::CPC;
    const Dag g = random_dag(7, 0.35, rng);
    const Skeleton s = skel_search(NoisyOracleTest(g, {0.05, 0.1, 3}), c);
    EXPECT_EQ(sepsets_from_json(sepsets_to_json(s.sepsets)), s.sepsets);
}
