#include <gtest/gtest.h>

#include "mosacd/citest.hpp"
#include "mosacd/error.hpp"
#include "mosacd/orient.hpp"
#include "oracles.hpp"

using namespace mosacd;

namespace {

enum { U, V, W, X, Y };

/// After Step 3: U -> Y, V -> Y, W -> Y, X - Y; X _||_ U | Y, X _||_ V | Y, X _||_ W.
struct WorkedExample {
    Pdag p{5};
    SepsetRecord sigma;

    WorkedExample() {
        p.add_directed(U, Y);
        p.add_directed(V, Y);
        p.add_directed(W, Y);
        p.add_undirected(X, Y);
        sigma.add(X, U, {{Y}, 0.4});
        sigma.add(X, V, {{Y}, 0.4});
        sigma.add(X, W, {{}, 0.4});
        sigma.add(U, V, {{}, 0.5});
        sigma.add(U, W, {{}, 0.5});
        sigma.add(V, W, {{}, 0.5});
    }
};

}  // namespace

TEST(LeastConflict, WorkedExampleCounts) {
    const WorkedExample ex;
    const ConflictReport forward = conflict_count(ex.p, ex.sigma, {X, Y});
    const ConflictReport backward = conflict_count(ex.p, ex.sigma, {Y, X});
    EXPECT_EQ(forward.count, 2);
    EXPECT_EQ(backward.count, 1);
    ASSERT_EQ(backward.violations.size(), 1u);
    EXPECT_EQ(backward.violations[0].pair, NodePair::of(X, W));
    Rng rng(0);
    OrientLog log;
    const Pdag out = least_conflict(ex.p, ex.sigma, rng, &log);
    EXPECT_TRUE(out.is_directed(Y, X));
    EXPECT_EQ(log.step4_orientations, 1);
}

TEST(LeastConflict, TiesStayUndirectedAndCyclesAreInfeasible) {
    Pdag p(2);
    p.add_undirected(0, 1);
    Rng rng(0);
    EXPECT_TRUE(least_conflict(p, SepsetRecord{}, rng).is_undirected(0, 1));

    Pdag c(3);
    c.add_directed(0, 1);
    c.add_directed(1, 2);
    c.add_undirected(2, 0);
    EXPECT_EQ(conflict_count(c, SepsetRecord{}, {2, 0}).count, ConflictReport::kInfeasible);
    EXPECT_TRUE(least_conflict(c, SepsetRecord{}, rng).is_directed(0, 2));
}

TEST(Step3, CiSupervisedPropagation) {
    // 0 -> 1 - 2, 0 and 2 non-adjacent.
    Pdag p(3);
    p.add_directed(0, 1);
    p.add_undirected(1, 2);
    SepsetRecord in_all;
    in_all.add(0, 2, {{1}, 0.3});
    EXPECT_TRUE(ci_supervised(p, in_all).is_directed(1, 2));
    SepsetRecord in_none;
    in_none.add(0, 2, {{}, 0.3});
    EXPECT_TRUE(ci_supervised(p, in_none).is_directed(2, 1));
    SepsetRecord mixed;
    mixed.add(0, 2, {{}, 0.3});
    mixed.add(0, 2, {{1}, 0.2});
    EXPECT_TRUE(ci_supervised(p, mixed).is_undirected(1, 2));
}

TEST(Step3, ColliderNeedsBothArrows) {
    Pdag p(3);
    p.add_undirected(0, 1);
    p.add_undirected(1, 2);
    SepsetRecord none;
    none.add(0, 2, {{}, 0.3});
    const Pdag q = collider_orient(p, none);
    EXPECT_TRUE(q.is_directed(0, 1));
    EXPECT_TRUE(q.is_directed(2, 1));

    // 1 -> 0 already: the collider cannot be completed, so neither arrow is added.
    Pdag r(3);
    r.add_directed(1, 0);
    r.add_undirected(1, 2);
    EXPECT_TRUE(collider_orient(r, none).is_undirected(1, 2));
}

TEST(Step3, R2FollowsSemiDirectedPaths) {
    // 0 -> 1 -> 2 and 0 - 2: orient 0 -> 2.
    Pdag p(3);
    p.add_directed(0, 1);
    p.add_directed(1, 2);
    p.add_undirected(0, 2);
    EXPECT_TRUE(r2_propagate(p).is_directed(0, 2));
}

TEST(OrientPdag, PerfectOracleGivesTheCpdagWithoutStepFour) {
    Rng rng(41);
    for (int t = 0; t < 40; ++t) {
        const Dag g = random_dag(4 + t % 4, 0.5, rng);
        const Skeleton s = skel_search(OracleTest(g), SkeletonConfig{SkeletonVariant::PC, 0.05, g.node_count()});
        const OrientResult r = orient_pdag(s.graph, s.sepsets, {}, OrientConfig{});
        ASSERT_EQ(r.pdag, cpdag_of(g)) << "trial " << t;
        EXPECT_EQ(r.log.step4_orientations, 0);
    }
}

TEST(OrientPdag, TrueSeedsAreKeptAndOnlyAddInformation) {
    Rng rng(43);
    for (int t = 0; t < 20; ++t) {
        const Dag g = random_dag(7, 0.4, rng);
        const Skeleton s = skel_search(OracleTest(g), SkeletonConfig{SkeletonVariant::PC, 0.05, g.node_count()});
        Pdag seeded = s.graph;
        const auto edges = g.edges();
        for (std::size_t i = 0; i < edges.size(); i += 2) seeded.set_directed(edges[i].from, edges[i].to);
        const OrientResult r = orient_pdag(seeded, s.sepsets, {}, OrientConfig{});
        for (std::size_t i = 0; i < edges.size(); i += 2) EXPECT_TRUE(r.pdag.is_directed(edges[i].from, edges[i].to));
        // with correct seeds nothing comes out wrong, and at least the CPDAG's arrows appear
        for (const Edge& e : r.pdag.directed_edges()) EXPECT_TRUE(g.has_edge(e.from, e.to));
        for (const Edge& e : cpdag_of(g).directed_edges()) EXPECT_TRUE(r.pdag.is_directed(e.from, e.to));
    }
}

TEST(Step5, CompletesToADagConsistentWithTheArrows) {
    Rng rng(47);
    for (int t = 0; t < 20; ++t) {
        const Dag g = random_dag(7, 0.5, rng);
        const Pdag cp = cpdag_of(g);
        std::vector<VoteRecord> votes;
        for (const NodePair& e : cp.undirected_edges()) {
            VoteRecord r;
            r.u = e.first;
            r.v = e.second;
            (g.has_edge(e.first, e.second) ? r.forward.u_to_v : r.forward.v_to_u) = 3;
            votes.push_back(r);
        }
        const Dag d = step5_vote_completion(cp, votes);
        EXPECT_EQ(d, g);  // every undirected edge got a vote for its true direction
    }
}

TEST(Step5, WeakestVoteInACycleIsDropped) {
    // undirected triangle with cyclic votes 0->1 (5), 1->2 (4), 2->0 (1)
    Pdag p(3);
    p.add_undirected(0, 1);
    p.add_undirected(1, 2);
    p.add_undirected(0, 2);
    std::vector<VoteRecord> votes(3);
    votes[0].u = 0, votes[0].v = 1, votes[0].forward.u_to_v = 5;
    votes[1].u = 1, votes[1].v = 2, votes[1].forward.u_to_v = 4;
    votes[2].u = 0, votes[2].v = 2, votes[2].forward.v_to_u = 1;
    EXPECT_EQ(vote_order(p, votes), (std::vector<NodeId>{0, 1, 2}));
    const Dag d = step5_vote_completion(p, votes);
    EXPECT_TRUE(d.has_edge(0, 1));
    EXPECT_TRUE(d.has_edge(1, 2));
    EXPECT_TRUE(d.has_edge(0, 2));
}

TEST(Baseline, MatchesCpdagUnderPerfectOracle) {
    Rng rng(53);
    for (int t = 0; t < 30; ++t) {
        const Dag g = random_dag(6, 0.45, rng);
        const Skeleton s = skel_search(OracleTest(g), SkeletonConfig{SkeletonVariant::PC, 0.05, g.node_count()});
        EXPECT_EQ(baseline_orient(s.graph, s.sepsets), cpdag_of(g));
    }
}
