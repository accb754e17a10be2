#include <gtest/gtest.h>

#include <cmath>

#include "mosacd/citest.hpp"
#include "mosacd/error.hpp"
#include "oracles.hpp"

using namespace mosacd;

namespace {

/// Random categorical table; column c has 2 + c % 3 levels and depends on column c-1 when
/// `coupled` is set.
Dataset random_table(std::size_t rows, int cols, bool coupled, Rng& rng) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> levels;
    std::vector<std::vector<int>> codes(cols);
    for (int c = 0; c < cols; ++c) {
        names.push_back("c" + std::to_string(c));
        const int k = 2 + c % 3;
        std::vector<std::string> lv;
        for (int i = 0; i < k; ++i) lv.push_back(std::to_string(i));
        levels.push_back(lv);
    }
    for (std::size_t r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int k = static_cast<int>(levels[c].size());
            int v = static_cast<int>(uniform01(rng) * k);
            if (coupled && c > 0 && uniform01(rng) < 0.4) v = codes[c - 1][r] % k;
            codes[c].push_back(v);
        }
    return Dataset(names, levels, codes);
}

}  // namespace

TEST(ChiSquare, KnownQuantiles) {
    EXPECT_NEAR(chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
    EXPECT_NEAR(chi_square_sf(5.991464547107979, 2), 0.05, 1e-12);
    EXPECT_NEAR(chi_square_sf(0.0, 3), 1.0, 0.0);
}

TEST(ChiSquare, AgreesWithClosedForms) {
    for (int k = 1; k <= 12; ++k)
        for (double x : {0.01, 0.5, 1.0, 2.5, 7.0, 15.0, 40.0})
            EXPECT_NEAR(chi_square_sf(x, k), oracle::chi_square_sf(x, k), 1e-12 + 1e-10 * oracle::chi_square_sf(x, k))
                << "x=" << x << " k=" << k;
}

TEST(G2, MatchesNaiveCountTables) {
    Rng rng(21);
    for (int t = 0; t < 12; ++t) {
        const Dataset d = random_table(300 + 50 * t, 5, t % 2 == 0, rng);
        for (const std::vector<int>& s : {std::vector<int>{}, std::vector<int>{2}, std::vector<int>{2, 4}}) {
            const CiResult got = g2_test(d, 0, 1, s, 0.05);
            const oracle::G2 want = oracle::g2(d, 0, 1, s);
            EXPECT_NEAR(got.statistic, want.statistic, 1e-9 * std::max(1.0, want.statistic));
            EXPECT_EQ(got.dof, want.dof);
            EXPECT_NEAR(got.p_value, oracle::chi_square_sf(want.statistic, want.dof), 1e-10);
            EXPECT_EQ(got.independent, got.p_value > 0.05);
        }
    }
}

TEST(G2, DegenerateInputsAreExplicit) {
    const Dataset constant({"a", "b"}, {{"x"}, {"0", "1"}}, {{0, 0, 0, 0}, {0, 1, 0, 1}});
    EXPECT_THROW(g2_test(constant, 0, 1, {}, 0.05), DegenerateTestError);
    const CiResult soft = G2Test(constant).test(0, 1, {}, 0.05);
    EXPECT_TRUE(soft.independent);
    EXPECT_EQ(soft.p_value, 1.0);
}

TEST(G2, DetectsStrongDependence) {
    std::vector<int> a, b;
    for (int i = 0; i < 400; ++i) {
        a.push_back(i % 2);
        b.push_back(i % 2);
    }
    const Dataset d({"a", "b"}, {{"0", "1"}, {"0", "1"}}, {a, b});
    const CiResult r = g2_test(d, 0, 1, {}, 0.05);
    EXPECT_FALSE(r.independent);
    EXPECT_NEAR(r.statistic, 2 * 400 * std::log(2.0), 1e-9);
}

TEST(Oracle, FollowsDSeparation) {
    const std::vector<Edge> e{{0, 1}, {1, 2}};
    const Dag g(3, e);
    const std::vector<int> one{1};
    EXPECT_FALSE(oracle_test(g, 0, 2, {}).independent);
    EXPECT_EQ(oracle_test(g, 0, 2, one).p_value, 1.0);
    EXPECT_EQ(oracle_test(g, 0, 2, {}).p_value, 0.0);
}

TEST(NoisyOracle, FlipRatesMatchAlphaAndBeta) {
    Rng rng(31);
    const Dag g = random_dag(10, 0.3, rng);
    const NoiseParams noise{0.1, 0.2, 99};
    long dep = 0, dep_flipped = 0, ind = 0, ind_flipped = 0;
    for (int x = 0; x < 10; ++x)
        for (int y = x + 1; y < 10; ++y) {
            std::vector<int> rest;
            for (int z = 0; z < 10; ++z)
                if (z != x && z != y) rest.push_back(z);
            for (int k = 0; k <= 3; ++k)
                for (const auto& s : oracle::subsets(rest, k)) {
                    const bool truth = d_separated(g, x, y, s);
                    const bool seen = noisy_oracle_test(g, x, y, s, noise).independent;
                    (truth ? ind : dep)++;
                    if (truth != seen) (truth ? ind_flipped : dep_flipped)++;
                }
        }
    auto within = [](long hits, long n, double p) {
        return std::abs(static_cast<double>(hits) / n - p) <= 3 * std::sqrt(p * (1 - p) / n);
    };
    ASSERT_GT(dep, 500);
    ASSERT_GT(ind, 500);
    EXPECT_TRUE(within(dep_flipped, dep, 0.1)) << dep_flipped << "/" << dep;
    EXPECT_TRUE(within(ind_flipped, ind, 0.2)) << ind_flipped << "/" << ind;
}

TEST(NoisyOracle, RepeatedQueriesAgree) {
    Rng rng(1);
    const Dag g = random_dag(6, 0.5, rng);
    const NoiseParams noise{0.3, 0.3, 5};
    const std::vector<int> s{3, 1}, s_sorted{1, 3};
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(noisy_oracle_test(g, 0, 2, s, noise).independent, noisy_oracle_test(g, 2, 0, s_sorted, noise).independent);
    }
    EXPECT_THROW(noisy_oracle_test(g, 0, 2, s, NoiseParams{1.5, 0, 0}), InputError);
}
