#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mosacd/error.hpp"
#include "mosacd/theory.hpp"
#include "oracles.hpp"

using namespace mosacd;
using namespace mosacd::theory;

TEST(Binomial, MatchesPascal) {
    for (int n = 0; n <= 60; ++n)
        for (int k = 0; k <= n; ++k) {
            const double want = oracle::binomial_pascal(n, k);
            // the oracle itself rounds once values pass 2^53
            if (want < 0x1p53)
                EXPECT_EQ(binomial(n, k), want) << n << " " << k;
            else
                EXPECT_NEAR(binomial(n, k), want, want * 1e-14) << n << " " << k;
        }
    EXPECT_EQ(binomial(5, 7), 0.0);
}

TEST(Binomial, ExactInto128Bits) {
    const uint128 c = binomial_exact(128, 64);
    EXPECT_EQ(static_cast<std::uint64_t>(c >> 64), 1298394228608800905ULL);
    EXPECT_EQ(static_cast<std::uint64_t>(c), 13075353597415539270ULL);
    const uint128 d = binomial_exact(100, 50);
    EXPECT_EQ(static_cast<std::uint64_t>(d >> 64), 5469330747ULL);
    EXPECT_EQ(static_cast<std::uint64_t>(d), 1184508333840160104ULL);
    EXPECT_THROW(binomial_exact(129, 3), InputError);
}

TEST(IFactor, ClosedSumMatchesSimpson) {
    for (int m = 0; m <= 12; ++m)
        for (int n = 0; n <= 12; ++n)
            for (double a : {0.05, 0.5, 0.95})
                for (double b : {0.0, 0.1, 0.9}) {
                    const double want = oracle::i_factor_simpson(m, n, a, b);
                    EXPECT_NEAR(i_factor(m, n, a, b), want, 1e-11 * want) << m << " " << n << " " << a << " " << b;
                }
}

TEST(IFactor, LargeCountsStayAccurate) {
    for (auto [m, n] : {std::pair{40, 3}, {3, 60}, {120, 200}}) {
        const double want = oracle::i_factor_simpson(m, n, 0.9, 0.05, 200000);
        EXPECT_NEAR(i_factor(m, n, 0.9, 0.05), want, 1e-8 * want);
        EXPECT_NEAR(i_factor(m, n, 0.9, 0.05, IMethod::Quadrature), want, 1e-8 * want);
    }
    // combinatorially large counts only make sense through quadrature; decreasing in m
    EXPECT_GT(i_factor(1e6, 10, 0.9, 0.05), i_factor(2e6, 10, 0.9, 0.05));
    EXPECT_THROW(i_factor(1.5, 2, 0.5, 0.5), InputError);
}

TEST(LevelCounts, PartitionEveryLevel) {
    for (int M : {3, 6, 10})
        for (auto truth : {Truth::Collider, Truth::NonCollider}) {
            const auto c = level_counts(M, M - 1, truth);
            EXPECT_EQ(c[0].sepsets() + c[0].non_sepsets(), 1.0);
            for (int l = 1; l < M; ++l) {
                EXPECT_EQ(c[l].sepsets() + c[l].non_sepsets(), oracle::binomial_pascal(M, l));
                EXPECT_EQ(c[l].s_z + c[l].u_z, oracle::binomial_pascal(M - 1, l - 1));
            }
        }
}

TEST(LevelProbabilities, FirstHitsSumToDecision) {
    const auto p = level_probabilities(level_counts(8, 3, Truth::NonCollider), 0.05, 0.1);
    double sum = 0, prev = 1;
    for (std::size_t l = 0; l < p.first_hit.size(); ++l) {
        EXPECT_NEAR(p.prev_no_hit[l], prev, 1e-15);
        sum += p.first_hit[l];
        prev -= p.first_hit[l];
        // PC splits every first hit between "with Z" and "without Z"
        EXPECT_NEAR(p.pc_collider[l] + p.pc_z_saved[l], p.first_hit[l], 1e-14);
        EXPECT_LE(p.cpc_collider[l] + p.cpc_all_z[l], p.first_hit[l] + 1e-15);
    }
    EXPECT_NEAR(p.pr_d, sum, 1e-15);
}

TEST(FprTable, ReproducesPublishedValues) {
    std::istringstream stats(
        "name,nodes,arcs\nasia,8,8\nalarm,37,46\ncancer,5,4\nchild,20,25\nhailfinder,56,66\n"
        "hepar2,70,123\ninsurance,27,52\nmildew,35,46\nwater,32,66\nwin95pts,76,112\n");
    const auto rows = expected_fpr_table(read_network_stats(stats), 3, 0.05, 0.1);
    struct Want {
        double pc_c, pc_n, cpc_c, cpc_n;
    };
    const Want want[] = {{0.177849, 0.000926, 0.071491, 5e-8},  {0.583846, 0.000159, 0.128392, 5e-37},
                         {0.102895, 0.001906, 0.059310, 6e-5},  {0.399529, 0.000309, 0.105279, 5e-20},
                         {0.700605, 0.000103, 0.138733, 5e-56}, {0.755133, 0.000082, 0.141944, 5e-70},
                         {0.488650, 0.000222, 0.117261, 5e-27}, {0.567216, 0.000168, 0.126597, 5e-35},
                         {0.540173, 0.000185, 0.123536, 5e-32}, {0.773360, 0.000075, 0.142753, 5e-76}};
    ASSERT_EQ(rows.size(), 10u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_NEAR(rows[i].pc_colliders_first, want[i].pc_c, 5e-7) << rows[i].stats.name;
        EXPECT_NEAR(rows[i].pc_nonc_first, want[i].pc_n, 5e-7) << rows[i].stats.name;
        EXPECT_NEAR(rows[i].cpc_colliders_first, want[i].cpc_c, 5e-7) << rows[i].stats.name;
        // one significant digit in the table
        const double e = std::pow(10.0, std::floor(std::log10(want[i].cpc_n)));
        EXPECT_NEAR(rows[i].cpc_nonc_first, want[i].cpc_n, 0.5 * e) << rows[i].stats.name;
    }
}

TEST(FprTable, CsvLayout) {
    std::istringstream stats("name,nodes,arcs\nasia,8,8\n");
    std::ostringstream out;
    write_fpr_csv(out, expected_fpr_table(read_network_stats(stats), 3, 0.05, 0.1));
    EXPECT_EQ(out.str(),
              "network,PC (colliders-first),PC (nonc-first),CPC (colliders-first),CPC (nonc-first)\n"
              "asia,0.177849,0.000926,0.071491,5.0e-08\n");
}

TEST(NetworkStats, RejectsMalformedRows) {
    std::istringstream short_row("name,nodes,arcs\nasia,8\n");
    EXPECT_THROW(read_network_stats(short_row), ParseError);
    std::istringstream bad_number("name,nodes,arcs\nasia,eight,8\n");
    EXPECT_THROW(read_network_stats(bad_number), ParseError);
}

TEST(Ratio, AboveOneBelowHalfM) {
    for (int M = 3; M <= 30; ++M)
        for (int l = 1; 2 * l < M; ++l)
            for (auto rule : {Rule::PC, Rule::CPC}) {
                const Ratio r = r_ratio({M, l, 0.05, 0.1}, rule);
                EXPECT_GT(r.log_value, 0.0) << M << " " << l << " " << to_string(rule);
            }
}

TEST(Ratio, ApproximationsConvergeForSmallRates) {
    for (int M : {6, 10, 14})
        for (int l = 1; 2 * l < M; ++l) {
            const StylizedModel cpc{M, l, 1e-6, 0.1};
            // neglected terms are O(alpha) per factor, so the gap scales with log R itself
            const double exact = r_ratio(cpc, Rule::CPC).log_value;
            EXPECT_NEAR(r_ratio_approx(cpc, Rule::CPC).log_value, exact, 1e-4 + 1e-6 * std::abs(exact));
            const StylizedModel pc{M, l, 1e-6, 1e-6};
            EXPECT_NEAR(r_ratio_approx(pc, Rule::PC).log_value, r_ratio(pc, Rule::PC).log_value, 1e-3);
        }
}

TEST(Ratio, SaturatesInsteadOfOverflowing) {
    const Ratio r = r_ratio({60, 5, 0.05, 0.1}, Rule::CPC);
    EXPECT_TRUE(r.overflow);
    EXPECT_TRUE(std::isinf(r.value));
    EXPECT_GT(r.log_value, 709.0);
    EXPECT_THROW(r_ratio({10, 0, 0.05, 0.1}, Rule::PC), InputError);
}

TEST(MonteCarlo, FirstHitProbabilityMatchesIntegral) {
    Rng rng(61);
    const int s = 3, u = 5;
    const double a = 0.9, b = 0.05, trials = 200000;
    // Pr(a given sepset is the first hit) = a * I_{s, u}(a, b) with s other sepsets, u non-sepsets
    const double want = a * i_factor(s, u, a, b);
    const double got = monte_carlo_first_hit(s, u, a, b, true, trials, rng);
    EXPECT_NEAR(got, want, 4 * std::sqrt(want * (1 - want) / trials));
}

TEST(MonteCarlo, StylizedLevelMatchesClosedForm) {
    Rng rng(67);
    SimulationConfig c;
    c.M = 6;
    c.start_level = c.max_level = 1;
    c.trials = 200000;
    for (auto truth : {Truth::NonCollider, Truth::Collider}) {
        c.truth = truth;
        const SimulationResult r = monte_carlo_stylized(c, rng);
        for (auto rule : {Rule::PC, Rule::CPC}) {
            const double p = level_error_rate({6, 1, 0.05, 0.1}, truth, rule);
            EXPECT_NEAR(r.error_rate(truth, rule), p, 4 * std::sqrt(p * (1 - p) / c.trials) + 1e-12);
        }
    }
}
