#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mosacd/rng.hpp"

namespace mosacd::theory {

__extension__ using uint128 = unsigned __int128;

/// Exact C(n, k) for n <= 128; throws InputError beyond.
uint128 binomial_exact(int n, int k);
/// C(n, k) as a double (exact while it fits in 53 bits; log-gamma beyond n = 128).
double binomial(int n, int k);

enum class IMethod { ClosedSum, Quadrature };

/// I_{m,n}(a,b) = int_0^1 (1-au)^m (1-bu)^n du. m and n must be non-negative integers (held
/// in doubles so combinatorially large bucket counts fit). ClosedSum evaluates the double
/// binomial sum with compensated summation and switches to quadrature once m+n > 30.
double i_factor(double m, double n, double a, double b, IMethod method = IMethod::ClosedSum);

enum class Truth { Collider, NonCollider };
enum class Rule { PC, CPC };

std::string to_string(Truth t);
std::string to_string(Rule r);

/// Candidate sets of one level, split by whether they contain Z and whether they separate.
struct LevelBucket {
    double s_z = 0;     // true sepsets containing Z
    double u_z = 0;     // non-sepsets containing Z
    double s_not_z = 0; // true sepsets without Z
    double u_not_z = 0; // non-sepsets without Z

    double sepsets() const { return s_z + s_not_z; }
    double non_sepsets() const { return u_z + u_not_z; }
};

/// Levels 0..max_level over M = |V \ {X,Y}| candidates: level 0 is the empty set, level l >= 1
/// has C(M-1, l-1) sets containing Z and C(M-1, l) without it; which of them separate follows
/// from the truth at Z.
std::vector<LevelBucket> level_counts(int M, int max_level, Truth truth);

struct LevelProbabilities {
    std::vector<double> prev_no_hit;     // per level
    std::vector<double> first_hit;       // Pr(F_l)
    double pr_d = 0.0;                   // Pr(D), the sum of first_hit
    // Joint with D (not yet divided by Pr(D)), per level.
    std::vector<double> cpc_collider;    // no Z hit, some non-Z hit
    std::vector<double> cpc_all_z;       // no non-Z hit, some Z hit
    std::vector<double> pc_collider;     // first hit lacks Z
    std::vector<double> pc_z_saved;      // first hit contains Z

    static double total(const std::vector<double>& v);
    /// Conditional on D.
    double cpc_collider_given_d() const { return total(cpc_collider) / pr_d; }
    double cpc_all_z_given_d() const { return total(cpc_all_z) / pr_d; }
    double pc_collider_given_d() const { return total(pc_collider) / pr_d; }
    double pc_z_saved_given_d() const { return total(pc_z_saved) / pr_d; }
};

LevelProbabilities level_probabilities(const std::vector<LevelBucket>& counts, double alpha, double beta);

struct StylizedModel {
    int M = 2;
    int ell = 1;
    double alpha = 0.05;
    double beta = 0.1;

    double m() const { return binomial(M - 1, ell - 1); }
    double n() const { return binomial(M - 1, ell); }
    void validate() const;
};

/// Value with its natural log; `value` saturates to 0 or +inf where the log is out of range.
struct Ratio {
    double value = 0.0;
    double log_value = 0.0;
    bool underflow = false;
    bool overflow = false;
};

/// Wrong-orientation odds at level ell, non-collider truth over collider truth.
Ratio r_ratio(const StylizedModel& model, Rule rule);
/// Small-alpha (CPC) and small-alpha, small-beta (PC) approximations.
Ratio r_ratio_approx(const StylizedModel& model, Rule rule);

/// Error probability at level ell given that the search reaches it, for one truth and rule:
/// collider identifications under non-collider truth, Z kept in the sepsets under collider truth.
double level_error_rate(const StylizedModel& model, Truth truth, Rule rule);

struct SimulationConfig {
    int M = 8;
    int start_level = 0;  // levels before this one are skipped (conditioning on reaching it)
    int max_level = 3;
    double alpha = 0.05;
    double beta = 0.1;
    Truth truth = Truth::NonCollider;
    std::uint64_t trials = 100000;
};

struct SimulationResult {
    std::uint64_t trials = 0;
    std::uint64_t decided = 0;         // some hit at some level (event D)
    std::vector<std::uint64_t> first_hit_level;
    std::uint64_t cpc_collider = 0;    // Z in none of the level's hits
    std::uint64_t cpc_all_z = 0;       // Z in every hit
    std::uint64_t cpc_mixed = 0;
    std::uint64_t pc_collider = 0;     // first hit lacks Z
    std::uint64_t pc_z_saved = 0;      // first hit contains Z

    double rate(std::uint64_t count) const { return static_cast<double>(count) / static_cast<double>(trials); }
    /// Error rate (unconditional) for the configured truth under `rule`.
    double error_rate(Truth truth, Rule rule) const;
};

/// Level-wise search with independent per-candidate hits (1-beta for sepsets, alpha
/// otherwise); PC keeps the first hit of a uniformly random within-level order, CPC all hits
/// of the first level that has one.
SimulationResult monte_carlo_stylized(const SimulationConfig& config, Rng& rng);

/// Frequency with which a designated candidate is the first hit when it is shuffled together
/// with `others_true` sepsets (hit prob a) and `others_false` non-sepsets (hit prob b).
double monte_carlo_first_hit(int others_true, int others_false, double a, double b, bool target_is_true,
                             std::uint64_t trials, Rng& rng);

struct NetworkStats {
    std::string name;
    int nodes = 0;
    int arcs = 0;
    double avg_degree = 0.0;
};

/// name,nodes,arcs[,avg_degree] with a header row.
std::vector<NetworkStats> read_network_stats(std::istream& in);

struct FprRow {
    NetworkStats stats;
    int M = 0;
    double pc_colliders_first = 0.0;
    double pc_nonc_first = 0.0;
    double cpc_colliders_first = 0.0;
    double cpc_nonc_first = 0.0;
};

/// M = nodes - 2, levels 0..ell_max. Colliders-first FPR: Pr(collider identified | D) under
/// non-collider truth. Non-collider-first FPR: Pr(Z kept in the sepsets | D) under collider truth.
std::vector<FprRow> expected_fpr_table(const std::vector<NetworkStats>& networks, int ell_max, double alpha,
                                       double beta);

void write_fpr_csv(std::ostream& out, const std::vector<FprRow>& rows);

}  // namespace mosacd::theory
