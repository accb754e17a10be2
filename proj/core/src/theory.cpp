#include "mosacd/theory.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mosacd/error.hpp"

namespace mosacd::theory {

uint128 binomial_exact(int n, int k) {
    if (n < 0 || n > 128) throw InputError("exact binomial needs 0 <= n <= 128");
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    uint128 r = 1;
    for (int i = 1; i <= k; ++i) {
        // r * (n-k+i) / i is an integer; divide out the common factor first to stay in range.
        const uint128 num = static_cast<unsigned>(n - k + i);
        const uint128 g =
            std::gcd(static_cast<unsigned long long>(r % static_cast<unsigned>(i)), static_cast<unsigned long long>(i));
        r = (r / g) * (num / (i / g));
    }
    return r;
}

double binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    if (n <= 128) return static_cast<double>(binomial_exact(n, k));
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

namespace {

bool is_count(double x) { return x >= 0.0 && std::floor(x) == x && std::isfinite(x); }

/// (1 - (1-p)^(k+1)) / (p (k+1)), stable for small p.
double power_mean(double k, double p) {
    if (p == 0.0) return 1.0;
    return -std::expm1((k + 1.0) * std::log1p(-p)) / (p * (k + 1.0));
}

double i_quadrature(double m, double n, double a, double b) {
    auto f = [&](double u) {
        const double la = a * u >= 1.0 ? -std::numeric_limits<double>::infinity() : m * std::log1p(-a * u);
        const double lb = b * u >= 1.0 ? -std::numeric_limits<double>::infinity() : n * std::log1p(-b * u);
        const double l = (m == 0.0 ? 0.0 : la) + (n == 0.0 ? 0.0 : lb);
        return std::exp(l);
    };
    // The integrand decays like exp(-(ma+nb)u); geometric breakpoints keep each panel smooth.
    const double rate = m * a + n * b;
    std::vector<double> cuts{0.0};
    if (rate > 4.0)
        for (double c = 1.0 / rate; c < 1.0; c *= 4.0) cuts.push_back(c);
    cuts.push_back(1.0);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += GK::integrate(f, cuts[i], cuts[i + 1], 10, 1e-12);
    return total;
}

double i_closed_sum(double m, double n, double a, double b) {
    if (n == 0.0) return power_mean(m, a);
    if (m == 0.0) return power_mean(n, b);
    const int mi = static_cast<int>(m), ni = static_cast<int>(n);
    // Neumaier-compensated double sum in long double.
    long double sum = 0.0L, comp = 0.0L;
    for (int i = 0; i <= mi; ++i) {
        const long double ti = static_cast<long double>(binomial(mi, i)) * std::pow(-static_cast<long double>(a), i);
        for (int j = 0; j <= ni; ++j) {
            const long double term = ti * static_cast<long double>(binomial(ni, j)) *
                                     std::pow(-static_cast<long double>(b), j) / static_cast<long double>(i + j + 1);
            const long double t = sum + term;
            if (std::fabs(sum) >= std::fabs(term))
                comp += (sum - t) + term;
            else
                comp += (term - t) + sum;
            sum = t;
        }
    }
    return static_cast<double>(sum + comp);
}

}  // namespace

double i_factor(double m, double n, double a, double b, IMethod method) {
    if (!is_count(m) || !is_count(n)) throw InputError("i_factor needs non-negative integer m, n");
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) throw InputError("i_factor needs a, b in [0,1]");
    if (method == IMethod::Quadrature || m + n > 30.0) {
        if (method == IMethod::ClosedSum && (m == 0.0 || n == 0.0)) return i_closed_sum(m, n, a, b);
        return i_quadrature(m, n, a, b);
    }
    return i_closed_sum(m, n, a, b);
}

std::string to_string(Truth t) { return t == Truth::Collider ? "collider" : "non-collider"; }
std::string to_string(Rule r) { return r == Rule::PC ? "PC" : "CPC"; }

std::vector<LevelBucket> level_counts(int M, int max_level, Truth truth) {
    if (M < 1) throw InputError("M must be >= 1");
    if (max_level < 0) throw InputError("max_level must be >= 0");
    std::vector<LevelBucket> out;
    for (int l = 0; l <= max_level; ++l) {
        const double inc = l == 0 ? 0.0 : binomial(M - 1, l - 1);
        const double exc = l == 0 ? 1.0 : binomial(M - 1, l);
        LevelBucket b;
        if (truth == Truth::NonCollider) {
            b.s_z = inc;
            b.u_not_z = exc;
        } else {
            b.u_z = inc;
            b.s_not_z = exc;
        }
        out.push_back(b);
    }
    return out;
}

double LevelProbabilities::total(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return static_cast<double>(s);
}

namespace {

/// beta^s (1-alpha)^u, the chance that none of s sepsets and u non-sepsets hits.
double no_hit(double s, double u, double alpha, double beta) {
    double l = 0.0;
    if (s > 0.0) {
        if (beta == 0.0) return 0.0;
        l += s * std::log(beta);
    }
    if (u > 0.0) {
        if (alpha == 1.0) return 0.0;
        l += u * std::log1p(-alpha);
    }
    return std::exp(l);
}

/// Expected number of first hits falling in a bucket: `count` candidates of the given kind.
double first_hit_share(double count, bool sepset, double s, double u, double alpha, double beta) {
    if (count == 0.0) return 0.0;
    const double a = 1.0 - beta;
    return sepset ? count * a * i_factor(s - 1.0, u, a, alpha) : count * alpha * i_factor(s, u - 1.0, a, alpha);
}

}  // namespace

LevelProbabilities level_probabilities(const std::vector<LevelBucket>& counts, double alpha, double beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) throw InputError("alpha, beta must lie in [0,1]");
    LevelProbabilities out;
    double prev = 1.0;
    for (const LevelBucket& b : counts) {
        const double s = b.sepsets(), u = b.non_sepsets();
        const double none = no_hit(s, u, alpha, beta);
        out.prev_no_hit.push_back(prev);
        out.first_hit.push_back(prev * (1.0 - none));
        const double no_z = no_hit(b.s_z, b.u_z, alpha, beta);
        const double no_not_z = no_hit(b.s_not_z, b.u_not_z, alpha, beta);
        out.cpc_collider.push_back(prev * no_z * (1.0 - no_not_z));
        out.cpc_all_z.push_back(prev * no_not_z * (1.0 - no_z));
        out.pc_collider.push_back(prev * (first_hit_share(b.s_not_z, true, s, u, alpha, beta) +
                                          first_hit_share(b.u_not_z, false, s, u, alpha, beta)));
        out.pc_z_saved.push_back(prev * (first_hit_share(b.s_z, true, s, u, alpha, beta) +
                                         first_hit_share(b.u_z, false, s, u, alpha, beta)));
        prev *= none;
    }
    out.pr_d = LevelProbabilities::total(out.first_hit);
    return out;
}

void StylizedModel::validate() const {
    if (M < 2) throw InputError("stylized model needs M >= 2");
    if (ell < 1 || ell > M - 1) throw InputError("stylized model needs 1 <= ell <= M-1");
    if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
        throw InputError("stylized model needs alpha, beta in (0,1)");
}

namespace {

Ratio from_log(double l) {
    Ratio r;
    r.log_value = l;
    constexpr double kMaxLog = 709.78;  // log(DBL_MAX)
    constexpr double kMinLog = -745.13; // log(smallest subnormal)
    if (l > kMaxLog) {
        r.value = std::numeric_limits<double>::infinity();
        r.overflow = true;
    } else if (l < kMinLog) {
        r.value = 0.0;
        r.underflow = true;
    } else {
        r.value = std::exp(l);
    }
    return r;
}

/// log(1 - (1-alpha)^t)
double log_one_minus_pow(double alpha, double t) { return std::log(-std::expm1(t * std::log1p(-alpha))); }

}  // namespace

Ratio r_ratio(const StylizedModel& model, Rule rule) {
    model.validate();
    const double m = model.m(), n = model.n();
    if (m == 0.0 || n == 0.0) throw InputError("degenerate stylized model (m or n is zero)");
    if (rule == Rule::CPC)
        return from_log((m - n) * std::log(model.beta) + log_one_minus_pow(model.alpha, n) -
                        log_one_minus_pow(model.alpha, m));
    const double a = 1.0 - model.beta;
    return from_log(std::log(n / m) + std::log(i_factor(m, n - 1.0, a, model.alpha)) -
                    std::log(i_factor(n, m - 1.0, a, model.alpha)));
}

Ratio r_ratio_approx(const StylizedModel& model, Rule rule) {
    model.validate();
    const double m = model.m(), n = model.n();
    if (rule == Rule::CPC)
        return from_log((m - n) * std::log(model.beta) +
                        std::log(static_cast<double>(model.M - model.ell) / model.ell));
    const double zeroth = n * (n + 1.0) / (m * (m + 1.0));
    const double correction = 1.0 + model.alpha * (m - n) * (m + n + 1.0) / ((m + 2.0) * (n + 2.0));
    return from_log(std::log(zeroth) + std::log(correction));
}

double level_error_rate(const StylizedModel& model, Truth truth, Rule rule) {
    model.validate();
    const double m = model.m(), n = model.n();
    const double a = 1.0 - model.beta, alpha = model.alpha, beta = model.beta;
    if (truth == Truth::NonCollider) {
        // Sepsets are the m sets with Z, the n sets without are non-sepsets.
        if (rule == Rule::CPC) return no_hit(m, 0, alpha, beta) * (1.0 - no_hit(0, n, alpha, beta));
        return n * alpha * i_factor(m, n - 1.0, a, alpha);
    }
    if (rule == Rule::CPC) return no_hit(n, 0, alpha, beta) * (1.0 - no_hit(0, m, alpha, beta));
    return m * alpha * i_factor(n, m - 1.0, a, alpha);
}

double SimulationResult::error_rate(Truth truth, Rule rule) const {
    if (truth == Truth::NonCollider) return rate(rule == Rule::PC ? pc_collider : cpc_collider);
    return rate(rule == Rule::PC ? pc_z_saved : cpc_all_z);
}

SimulationResult monte_carlo_stylized(const SimulationConfig& config, Rng& rng) {
    if (config.trials < 1) throw InputError("trials must be >= 1");
    if (config.start_level < 0 || config.start_level > config.max_level) throw InputError("bad level range");
    const auto counts = level_counts(config.M, config.max_level, config.truth);
    for (const auto& b : counts)
        if (b.sepsets() + b.non_sepsets() > 1e9) throw InputError("level too large to simulate");
    SimulationResult out;
    out.trials = config.trials;
    out.first_hit_level.assign(counts.size(), 0);

    using Binom = std::binomial_distribution<long long>;
    auto draw = [&](double count, double p) -> long long {
        if (count == 0.0 || p == 0.0) return 0;
        if (p == 1.0) return static_cast<long long>(count);
        return Binom(static_cast<long long>(count), p)(rng);
    };
    const double hit_true = 1.0 - config.beta;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
        for (int l = config.start_level; l <= config.max_level; ++l) {
            const auto& b = counts[l];
            const long long hz = draw(b.s_z, hit_true) + draw(b.u_z, config.alpha);
            const long long hn = draw(b.s_not_z, hit_true) + draw(b.u_not_z, config.alpha);
            if (hz + hn == 0) continue;
            ++out.decided;
            ++out.first_hit_level[l];
            if (hz == 0)
                ++out.cpc_collider;
            else if (hn == 0)
                ++out.cpc_all_z;
            else
                ++out.cpc_mixed;
            // The first hit of a uniform order is a uniform pick among the hits.
            std::uniform_int_distribution<long long> pick(0, hz + hn - 1);
            if (pick(rng) < hz)
                ++out.pc_z_saved;
            else
                ++out.pc_collider;
            break;
        }
    }
    return out;
}

double monte_carlo_first_hit(int others_true, int others_false, double a, double b, bool target_is_true,
                             std::uint64_t trials, Rng& rng) {
    if (others_true < 0 || others_false < 0 || trials < 1) throw InputError("bad first-hit simulation parameters");
    const int n = others_true + others_false + 1;
    std::vector<double> p(n);
    p[0] = target_is_true ? a : b;  // candidate 0 is the target
    for (int i = 1; i <= others_true; ++i) p[i] = a;
    for (int i = others_true + 1; i < n; ++i) p[i] = b;
    std::vector<int> order(n);
    std::uint64_t wins = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (int c : order) {
            if (uniform01(rng) < p[c]) {
                wins += c == 0;
                break;
            }
        }
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

std::vector<NetworkStats> read_network_stats(std::istream& in) {
    std::vector<NetworkStats> out;
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3) throw ParseError("network stats row needs name,nodes,arcs", lineno, 1);
        NetworkStats s;
        try {
            s.name = cells[0];
            s.nodes = std::stoi(cells[1]);
            s.arcs = std::stoi(cells[2]);
            s.avg_degree = cells.size() > 3 && !cells[3].empty() ? std::stod(cells[3]) : 2.0 * s.arcs / s.nodes;
        } catch (const std::exception&) {
            throw ParseError("bad number in network stats row", lineno, 1);
        }
        if (s.nodes < 4) throw ParseError("network '" + s.name + "' needs at least 4 nodes", lineno, 1);
        out.push_back(s);
    }
    return out;
}

std::vector<FprRow> expected_fpr_table(const std::vector<NetworkStats>& networks, int ell_max, double alpha,
                                       double beta) {
    if (ell_max < 1) throw InputError("ell_max must be >= 1");
    std::vector<FprRow> rows;
    for (const auto& net : networks) {
        FprRow row;
        row.stats = net;
        row.M = net.nodes - 2;
        if (row.M < 2) throw InputError("network '" + net.name + "' is too small");
        const auto nc = level_probabilities(level_counts(row.M, ell_max, Truth::NonCollider), alpha, beta);
        const auto co = level_probabilities(level_counts(row.M, ell_max, Truth::Collider), alpha, beta);
        row.pc_colliders_first = nc.pc_collider_given_d();
        row.cpc_colliders_first = nc.cpc_collider_given_d();
        row.pc_nonc_first = co.pc_z_saved_given_d();
        row.cpc_nonc_first = co.cpc_all_z_given_d();
        rows.push_back(row);
    }
    return rows;
}

void write_fpr_csv(std::ostream& out, const std::vector<FprRow>& rows) {
    out << "network,PC (colliders-first),PC (nonc-first),CPC (colliders-first),CPC (nonc-first)\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.1e\n", r.stats.name.c_str(), r.pc_colliders_first,
                      r.pc_nonc_first, r.cpc_colliders_first, r.cpc_nonc_first);
        out << buf;
    }
}

}  // namespace mosacd::theory
