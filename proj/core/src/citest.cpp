#include "mosacd/citest.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "mosacd/error.hpp"
#include "mosacd/rng.hpp"

namespace mosacd {

double chi_square_sf(double statistic, double dof) {
    if (!(dof > 0.0)) throw InputError("chi-square dof must be positive");
    if (!(statistic > 0.0)) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

namespace {

void check_query(int node_count, NodeId x, NodeId y, std::span<const NodeId> s) {
    auto bad = [&](NodeId v) { return v < 0 || v >= node_count; };
    if (bad(x) || bad(y)) throw InputError("CI query on unknown node");
    if (x == y) throw InputError("CI query needs two distinct nodes");
    for (NodeId v : s) {
        if (bad(v)) throw InputError("conditioning set holds an unknown node");
        if (v == x || v == y) throw InputError("conditioning set overlaps the tested pair");
    }
}

}  // namespace

CiResult g2_test(const Dataset& data, NodeId x, NodeId y, std::span<const NodeId> s, double threshold) {
    check_query(data.columns(), x, y, s);
    if (data.rows() == 0) throw DegenerateTestError("empty dataset");
    const int rx = data.cardinality(x);
    const int ry = data.cardinality(y);
    const auto cx = data.column(x);
    const auto cy = data.column(y);

    // Stratum key: mixed-radix code of the conditioning columns, compacted through a hash map
    // so that only observed configurations allocate a table.
    std::unordered_map<std::uint64_t, int> stratum_index;
    std::vector<std::vector<double>> tables;
    std::vector<std::span<const int>> cs;
    for (NodeId v : s) cs.push_back(data.column(v));
    for (std::size_t row = 0; row < data.rows(); ++row) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            key = key * static_cast<std::uint64_t>(data.cardinality(s[i])) + static_cast<std::uint64_t>(cs[i][row]);
        auto [it, fresh] = stratum_index.emplace(key, static_cast<int>(tables.size()));
        if (fresh) tables.emplace_back(static_cast<std::size_t>(rx) * ry, 0.0);
        tables[it->second][static_cast<std::size_t>(cx[row]) * ry + cy[row]] += 1.0;
    }

    double stat = 0.0;
    long long dof = 0;
    std::vector<double> rows(rx), cols(ry);
    for (const auto& t : tables) {
        std::fill(rows.begin(), rows.end(), 0.0);
        std::fill(cols.begin(), cols.end(), 0.0);
        double n = 0.0;
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < ry; ++j) {
                const double o = t[static_cast<std::size_t>(i) * ry + j];
                rows[i] += o;
                cols[j] += o;
                n += o;
            }
        const auto r_used = std::count_if(rows.begin(), rows.end(), [](double v) { return v > 0.0; });
        const auto c_used = std::count_if(cols.begin(), cols.end(), [](double v) { return v > 0.0; });
        dof += static_cast<long long>(r_used - 1) * (c_used - 1);
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < ry; ++j) {
                const double o = t[static_cast<std::size_t>(i) * ry + j];
                if (o > 0.0) stat += o * std::log(o * n / (rows[i] * cols[j]));
            }
    }
    stat = std::max(0.0, 2.0 * stat);
    if (dof <= 0) throw DegenerateTestError("no degrees of freedom left");
    CiResult r;
    r.statistic = stat;
    r.dof = static_cast<int>(dof);
    r.p_value = chi_square_sf(stat, static_cast<double>(dof));
    r.independent = r.p_value > threshold;
    return r;
}

CiResult oracle_test(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s) {
    check_query(g.node_count(), x, y, s);
    CiResult r;
    r.independent = d_separated(g, x, y, s);
    r.p_value = r.independent ? 1.0 : 0.0;
    return r;
}

CiResult noisy_oracle_test(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s, const NoiseParams& noise) {
    if (!(noise.alpha >= 0.0 && noise.alpha <= 1.0 && noise.beta >= 0.0 && noise.beta <= 1.0))
        throw InputError("noise rates must lie in [0,1]");
    CiResult r = oracle_test(g, x, y, s);
    std::vector<NodeId> key(s.begin(), s.end());
    std::sort(key.begin(), key.end());
    std::uint64_t h = hash_combine(noise.rng_seed, static_cast<std::uint64_t>(std::min(x, y)));
    h = hash_combine(h, static_cast<std::uint64_t>(std::max(x, y)));
    h = hash_combine(h, key.size());
    for (NodeId v : key) h = hash_combine(h, static_cast<std::uint64_t>(v));
    const double u = to_unit(mix64(h));
    const bool flip = r.independent ? u < noise.beta : u < noise.alpha;
    if (flip) {
        r.independent = !r.independent;
        r.p_value = r.independent ? 1.0 : 0.0;
    }
    return r;
}

CiResult G2Test::test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const {
    try {
        return g2_test(*data_, x, y, s, threshold);
    } catch (const DegenerateTestError&) {
        return CiResult{true, 1.0, 0.0, 0};
    }
}

CiResult OracleTest::test(NodeId x, NodeId y, std::span<const NodeId> s, double) const {
    return oracle_test(*g_, x, y, s);
}

CiResult NoisyOracleTest::test(NodeId x, NodeId y, std::span<const NodeId> s, double) const {
    return noisy_oracle_test(*g_, x, y, s, noise_);
}

std::string NoisyOracleTest::describe() const {
    std::ostringstream out;
    out << "noisy-oracle(alpha=" << noise_.alpha << ",beta=" << noise_.beta << ",seed=" << noise_.rng_seed << ")";
    return out.str();
}

}  // namespace mosacd
