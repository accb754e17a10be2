#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "mosacd/graph_io.hpp"

namespace oracle {

bool d_separated_moral(const mosacd::Dag& g, int x, int y, const std::vector<int>& s) {
    const int n = g.node_count();
    std::vector<bool> anc(n, false);
    std::vector<int> stack{x, y};
    stack.insert(stack.end(), s.begin(), s.end());
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (anc[v]) continue;
        anc[v] = true;
        for (int p : g.parents(v)) stack.push_back(p);
    }
    std::vector<std::set<int>> adj(n);
    for (int v = 0; v < n; ++v) {
        if (!anc[v]) continue;
        const auto& ps = g.parents(v);
        for (int p : ps) {
            adj[v].insert(p);
            adj[p].insert(v);
        }
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                adj[ps[i]].insert(ps[j]);
                adj[ps[j]].insert(ps[i]);
            }
    }
    std::vector<bool> blocked(n, false), seen(n, false);
    for (int v : s) blocked[v] = true;
    stack = {x};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == y) return false;
        if (seen[v]) continue;
        seen[v] = true;
        for (int w : adj[v])
            if (!blocked[w] && !seen[w]) stack.push_back(w);
    }
    return true;
}

namespace {

bool acyclic(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<int>> out(n);
    for (auto [a, b] : edges) {
        out[a].push_back(b);
        ++indeg[b];
    }
    std::vector<int> q;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) q.push_back(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        ++seen;
        for (int w : out[v])
            if (--indeg[w] == 0) q.push_back(w);
    }
    return seen == n;
}

std::set<std::tuple<int, int, int>> colliders(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::set<int>> par(n);
    std::set<std::pair<int, int>> adj;
    for (auto [a, b] : edges) {
        par[b].insert(a);
        adj.insert({a, b});
        adj.insert({b, a});
    }
    std::set<std::tuple<int, int, int>> out;
    for (int z = 0; z < n; ++z)
        for (int a : par[z])
            for (int b : par[z])
                if (a < b && !adj.count({a, b})) out.insert({a, z, b});
    return out;
}

}  // namespace

mosacd::Pdag cpdag_by_enumeration(const mosacd::Dag& g) {
    const int n = g.node_count();
    std::vector<std::pair<int, int>> truth;
    for (const auto& e : g.edges()) truth.push_back({e.from, e.to});
    const std::size_t m = truth.size();
    if (m > 18) throw std::invalid_argument("graph too large to enumerate");
    const auto target = colliders(n, truth);
    std::vector<int> forward(m, 0), backward(m, 0);
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<std::pair<int, int>> cand;
        for (std::size_t i = 0; i < m; ++i)
            cand.push_back(mask >> i & 1 ? std::make_pair(truth[i].second, truth[i].first) : truth[i]);
        if (!acyclic(n, cand) || colliders(n, cand) != target) continue;
        for (std::size_t i = 0; i < m; ++i) (mask >> i & 1 ? backward : forward)[i]++;
    }
    mosacd::Pdag p(n);
    for (std::size_t i = 0; i < m; ++i) {
        if (backward[i] == 0)
            p.add_directed(truth[i].first, truth[i].second);
        else
            p.add_undirected(truth[i].first, truth[i].second);
    }
    return p;
}

double chi_square_sf(double x, int dof) {
    if (x <= 0) return 1.0;
    const double h = x / 2;
    if (dof % 2 == 0) {
        // exp(-x/2) * sum_{i < k/2} (x/2)^i / i!
        double term = 1, sum = 1;
        for (int i = 1; i < dof / 2; ++i) {
            term *= h / i;
            sum += term;
        }
        return std::exp(-h) * sum;
    }
    // erfc(sqrt(x/2)) + exp(-x/2) * sum_{i=1}^{(k-1)/2} (x/2)^(i-1/2) / Gamma(i+1/2)
    double sum = std::erfc(std::sqrt(h));
    double term = std::sqrt(h) / std::tgamma(1.5);
    for (int i = 1; i <= (dof - 1) / 2; ++i) {
        sum += std::exp(-h) * term;
        term *= h / (i + 0.5);
    }
    return sum;
}

G2 g2(const mosacd::Dataset& data, int x, int y, const std::vector<int>& s) {
    std::map<std::string, std::map<std::pair<int, int>, double>> strata;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        std::string key;
        for (int c : s) key += std::to_string(data.column(c)[r]) + "|";
        strata[key][{data.column(x)[r], data.column(y)[r]}] += 1;
    }
    G2 out;
    for (const auto& [key, cells] : strata) {
        std::map<int, double> rows, cols;
        double total = 0;
        for (const auto& [xy, c] : cells) {
            rows[xy.first] += c;
            cols[xy.second] += c;
            total += c;
        }
        for (const auto& [xy, c] : cells) out.statistic += 2 * c * std::log(c * total / (rows[xy.first] * cols[xy.second]));
        out.dof += (static_cast<int>(rows.size()) - 1) * (static_cast<int>(cols.size()) - 1);
    }
    return out;
}

double i_factor_simpson(int m, int n, double a, double b, int intervals) {
    auto f = [&](long double u) { return std::pow(1 - a * u, m) * std::pow(1 - b * u, n); };
    const long double h = 1.0L / intervals;
    long double sum = f(0) + f(1);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4 : 2) * f(i * h);
    return static_cast<double>(sum * h / 3);
}

double binomial_pascal(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::vector<double> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<double> next(i + 1, 1);
        for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    return row[k];
}

std::vector<std::vector<int>> subsets(const std::vector<int>& items, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (static_cast<int>(cur.size()) == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t j = i; j < items.size(); ++j) {
            cur.push_back(items[j]);
            rec(j + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::set<std::pair<int, int>> directed(const mosacd::Pdag& p) {
    std::set<std::pair<int, int>> out;
    for (int a = 0; a < p.node_count(); ++a)
        for (int b = 0; b < p.node_count(); ++b)
            if (a != b && p.kind(a, b) == mosacd::EdgeKind::Out) out.insert({a, b});
    return out;
}

std::set<std::pair<int, int>> undirected(const mosacd::Pdag& p) {
    std::set<std::pair<int, int>> out;
    for (int a = 0; a < p.node_count(); ++a)
        for (int b = a + 1; b < p.node_count(); ++b)
            if (p.kind(a, b) == mosacd::EdgeKind::Undirected) out.insert({a, b});
    return out;
}

}  // namespace oracle

namespace mosacd {

void PrintTo(const Pdag& p, std::ostream* os) { *os << "\n" << to_text(p); }

void PrintTo(const Dag& g, std::ostream* os) { *os << "\n" << to_text(Pdag::from_dag(g)); }

}  // namespace mosacd
