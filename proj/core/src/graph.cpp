#include "mosacd/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <tuple>

#include "mosacd/error.hpp"

namespace mosacd {

namespace {

void insert_sorted(std::vector<NodeId>& v, NodeId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void erase_sorted(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

std::string join_path(const std::vector<NodeId>& path) {
    std::ostringstream out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out << " ~ ";
        out << path[i];
    }
    return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Dag

Dag::Dag(int node_count, std::span<const Edge> edges)
    : node_count_(node_count), parents_(std::max(node_count, 0)), children_(std::max(node_count, 0)) {
    if (node_count < 0) throw InputError("negative node count");
    for (const Edge& e : edges) {
        if (e.from < 0 || e.to < 0 || e.from >= node_count || e.to >= node_count)
            throw InputError("edge endpoint out of range: " + std::to_string(e.from) + " -> " +
                             std::to_string(e.to));
        if (e.from == e.to) throw InputError("self-loop on node " + std::to_string(e.from));
        if (std::binary_search(children_[e.from].begin(), children_[e.from].end(), e.to))
            throw InputError("duplicate edge " + std::to_string(e.from) + " -> " + std::to_string(e.to));
        if (std::binary_search(children_[e.to].begin(), children_[e.to].end(), e.from))
            throw InputError("edge given in both directions between " + std::to_string(e.from) +
                             " and " + std::to_string(e.to));
        insert_sorted(children_[e.from], e.to);
        insert_sorted(parents_[e.to], e.from);
        ++edge_count_;
    }
    if (topological_order().size() != static_cast<std::size_t>(node_count))
        throw InputError("edge set contains a directed cycle");
}

bool Dag::has_edge(NodeId from, NodeId to) const {
    if (from < 0 || from >= node_count_) return false;
    const auto& c = children_[from];
    return std::binary_search(c.begin(), c.end(), to);
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (NodeId v = 0; v < node_count_; ++v)
        for (NodeId c : children_[v]) out.push_back({v, c});
    return out;
}

std::vector<NodeId> Dag::topological_order() const {
    std::vector<int> indegree(node_count_);
    for (NodeId v = 0; v < node_count_; ++v) indegree[v] = static_cast<int>(parents_[v].size());
    // Smallest ready id first, so the order is deterministic.
    std::vector<NodeId> ready;
    for (NodeId v = node_count_ - 1; v >= 0; --v)
        if (indegree[v] == 0) ready.push_back(v);
    std::vector<NodeId> order;
    order.reserve(node_count_);
    while (!ready.empty()) {
        NodeId v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (NodeId c : children_[v]) {
            if (--indegree[c] == 0) {
                ready.insert(std::upper_bound(ready.begin(), ready.end(), c, std::greater<>()), c);
            }
        }
    }
    return order;
}

// ---------------------------------------------------------------------------
// Pdag

Pdag::Pdag(int node_count) : node_count_(node_count) {
    if (node_count < 0) throw InputError("negative node count");
    marks_.assign(static_cast<std::size_t>(node_count) * (node_count > 0 ? node_count - 1 : 0) / 2,
                  Mark::None);
    adjacency_.resize(node_count);
}

Pdag Pdag::skeleton_of(const Dag& g) {
    Pdag p(g.node_count());
    for (const Edge& e : g.edges()) p.add_undirected(e.from, e.to);
    return p;
}

Pdag Pdag::from_dag(const Dag& g) {
    Pdag p(g.node_count());
    for (const Edge& e : g.edges()) p.add_directed(e.from, e.to);
    return p;
}

void Pdag::check(NodeId v) const {
    if (v < 0 || v >= node_count_) throw InputError("unknown node id " + std::to_string(v));
}

std::size_t Pdag::slot(NodeId a, NodeId b) const {
    check(a);
    check(b);
    if (a == b) throw InputError("self-loop on node " + std::to_string(a));
    const auto lo = static_cast<std::size_t>(std::min(a, b));
    const auto hi = static_cast<std::size_t>(std::max(a, b));
    const auto n = static_cast<std::size_t>(node_count_);
    return lo * (2 * n - lo - 1) / 2 + (hi - lo - 1);
}

EdgeKind Pdag::kind(NodeId a, NodeId b) const {
    switch (marks_[slot(a, b)]) {
        case Mark::None: return EdgeKind::None;
        case Mark::Undirected: return EdgeKind::Undirected;
        case Mark::LowToHigh: return a < b ? EdgeKind::Out : EdgeKind::In;
        case Mark::HighToLow: return a < b ? EdgeKind::In : EdgeKind::Out;
    }
    return EdgeKind::None;
}

void Pdag::link(NodeId a, NodeId b) {
    insert_sorted(adjacency_[a], b);
    insert_sorted(adjacency_[b], a);
    ++edge_count_;
}

void Pdag::unlink(NodeId a, NodeId b) {
    erase_sorted(adjacency_[a], b);
    erase_sorted(adjacency_[b], a);
    --edge_count_;
}

void Pdag::add_undirected(NodeId a, NodeId b) {
    auto& m = marks_[slot(a, b)];
    if (m != Mark::None) throw StateError("pair already adjacent");
    m = Mark::Undirected;
    link(a, b);
}

void Pdag::add_directed(NodeId from, NodeId to) {
    auto& m = marks_[slot(from, to)];
    if (m != Mark::None) throw StateError("pair already adjacent");
    m = from < to ? Mark::LowToHigh : Mark::HighToLow;
    link(from, to);
    ++directed_count_;
}

void Pdag::remove_edge(NodeId a, NodeId b) {
    auto& m = marks_[slot(a, b)];
    if (m == Mark::None) throw StateError("pair not adjacent");
    if (m != Mark::Undirected) --directed_count_;
    m = Mark::None;
    unlink(a, b);
}

void Pdag::set_directed(NodeId from, NodeId to) {
    auto& m = marks_[slot(from, to)];
    if (m == Mark::None) throw StateError("pair not adjacent");
    if (m == Mark::Undirected) ++directed_count_;
    m = from < to ? Mark::LowToHigh : Mark::HighToLow;
}

void Pdag::set_undirected(NodeId a, NodeId b) {
    auto& m = marks_[slot(a, b)];
    if (m == Mark::None) throw StateError("pair not adjacent");
    if (m != Mark::Undirected) --directed_count_;
    m = Mark::Undirected;
}

std::vector<NodeId> Pdag::undirected_neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (NodeId w : neighbors(v))
        if (kind(v, w) == EdgeKind::Undirected) out.push_back(w);
    return out;
}

std::vector<NodeId> Pdag::parents(NodeId v) const {
    std::vector<NodeId> out;
    for (NodeId w : neighbors(v))
        if (kind(v, w) == EdgeKind::In) out.push_back(w);
    return out;
}

std::vector<NodeId> Pdag::children(NodeId v) const {
    std::vector<NodeId> out;
    for (NodeId w : neighbors(v))
        if (kind(v, w) == EdgeKind::Out) out.push_back(w);
    return out;
}

std::vector<NodePair> Pdag::undirected_edges() const {
    std::vector<NodePair> out;
    for (NodeId a = 0; a < node_count_; ++a)
        for (NodeId b : adjacency_[a])
            if (a < b && kind(a, b) == EdgeKind::Undirected) out.push_back({a, b});
    return out;
}

std::vector<Edge> Pdag::directed_edges() const {
    std::vector<Edge> out;
    for (NodeId a = 0; a < node_count_; ++a)
        for (NodeId b : adjacency_[a])
            if (kind(a, b) == EdgeKind::Out) out.push_back({a, b});
    return out;
}

// ---------------------------------------------------------------------------
// Paths

std::optional<std::vector<NodeId>> find_semi_directed_path(const Pdag& p, NodeId x, NodeId y) {
    const int n = p.node_count();
    if (x < 0 || x >= n || y < 0 || y >= n) throw InputError("unknown node id");
    if (x == y) throw InputError("semi-directed path endpoints must differ");

    // BFS over (node, has-seen-a-directed-edge) states.
    auto state = [n](NodeId v, int flag) { return flag * n + v; };
    std::vector<int> prev(2 * n, -1);
    std::vector<char> seen(2 * n, 0);
    std::deque<int> queue;
    seen[state(x, 0)] = 1;
    queue.push_back(state(x, 0));
    int goal = -1;
    while (!queue.empty() && goal < 0) {
        const int s = queue.front();
        queue.pop_front();
        const NodeId v = s % n;
        const int flag = s / n;
        for (NodeId w : p.neighbors(v)) {
            const EdgeKind k = p.kind(v, w);
            if (k == EdgeKind::In) continue;
            const int next_flag = (flag || k == EdgeKind::Out) ? 1 : 0;
            const int t = state(w, next_flag);
            if (seen[t]) continue;
            seen[t] = 1;
            prev[t] = s;
            if (w == y && next_flag) {
                goal = t;
                break;
            }
            if (w != y) queue.push_back(t);
        }
    }
    if (goal < 0) return std::nullopt;
    std::vector<NodeId> path;
    for (int s = goal; s >= 0; s = prev[s]) path.push_back(s % n);
    std::reverse(path.begin(), path.end());
    return path;
}

bool has_semi_directed_path(const Pdag& p, NodeId x, NodeId y) {
    return find_semi_directed_path(p, x, y).has_value();
}

bool has_directed_path(const Pdag& p, NodeId x, NodeId y) {
    const int n = p.node_count();
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{x};
    seen[x] = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : p.neighbors(v)) {
            if (p.kind(v, w) != EdgeKind::Out || seen[w]) continue;
            if (w == y) return true;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

bool orientation_creates_cycle(const Pdag& p, NodeId x, NodeId y) {
    return has_semi_directed_path(p, y, x);
}

Pdag orient(Pdag p, NodeId x, NodeId y) {
    if (p.kind(x, y) != EdgeKind::Undirected)
        throw StateError("cannot orient " + std::to_string(x) + " -> " + std::to_string(y) +
                         ": pair is " + to_string(p.kind(x, y)));
    if (orientation_creates_cycle(p, x, y)) {
        Pdag probe = p;
        probe.set_directed(x, y);
        auto path = find_semi_directed_path(probe, y, x);
        std::vector<NodeId> cycle = path ? *path : std::vector<NodeId>{y, x};
        throw CycleError("orienting " + std::to_string(x) + " -> " + std::to_string(y) +
                             " closes the cycle " + join_path(cycle),
                         cycle);
    }
    p.set_directed(x, y);
    return p;
}

bool try_orient(Pdag& p, NodeId x, NodeId y, CycleGuard guard) {
    if (p.kind(x, y) != EdgeKind::Undirected) return false;
    const bool blocked = guard == CycleGuard::SemiDirected ? orientation_creates_cycle(p, x, y)
                                                           : has_directed_path(p, y, x);
    if (blocked) return false;
    p.set_directed(x, y);
    return true;
}

// ---------------------------------------------------------------------------
// Triples

std::vector<Triple> unshielded_triples(const Pdag& p) {
    std::vector<Triple> out;
    for (NodeId z = 0; z < p.node_count(); ++z) {
        const auto& adj = p.neighbors(z);
        for (std::size_t i = 0; i < adj.size(); ++i)
            for (std::size_t j = i + 1; j < adj.size(); ++j)
                if (!p.adjacent(adj[i], adj[j])) out.push_back({adj[i], z, adj[j], false});
    }
    std::sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) {
        return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    });
    return out;
}

std::vector<Triple> v_structures(const Dag& g) {
    std::vector<Triple> out;
    for (NodeId z = 0; z < g.node_count(); ++z) {
        const auto& pa = g.parents(z);
        for (std::size_t i = 0; i < pa.size(); ++i)
            for (std::size_t j = i + 1; j < pa.size(); ++j)
                if (!g.adjacent(pa[i], pa[j])) out.push_back({pa[i], z, pa[j], false});
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// d-separation

bool d_separated(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s) {
    const int n = g.node_count();
    if (x < 0 || x >= n || y < 0 || y >= n) throw InputError("unknown node id");
    if (x == y) throw InputError("d-separation needs two distinct nodes");
    std::vector<char> in_s(n, 0);
    for (NodeId v : s) {
        if (v < 0 || v >= n) throw InputError("unknown node id in conditioning set");
        if (v == x || v == y) throw InputError("conditioning set contains an endpoint");
        in_s[v] = 1;
    }

    // Nodes with a descendant in s (including s itself): colliders there are open.
    std::vector<char> anc(n, 0);
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < n; ++v)
        if (in_s[v]) {
            anc[v] = 1;
            stack.push_back(v);
        }
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId u : g.parents(v))
            if (!anc[u]) {
                anc[u] = 1;
                stack.push_back(u);
            }
    }

    // Ball states: 0 = arrived from a child (moving up), 1 = arrived from a parent (moving down).
    std::vector<char> visited(2 * n, 0);
    std::vector<std::pair<NodeId, int>> frontier{{x, 0}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.back();
        frontier.pop_back();
        if (visited[2 * v + dir]) continue;
        visited[2 * v + dir] = 1;
        if (v == y && !in_s[v]) return false;
        if (dir == 0) {
            if (in_s[v]) continue;
            for (NodeId u : g.parents(v)) frontier.push_back({u, 0});
            for (NodeId c : g.children(v)) frontier.push_back({c, 1});
        } else {
            if (!in_s[v])
                for (NodeId c : g.children(v)) frontier.push_back({c, 1});
            if (anc[v])
                for (NodeId u : g.parents(v)) frontier.push_back({u, 0});
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Meek rules

namespace {

/// Whether one of R1-R4 forces a -> b on the current graph (a - b undirected).
bool meek_forces(const Pdag& p, NodeId a, NodeId b, MeekRules rules) {
    const auto& adj_a = p.neighbors(a);
    // R1: c -> a - b, c and b non-adjacent.
    if (rules == MeekRules::All)
        for (NodeId c : adj_a)
            if (c != b && p.kind(c, a) == EdgeKind::Out && !p.adjacent(c, b)) return true;
    // R2: a -> c -> b.
    for (NodeId c : adj_a)
        if (c != b && p.kind(a, c) == EdgeKind::Out && p.kind(c, b) == EdgeKind::Out) return true;
    // R3: a - c -> b, a - d -> b, c and d non-adjacent.
    std::vector<NodeId> kite;
    for (NodeId c : adj_a)
        if (c != b && p.kind(a, c) == EdgeKind::Undirected && p.kind(c, b) == EdgeKind::Out)
            kite.push_back(c);
    for (std::size_t i = 0; i < kite.size(); ++i)
        for (std::size_t j = i + 1; j < kite.size(); ++j)
            if (!p.adjacent(kite[i], kite[j])) return true;
    // R4: a - d -> c -> b, a adjacent to c, d and b non-adjacent.
    for (NodeId c : p.neighbors(b)) {
        if (c == a || p.kind(c, b) != EdgeKind::Out || !p.adjacent(a, c)) continue;
        for (NodeId d : p.neighbors(c)) {
            if (d == a || d == b || p.kind(d, c) != EdgeKind::Out) continue;
            if (p.kind(a, d) == EdgeKind::Undirected && !p.adjacent(d, b)) return true;
        }
    }
    return false;
}

}  // namespace

Pdag meek_closure(Pdag p, OnConflict on_conflict, MeekRules rules) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const NodePair& e : p.undirected_edges()) {
            if (!p.is_undirected(e.first, e.second)) continue;
            const bool forward = meek_forces(p, e.first, e.second, rules);
            const bool backward = meek_forces(p, e.second, e.first, rules);
            if (!forward && !backward) continue;
            if (forward && backward) {
                if (on_conflict == OnConflict::Throw)
                    throw ConflictError("Meek rules force both directions on " +
                                        std::to_string(e.first) + " - " + std::to_string(e.second));
                continue;
            }
            const NodeId from = forward ? e.first : e.second;
            const NodeId to = forward ? e.second : e.first;
            if (has_directed_path(p, to, from)) {
                if (on_conflict == OnConflict::Throw)
                    throw ConflictError("orienting " + std::to_string(from) + " -> " + std::to_string(to) +
                                        " closes a directed cycle");
                continue;
            }
            p.set_directed(from, to);
            changed = true;
        }
    }
    return p;
}

Pdag cpdag_of(const Dag& g) {
    Pdag p = Pdag::skeleton_of(g);
    for (const Triple& t : v_structures(g)) {
        p.set_directed(t.x, t.z);
        p.set_directed(t.y, t.z);
    }
    return meek_closure(std::move(p));
}

// ---------------------------------------------------------------------------
// Generators

Dag random_dag(int node_count, double edge_probability, Rng& rng) {
    std::vector<NodeId> order(node_count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Edge> edges;
    for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j)
            if (uniform01(rng) < edge_probability) edges.push_back({order[i], order[j]});
    return Dag(node_count, edges);
}

Dag random_dag_with_edges(int node_count, int edge_count, Rng& rng) {
    const int max_edges = node_count * (node_count - 1) / 2;
    if (edge_count < 0 || edge_count > max_edges) throw InputError("edge count out of range");
    std::vector<NodeId> order(node_count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j) slots.push_back({i, j});
    std::shuffle(slots.begin(), slots.end(), rng);
    std::vector<Edge> edges;
    for (int k = 0; k < edge_count; ++k) edges.push_back({order[slots[k].first], order[slots[k].second]});
    return Dag(node_count, edges);
}

std::string to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::None: return "absent";
        case EdgeKind::Undirected: return "undirected";
        case EdgeKind::Out: return "directed (out)";
        case EdgeKind::In: return "directed (in)";
    }
    return "?";
}

}  // namespace mosacd
