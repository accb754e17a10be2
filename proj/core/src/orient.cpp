#include "mosacd/orient.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "mosacd/error.hpp"

namespace mosacd {

namespace {

constexpr CycleGuard kGuard = CycleGuard::Directed;

std::string triple_text(const Triple& t) {
    std::ostringstream out;
    out << t.x << " - " << t.z << " - " << t.y;
    return out.str();
}

void note_conflict(OrientLog* log, std::string what) {
    if (log) log->conflicts.push_back(std::move(what));
}

/// Stable sort by descending max p; the input is already in (x, z, y) order.
void sort_by_support(std::vector<Triple>& triples, const SepsetRecord& sigma) {
    std::stable_sort(triples.begin(), triples.end(), [&](const Triple& a, const Triple& b) {
        return sigma.max_p(a.x, a.y) > sigma.max_p(b.x, b.y);
    });
}

}  // namespace

Pdag r2_propagate(Pdag p, OnConflict on_conflict, OrientLog* log, Reach reach) {
    const auto reaches = reach == Reach::Directed ? has_directed_path : has_semi_directed_path;
    std::set<NodePair> skipped;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const NodePair& e : p.undirected_edges()) {
            if (!p.is_undirected(e.first, e.second) || skipped.count(e)) continue;
            const bool forward = reaches(p, e.first, e.second);
            const bool backward = reaches(p, e.second, e.first);
            if (!forward && !backward) continue;
            if (forward && backward) {
                const std::string what = "semi-directed paths both ways between " + std::to_string(e.first) +
                                         " and " + std::to_string(e.second);
                if (on_conflict == OnConflict::Throw) throw ConflictError(what);
                note_conflict(log, "r2: " + what);
                skipped.insert(e);
                continue;
            }
            const NodeId from = forward ? e.first : e.second;
            const NodeId to = forward ? e.second : e.first;
            p.set_directed(from, to);
            if (log) log->event("r2", {from, from, to}, 0.0, "orient");
            changed = true;
        }
    }
    return p;
}

Pdag ci_supervised(Pdag p, const SepsetRecord& sigma, OrientLog* log) {
    std::vector<Triple> triples;
    for (NodeId z = 0; z < p.node_count(); ++z)
        for (NodeId x : p.parents(z))
            for (NodeId y : p.undirected_neighbors(z))
                if (y != x && !p.adjacent(x, y)) triples.push_back({x, z, y, false});
    std::sort(triples.begin(), triples.end(),
              [](const Triple& a, const Triple& b) { return std::tie(a.x, a.z, a.y) < std::tie(b.x, b.z, b.y); });
    sort_by_support(triples, sigma);

    for (const Triple& t : triples) {
        const double mp = sigma.max_p(t.x, t.y);
        // Earlier orientations in this pass may have changed the triple.
        if (!p.is_directed(t.x, t.z) || !p.is_undirected(t.z, t.y)) continue;
        switch (sigma.membership(t.x, t.y, t.z)) {
            case Membership::All:
                if (try_orient(p, t.z, t.y, kGuard)) {
                    if (log) log->event("ci", t, mp, "non-collider");
                } else {
                    note_conflict(log, "ci: " + triple_text(t) + " non-collider would close a cycle");
                }
                break;
            case Membership::None:
                if (try_orient(p, t.y, t.z, kGuard)) {
                    if (log) log->event("ci", t, mp, "collider");
                } else {
                    note_conflict(log, "ci: " + triple_text(t) + " collider would close a cycle");
                }
                break;
            case Membership::Mixed:
            case Membership::Unknown:
                if (log) log->event("ci", t, mp, "deferred");
                break;
        }
    }
    return p;
}

Pdag collider_orient(Pdag p, const SepsetRecord& sigma, OrientLog* log) {
    std::vector<Triple> triples;
    for (const Triple& t : unshielded_triples(p))
        if (p.is_undirected(t.x, t.z) && p.is_undirected(t.z, t.y)) triples.push_back(t);
    sort_by_support(triples, sigma);

    for (const Triple& t : triples) {
        if (!p.is_undirected(t.x, t.z) || !p.is_undirected(t.z, t.y)) continue;
        if (sigma.membership(t.x, t.y, t.z) != Membership::None) continue;
        const double mp = sigma.max_p(t.x, t.y);
        Pdag q = p;
        if (try_orient(q, t.x, t.z, kGuard) && try_orient(q, t.y, t.z, kGuard)) {
            p = std::move(q);
            if (log) log->event("collider", t, mp, "collider");
        } else {
            note_conflict(log, "collider: " + triple_text(t) + " would close a cycle");
        }
    }
    return p;
}

Pdag step3_fixpoint(Pdag p, const SepsetRecord& sigma, OrientLog* log, int max_iterations) {
    for (int i = 0; i < max_iterations; ++i) {
        const Pdag before = p;
        p = r2_propagate(std::move(p), OnConflict::Skip, log, Reach::Directed);
        p = ci_supervised(std::move(p), sigma, log);
        p = collider_orient(std::move(p), sigma, log);
        if (!(p == before)) continue;
        // R3 and R4 presume every collider is in place, so they only run once the rest is stable.
        p = meek_closure(std::move(p), OnConflict::Skip, MeekRules::NoR1);
        if (p == before) return p;
        if (log)
            for (const Edge& e : p.directed_edges())
                if (!before.is_directed(e.from, e.to)) log->event("r3r4", {e.from, e.from, e.to}, 0.0, "orient");
    }
    throw InvariantError("step 3 did not converge");
}

namespace {

/// Directed reachability from `from` to `to` through intermediates outside `blocked`.
bool open_directed_path(const Pdag& p, NodeId from, NodeId to, const std::vector<NodeId>& blocked) {
    std::vector<char> seen(p.node_count(), 0);
    std::deque<NodeId> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        const NodeId a = queue.front();
        queue.pop_front();
        for (NodeId b : p.children(a)) {
            if (b == to) return true;
            if (seen[b] || std::binary_search(blocked.begin(), blocked.end(), b)) continue;
            seen[b] = 1;
            queue.push_back(b);
        }
    }
    return false;
}

}  // namespace

ConflictReport conflict_count(const Pdag& p, const SepsetRecord& sigma, Edge candidate) {
    if (!p.is_undirected(candidate.from, candidate.to)) throw StateError("candidate pair is not undirected");
    ConflictReport report;
    Pdag q = p;
    if (!try_orient(q, candidate.from, candidate.to, kGuard)) {
        report.count = ConflictReport::kInfeasible;
        return report;
    }
    q = meek_closure(std::move(q), OnConflict::Skip);

    for (const auto& [pair, entries] : sigma.entries()) {
        const NodeId x = pair.first, y = pair.second;
        if (x >= q.node_count() || y >= q.node_count() || q.adjacent(x, y)) continue;
        // Triple evidence is shared by all statements of the pair.
        std::string triple_reason;
        for (NodeId z : q.neighbors(x)) {
            if (!q.adjacent(z, y)) continue;
            const bool collider = q.is_directed(x, z) && q.is_directed(y, z);
            const bool non_collider = q.is_directed(z, x) || q.is_directed(z, y);
            const Membership m = sigma.membership(x, y, z);
            if (collider && m == Membership::All) {
                triple_reason = "collider at " + std::to_string(z) + " which separates the pair";
                break;
            }
            if (non_collider && m == Membership::None) {
                triple_reason = "non-collider at " + std::to_string(z) + " which separates neither";
                break;
            }
        }
        for (const SepsetEntry& e : entries) {
            std::string reason = triple_reason;
            if (reason.empty() && (open_directed_path(q, x, y, e.set) || open_directed_path(q, y, x, e.set)))
                reason = "directed path not blocked by the separating set";
            if (!reason.empty()) report.violations.push_back({pair, e, std::move(reason)});
        }
    }
    report.count = static_cast<int>(report.violations.size());
    return report;
}

Pdag least_conflict(Pdag p, const SepsetRecord& sigma, Rng& rng, OrientLog* log) {
    auto edges = p.undirected_edges();
    std::shuffle(edges.begin(), edges.end(), rng);
    for (const NodePair& e : edges) {
        if (!p.is_undirected(e.first, e.second)) continue;
        const int forward = conflict_count(p, sigma, {e.first, e.second}).count;
        const int backward = conflict_count(p, sigma, {e.second, e.first}).count;
        if (forward == backward) continue;
        const Edge pick = forward < backward ? Edge{e.first, e.second} : Edge{e.second, e.first};
        if (!try_orient(p, pick.from, pick.to, kGuard)) {
            note_conflict(log, "least-conflict: " + std::to_string(pick.from) + " -> " + std::to_string(pick.to) +
                                   " would close a cycle");
            continue;
        }
        if (log) {
            ++log->step4_orientations;
            log->event("least-conflict", {pick.from, pick.from, pick.to}, 0.0,
                       std::to_string(std::min(forward, backward)) + " vs " + std::to_string(std::max(forward, backward)));
        }
    }
    return p;
}

namespace {

/// Tarjan's SCC; returns the component id per node.
std::vector<int> strongly_connected(int n, const std::vector<std::vector<NodeId>>& adj) {
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<NodeId> stack;
    int counter = 0, comps = 0;
    // Iterative DFS to stay safe on long chains.
    for (NodeId root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<std::pair<NodeId, std::size_t>> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < adj[v].size()) {
                const NodeId w = adj[v][i++];
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                NodeId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                } while (w != v);
                ++comps;
            }
            const NodeId done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return comp;
}

}  // namespace

std::vector<NodeId> vote_order(const Pdag& p, std::span<const VoteRecord> votes) {
    const int n = p.node_count();
    std::set<Edge> hard;
    for (const Edge& e : p.directed_edges()) hard.insert(e);
    std::map<Edge, int> soft;
    for (const VoteRecord& r : votes) {
        const int net = r.net_support();
        if (net == 0) continue;
        const Edge e = net > 0 ? Edge{r.u, r.v} : Edge{r.v, r.u};
        if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n) throw InputError("vote record outside the graph");
        if (p.adjacent(e.from, e.to) && !p.is_undirected(e.from, e.to)) continue;  // already settled
        soft[e] += std::abs(net);
    }

    for (;;) {
        std::vector<std::vector<NodeId>> adj(n);
        for (const Edge& e : hard) adj[e.from].push_back(e.to);
        for (const auto& [e, w] : soft) adj[e.from].push_back(e.to);
        const auto comp = strongly_connected(n, adj);
        std::vector<int> comp_size(n, 0);
        for (int c : comp) ++comp_size[c];
        const Edge* weakest = nullptr;
        int weakest_w = 0;
        for (const auto& [e, w] : soft) {
            if (comp[e.from] != comp[e.to] || comp_size[comp[e.from]] < 2) continue;
            if (!weakest || w < weakest_w) {
                weakest = &e;
                weakest_w = w;
            }
        }
        if (!weakest) {
            bool hard_cycle = false;
            for (const Edge& e : hard) hard_cycle |= comp[e.from] == comp[e.to];
            if (hard_cycle) throw InvariantError("directed cycle among settled arrows");
            break;
        }
        soft.erase(*weakest);
    }

    std::vector<std::vector<NodeId>> adj(n);
    std::vector<int> indegree(n, 0);
    auto add = [&](const Edge& e) {
        adj[e.from].push_back(e.to);
        ++indegree[e.to];
    };
    for (const Edge& e : hard) add(e);
    for (const auto& [e, w] : soft) add(e);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.push(v);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        const NodeId v = ready.top();
        ready.pop();
        order.push_back(v);
        for (NodeId w : adj[v])
            if (--indegree[w] == 0) ready.push(w);
    }
    if (static_cast<int>(order.size()) != n) throw InvariantError("vote graph still cyclic");
    return order;
}

Dag step5_vote_completion(const Pdag& p, std::span<const VoteRecord> votes) {
    const auto order = vote_order(p, votes);
    std::vector<int> rank(p.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    std::vector<Edge> edges = p.directed_edges();
    for (const NodePair& e : p.undirected_edges())
        edges.push_back(rank[e.first] < rank[e.second] ? Edge{e.first, e.second} : Edge{e.second, e.first});
    return Dag(p.node_count(), edges);
}

OrientResult orient_pdag(Pdag seeded, const SepsetRecord& sigma, std::span<const VoteRecord> votes,
                         const OrientConfig& config, bool record_trace) {
    if (config.max_outer_iterations < 1) throw InputError("max_outer_iterations must be >= 1");
    OrientResult out;
    out.log.record_trace = record_trace;
    Rng rng(config.rng_seed);
    Pdag p = std::move(seeded);
    for (int i = 0; i < config.max_outer_iterations; ++i) {
        ++out.outer_iterations;
        const Pdag before = p;
        p = step3_fixpoint(std::move(p), sigma, &out.log);
        p = least_conflict(std::move(p), sigma, rng, &out.log);
        if (p == before) break;
    }
    out.pdag = p;
    if (config.enable_step5) {
        out.dag = step5_vote_completion(p, votes);
        out.completed = true;
    }
    return out;
}

Pdag baseline_orient(Pdag p, const SepsetRecord& sigma) {
    for (const Triple& t : unshielded_triples(p)) {
        if (sigma.membership(t.x, t.y, t.z) != Membership::None) continue;
        // Keep whatever arrows are already there; add the missing heads if that stays acyclic.
        const bool xz_ok = p.is_directed(t.x, t.z) || p.is_undirected(t.x, t.z);
        const bool yz_ok = p.is_directed(t.y, t.z) || p.is_undirected(t.y, t.z);
        if (!xz_ok || !yz_ok) continue;
        Pdag q = p;
        bool ok = true;
        if (q.is_undirected(t.x, t.z)) ok = try_orient(q, t.x, t.z, kGuard);
        if (ok && q.is_undirected(t.y, t.z)) ok = try_orient(q, t.y, t.z, kGuard);
        if (ok) p = std::move(q);
    }
    return meek_closure(std::move(p), OnConflict::Skip);
}

}  // namespace mosacd
