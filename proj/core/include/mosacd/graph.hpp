#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mosacd/rng.hpp"

namespace mosacd {

/// Index into a node table. Display names live alongside the graph (see Dataset, BayesNet).
using NodeId = int;

/// Ordered pair, read as `from -> to`.
struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unordered pair stored with `first < second`.
struct NodePair {
    NodeId first = 0;
    NodeId second = 0;

    static NodePair of(NodeId a, NodeId b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

class Dag {
public:
    Dag() = default;

    /// Throws InputError on self-loops, duplicates, out-of-range ids or a directed cycle.
    explicit Dag(int node_count, std::span<const Edge> edges = {});

    int node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edge_count_; }

    const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
    const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }

    bool has_edge(NodeId from, NodeId to) const;
    bool adjacent(NodeId a, NodeId b) const { return has_edge(a, b) || has_edge(b, a); }

    /// Sorted lexicographically by (from, to).
    std::vector<Edge> edges() const;
    std::vector<NodeId> topological_order() const;

    friend bool operator==(const Dag& a, const Dag& b) {
        return a.node_count_ == b.node_count_ && a.parents_ == b.parents_;
    }

private:
    int node_count_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<NodeId>> parents_;   // sorted
    std::vector<std::vector<NodeId>> children_;  // sorted
};

/// Edge state seen from one endpoint: `kind(a, b)` is Out for a -> b and In for a <- b.
enum class EdgeKind : std::uint8_t { None, Undirected, Out, In };

/// Partially directed graph. Each unordered pair owns exactly one slot holding its mark,
/// so "at most one mark per pair" holds by construction.
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(int node_count);

    static Pdag skeleton_of(const Dag& g);
    static Pdag from_dag(const Dag& g);

    int node_count() const noexcept { return node_count_; }

    EdgeKind kind(NodeId a, NodeId b) const;
    bool adjacent(NodeId a, NodeId b) const { return kind(a, b) != EdgeKind::None; }
    bool is_undirected(NodeId a, NodeId b) const { return kind(a, b) == EdgeKind::Undirected; }
    bool is_directed(NodeId from, NodeId to) const { return kind(from, to) == EdgeKind::Out; }

    void add_undirected(NodeId a, NodeId b);
    void add_directed(NodeId from, NodeId to);
    void remove_edge(NodeId a, NodeId b);

    /// Raw mark update on an existing pair; no cycle checks (see orient()).
    void set_directed(NodeId from, NodeId to);
    void set_undirected(NodeId a, NodeId b);

    /// All adjacent nodes, ascending.
    const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_.at(v); }
    std::vector<NodeId> undirected_neighbors(NodeId v) const;
    std::vector<NodeId> parents(NodeId v) const;
    std::vector<NodeId> children(NodeId v) const;

    std::vector<NodePair> undirected_edges() const;
    std::vector<Edge> directed_edges() const;
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::size_t directed_count() const noexcept { return directed_count_; }

    friend bool operator==(const Pdag& a, const Pdag& b) {
        return a.node_count_ == b.node_count_ && a.marks_ == b.marks_;
    }

private:
    enum class Mark : std::uint8_t { None, Undirected, LowToHigh, HighToLow };

    void check(NodeId v) const;
    std::size_t slot(NodeId a, NodeId b) const;
    void link(NodeId a, NodeId b);
    void unlink(NodeId a, NodeId b);

    int node_count_ = 0;
    std::size_t edge_count_ = 0;
    std::size_t directed_count_ = 0;
    std::vector<Mark> marks_;  // strict upper triangle, row-major
    std::vector<std::vector<NodeId>> adjacency_;
};

/// Center `z`; `x < y` for unshielded triples listed by unshielded_triples().
struct Triple {
    NodeId x = 0;
    NodeId z = 0;
    NodeId y = 0;
    bool shielded = false;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// True iff a path x ... y exists whose directed edges all point forward and which contains
/// at least one directed edge. Purely undirected paths do not qualify.
bool has_semi_directed_path(const Pdag& p, NodeId x, NodeId y);

/// Same search, returning the node sequence of one shortest such path.
std::optional<std::vector<NodeId>> find_semi_directed_path(const Pdag& p, NodeId x, NodeId y);

bool has_directed_path(const Pdag& p, NodeId x, NodeId y);

/// Whether turning the undirected pair {x,y} into x -> y closes a directed or
/// semi-directed cycle, i.e. whether y ~> x already holds.
bool orientation_creates_cycle(const Pdag& p, NodeId x, NodeId y);

/// Returns p with x -> y. Throws StateError unless {x,y} is undirected and CycleError if
/// the new arrow closes a (semi-)directed cycle.
Pdag orient(Pdag p, NodeId x, NodeId y);

/// What an in-place orientation must not close. Directed-only is what propagation needs:
/// mid-propagation an undirected edge may still be settled either way, so a semi-directed
/// cycle there is not yet a contradiction.
enum class CycleGuard { SemiDirected, Directed };

/// In-place variant; returns false (leaving p unchanged) when the pair is not undirected or
/// the guard trips. With the default guard this mirrors orient().
bool try_orient(Pdag& p, NodeId x, NodeId y, CycleGuard guard = CycleGuard::SemiDirected);

std::vector<Triple> unshielded_triples(const Pdag& p);

/// Unshielded colliders x -> z <- y of g, with x < y.
std::vector<Triple> v_structures(const Dag& g);

/// d-separation of x and y given s, by reachability (Bayes ball).
bool d_separated(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s);

enum class OnConflict { Throw, Skip };

/// NoR1 keeps only the acyclicity rules R2-R4; R1 is left to Sigma-aware propagation.
enum class MeekRules { All, NoR1 };

/// Closure under Meek's rules R1-R4. Only adds arrowheads. With OnConflict::Throw an
/// orientation that would close a directed cycle, or an edge forced both ways, raises
/// ConflictError; with Skip such edges are left as they are.
Pdag meek_closure(Pdag p, OnConflict on_conflict = OnConflict::Throw, MeekRules rules = MeekRules::All);

/// Completed PDAG (essential graph) of g.
Pdag cpdag_of(const Dag& g);

/// Erdos-Renyi DAG over a uniformly random topological order.
Dag random_dag(int node_count, double edge_probability, Rng& rng);

/// Random DAG with exactly `edge_count` edges (uniform over pairs of a random order).
Dag random_dag_with_edges(int node_count, int edge_count, Rng& rng);

std::string to_string(EdgeKind kind);

}  // namespace mosacd
