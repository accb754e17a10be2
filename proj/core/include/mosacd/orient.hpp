#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mosacd/expert.hpp"
#include "mosacd/graph.hpp"
#include "mosacd/rng.hpp"
#include "mosacd/skeleton.hpp"

namespace mosacd {

struct TraceEvent {
    std::string stage;  // "r2", "r3r4", "ci", "collider", "least-conflict"
    Triple triple;      // for least-conflict: x -> y stored as (x, x, y)
    double max_p = 0.0;
    std::string action;
};

/// Optional sink for what the engine did; conflicts are the logged cycle-guard skips.
struct OrientLog {
    bool record_trace = false;
    std::vector<TraceEvent> trace;
    std::vector<std::string> conflicts;
    int step4_orientations = 0;

    void event(const char* stage, Triple t, double p, std::string action) {
        if (record_trace) trace.push_back({stage, t, p, std::move(action)});
    }
};

enum class Reach { SemiDirected, Directed };

/// Orients x -> y for every undirected pair with a semi-directed (or, with Reach::Directed,
/// directed) path x ~> y, to a fixpoint. Paths both ways raise ConflictError under
/// OnConflict::Throw, or are logged and skipped.
///
/// The semi-directed form can run through an undirected edge that later evidence orients the
/// other way, so step3_fixpoint uses Reach::Directed together with Meek's R3 and R4.
Pdag r2_propagate(Pdag p, OnConflict on_conflict = OnConflict::Throw, OrientLog* log = nullptr,
                  Reach reach = Reach::SemiDirected);

/// One pass over triples x -> z - y (x, y non-adjacent) by descending max p of Sigma(x,y):
/// z in every sepset gives z -> y, z in none gives y -> z, anything else is deferred.
Pdag ci_supervised(Pdag p, const SepsetRecord& sigma, OrientLog* log = nullptr);

/// One pass over triples x - z - y by descending max p: z in no sepset gives x -> z <- y,
/// both arrows or neither.
Pdag collider_orient(Pdag p, const SepsetRecord& sigma, OrientLog* log = nullptr);

/// Inner loop {directed r2_propagate; ci_supervised; collider_orient} until nothing changes,
/// then Meek's R3/R4; repeated until those add nothing either.
Pdag step3_fixpoint(Pdag p, const SepsetRecord& sigma, OrientLog* log = nullptr, int max_iterations = 1000);

struct Violation {
    NodePair pair;
    SepsetEntry statement;
    std::string reason;
};

struct ConflictReport {
    static constexpr int kInfeasible = std::numeric_limits<int>::max();
    int count = 0;  // kInfeasible when the candidate closes a cycle
    std::vector<Violation> violations;
};

/// Applies `candidate`, closes under Meek's rules and counts Sigma statements (x _||_ y | S)
/// contradicted by the result: an unshielded x - z - y that is a collider while z is in every
/// sepset of the pair, or a definite non-collider while z is in none; or a directed path
/// between x and y with no intermediate node in S.
ConflictReport conflict_count(const Pdag& p, const SepsetRecord& sigma, Edge candidate);

/// Step 4: visits undirected edges in shuffled order and orients the strictly less conflicting
/// direction; ties stay undirected.
Pdag least_conflict(Pdag p, const SepsetRecord& sigma, Rng& rng, OrientLog* log = nullptr);

/// Step 5: net vote support as a weighted digraph (p's arrows are hard), weakest soft edge
/// inside a cycle removed one at a time, then a topological order (ties by node id) orients
/// what is left.
Dag step5_vote_completion(const Pdag& p, std::span<const VoteRecord> votes);

/// Topological order used by step5_vote_completion; exposed for inspection.
std::vector<NodeId> vote_order(const Pdag& p, std::span<const VoteRecord> votes);

struct OrientConfig {
    std::uint64_t rng_seed = 0;
    bool enable_step5 = false;
    int max_outer_iterations = 100;
};

struct OrientResult {
    Pdag pdag;
    Dag dag;          // populated when step 5 ran
    bool completed = false;
    int outer_iterations = 0;
    OrientLog log;
};

/// Steps 3-4 repeated to convergence from a seeded PDAG, then the optional Step 5.
OrientResult orient_pdag(Pdag seeded, const SepsetRecord& sigma, std::span<const VoteRecord> votes,
                         const OrientConfig& config, bool record_trace = false);

/// Classic orientation: colliders where the center is in no sepset (cycle-guarded), then
/// Meek closure. Arrows already in p are kept.
Pdag baseline_orient(Pdag p, const SepsetRecord& sigma);

}  // namespace mosacd
