#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mosacd/expert.hpp"
#include "mosacd/graph.hpp"
#include "mosacd/orient.hpp"
#include "mosacd/skeleton.hpp"

namespace mosacd {

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
    int seed_true = 0;
    int seed_false = 0;
    int seed_abstain = 0;
};

struct F1Options {
    /// Undirected predictions also count as false positives.
    bool strict = false;
    /// Score against the directed edges of the truth's CPDAG instead of the DAG.
    bool cpdag_target = false;
};

inline constexpr const char* kF1Policy = "undirected predicted edges count as false negatives only";

/// Directed-edge precision/recall. Undirected predictions earn nothing and, unless strict,
/// cost nothing beyond the missed truth edge.
EvalReport orientation_f1(const Pdag& pred, const Dag& truth, const F1Options& options = {});
EvalReport orientation_f1(const Dag& pred, const Dag& truth, const F1Options& options = {});

struct SeedTally {
    int true_count = 0;
    int false_count = 0;
};

/// A seed is true iff it is an edge of the truth; reversed or absent pairs are false.
SeedTally seed_accuracy(std::span<const Edge> seeds, const Dag& truth);
SeedTally seed_accuracy(const SeedSet& seeds, const Dag& truth);

/// Stands in for an expert that knows nothing about variables whose description is masked:
/// if the prompt shows the uninformative sentinel for u or v it always answers B (a pure
/// positional guess), otherwise it defers to `inner`.
class UninformedGuessExpert final : public ExpertBackend {
public:
    explicit UninformedGuessExpert(ExpertBackend& inner) : inner_(&inner) {}
    std::string query(const ExpertRequest& request) override;
    std::string describe() const override { return "uninformed-guess(" + inner_->describe() + ")"; }
    void set_names(std::vector<std::string> names) { names_ = std::move(names); }

private:
    ExpertBackend* inner_;
    std::vector<std::string> names_;
};

/// One simulated problem: a random DAG, its CI source and the skeleton found from it.
struct TrialSetup {
    int nodes = 7;
    double edge_probability = 0.4;
    double alpha = 0.05;  // noisy oracle rates (ignored with sample_size)
    double beta = 0.1;
    std::optional<std::size_t> sample_size;  // G^2 on forward samples instead of the oracle
    SkeletonConfig skeleton;
};

struct TrialInstance {
    Dag truth;
    std::vector<std::string> names;
    Skeleton skeleton;
};

TrialInstance make_instance(const TrialSetup& setup, Rng& rng);

/// Skeleton + seeds (cycle-guarded, unvalidated) + v-structures + Meek closure.
Pdag meek_with_seeds(const TrialInstance& inst, std::span<const Edge> seeds);

/// MosaCD Steps 3-4 from the skeleton with the seeds inserted (validated against Sigma).
Pdag mosacd_with_seeds(const TrialInstance& inst, std::span<const Edge> seeds, const OrientConfig& config);

/// MosaCD with a live expert for Step 2; returns the final PDAG and the seeds it used.
std::pair<Pdag, SeedSet> mosacd_with_expert(const TrialInstance& inst, ExpertBackend& backend, const Metadata& meta,
                                            const SeedingConfig& seeding, const OrientConfig& config);

/// k correct seeds drawn from truth edges present in the skeleton, then `false_count` reversed
/// ones from the rest; shuffled. Returns nullopt if the skeleton has too few true edges.
std::optional<std::vector<Edge>> sample_seeds(const TrialInstance& inst, int true_count, int false_count, Rng& rng);

enum class AblationAxis { TrueSeeds, FalseSeedFraction, MaskFraction, SampleSize };

std::string to_string(AblationAxis axis);
AblationAxis parse_ablation_axis(std::string_view text);

struct AblationConfig {
    AblationAxis vary = AblationAxis::TrueSeeds;
    std::vector<double> grid;
    int trials = 10;
    std::uint64_t seed = 0;
    TrialSetup setup;
    int total_seeds = 20;         // FalseSeedFraction: capped by the true edges available
    double expert_abstain = 0.2;  // MaskFraction / SampleSize use a scripted expert
    int repeats = 5;
};

struct AblationRow {
    std::string axis;
    double value = 0.0;
    std::string method;  // "mosacd" or "meek"
    int trials = 0;
    int skipped = 0;
    double mean_f1 = 0.0;
    double stderr_f1 = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

std::vector<AblationRow> run_ablation(const AblationConfig& config, std::ostream* notices = nullptr);

/// CSV with config echo columns and the F1 policy in a leading comment line.
void write_ablation_csv(std::ostream& out, const AblationConfig& config, const std::vector<AblationRow>& rows);

}  // namespace mosacd
