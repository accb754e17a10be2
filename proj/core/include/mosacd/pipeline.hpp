#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mosacd/citest.hpp"
#include "mosacd/expert.hpp"
#include "mosacd/metadata.hpp"
#include "mosacd/orient.hpp"
#include "mosacd/skeleton.hpp"

namespace mosacd {

/// Wraps (via std::throw_with_nested) whatever failed inside a pipeline stage.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    SkeletonConfig skeleton;
    SeedingConfig seeding;
    OrientConfig orient;
};

struct RunReport {
    std::size_t ci_tests = 0;
    std::size_t seeds = 0;
    std::size_t seeds_true = 0;   // only with a known truth
    std::size_t seeds_false = 0;  // only with a known truth
    std::size_t abstained = 0;
    std::size_t rejected = 0;
    std::size_t query_errors = 0;
    int outer_iterations = 0;
    int step4_orientations = 0;
    std::vector<std::string> conflicts;
};

struct RunResult {
    Skeleton skeleton;
    SeedSet seeds;
    Pdag seeded;  // P after Step 2
    OrientResult orientation;
    RunReport report;
};

/// Algorithm 1 end to end. A null backend skips Step 2. `truth`, when given, only feeds the
/// seed tallies of the report.
RunResult run_mosacd(const CiTest& ci, std::span<const std::string> names, const Metadata& meta,
                     ExpertBackend* backend, const PipelineConfig& config, const Dag* truth = nullptr,
                     TranscriptLog* log = nullptr);

/// Steps 3-5 on an existing skeleton and Sigma with the given seeds inserted up front.
/// Seeds are inserted in order; with `validate` those failing validate_seed are dropped.
RunResult run_from_skeleton(const Skeleton& skeleton, std::span<const Edge> seeds, bool validate,
                            const OrientConfig& config);

/// Report as JSON: {seeds:{true,false,abstain,...}, iterations, conflicts, final_graph, config_echo}.
std::string report_to_json(const RunResult& result, std::span<const std::string> names,
                           const std::string& config_echo_json);

}  // namespace mosacd
