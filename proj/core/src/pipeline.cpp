#include "mosacd/pipeline.hpp"

#include <exception>
#include <nlohmann/json.hpp>

#include "mosacd/graph_io.hpp"

namespace mosacd {

namespace {

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        std::throw_with_nested(StageError(name, e.what()));
    }
}

void fill_orientation_report(RunResult& r) {
    r.report.outer_iterations = r.orientation.outer_iterations;
    r.report.step4_orientations = r.orientation.log.step4_orientations;
    r.report.conflicts = r.orientation.log.conflicts;
}

}  // namespace

RunResult run_mosacd(const CiTest& ci, std::span<const std::string> names, const Metadata& meta,
                     ExpertBackend* backend, const PipelineConfig& config, const Dag* truth, TranscriptLog* log) {
    RunResult r;
    r.skeleton = stage("skeleton", [&] { return skel_search(ci, config.skeleton); });
    r.report.ci_tests = r.skeleton.tests;
    r.seeded = r.skeleton.graph;
    if (backend) {
        r.seeds = stage("seeding", [&] {
            return run_seeding(r.seeded, r.skeleton.sepsets, names, meta, *backend, config.seeding, log);
        });
    }
    r.report.seeds = r.seeds.seeds.size();
    r.report.abstained = r.seeds.abstained;
    r.report.rejected = r.seeds.rejected.size();
    r.report.query_errors = r.seeds.errors.size();
    if (truth)
        for (const Seed& s : r.seeds.seeds) (truth->has_edge(s.edge.from, s.edge.to) ? r.report.seeds_true : r.report.seeds_false)++;
    r.orientation = stage("orientation", [&] {
        return orient_pdag(r.seeded, r.skeleton.sepsets, r.seeds.votes, config.orient);
    });
    fill_orientation_report(r);
    return r;
}

RunResult run_from_skeleton(const Skeleton& skeleton, std::span<const Edge> seeds, bool validate,
                            const OrientConfig& config) {
    RunResult r;
    r.skeleton = skeleton;
    r.seeded = skeleton.graph;
    std::vector<Seed> candidates;
    for (const Edge& e : seeds) candidates.push_back({e, 0});
    auto applied = apply_seeds(r.seeded, skeleton.sepsets, candidates, validate);
    r.seeds.seeds = std::move(applied.accepted);
    r.seeds.rejected = std::move(applied.rejected);
    r.report.seeds = r.seeds.seeds.size();
    r.report.rejected = r.seeds.rejected.size();
    r.orientation = orient_pdag(r.seeded, skeleton.sepsets, {}, config);
    fill_orientation_report(r);
    return r;
}

std::string report_to_json(const RunResult& result, std::span<const std::string> names,
                           const std::string& config_echo_json) {
    const RunReport& rep = result.report;
    nlohmann::json doc;
    doc["seeds"] = {{"accepted", rep.seeds},   {"true", rep.seeds_true},   {"false", rep.seeds_false},
                    {"abstain", rep.abstained}, {"rejected", rep.rejected}, {"query_errors", rep.query_errors}};
    doc["ci_tests"] = rep.ci_tests;
    doc["iterations"] = rep.outer_iterations;
    doc["step4_orientations"] = rep.step4_orientations;
    doc["conflicts"] = rep.conflicts;
    const Pdag& final_pdag = result.orientation.completed ? Pdag::from_dag(result.orientation.dag) : result.orientation.pdag;
    doc["final_graph"] = to_json(final_pdag, names);
    doc["f1_undirected_policy"] = "undirected edges count as false negatives only";
    doc["config_echo"] = config_echo_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(config_echo_json);
    return doc.dump(2);
}

}  // namespace mosacd
