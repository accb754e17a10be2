#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "mosacd/bayes_net.hpp"
#include "mosacd/citest.hpp"
#include "mosacd/dataset.hpp"
#include "mosacd/error.hpp"
#include "mosacd/evalx.hpp"
#include "mosacd/graph_io.hpp"
#include "mosacd/metadata.hpp"
#include "mosacd/pipeline.hpp"
#include "mosacd/theory.hpp"

namespace fs = std::filesystem;

namespace mosacd::cli {

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

/// Opens `path` for writing, or hands back stdout when it is empty.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary);
        if (!file_) throw InputError("cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

/// Loaded inputs shared by discover / skeleton / seed.
struct Inputs {
    std::optional<BayesNet> net;
    std::optional<Dag> truth;
    std::optional<Dataset> data;
    std::vector<std::string> names;
    Metadata meta;
    std::unique_ptr<CiTest> ci;
};

Inputs load_inputs(const RunConfig& c) {
    Inputs in;
    if (!c.network.empty()) {
        in.net = read_bif_file(c.network);
        in.truth = in.net->dag();
        in.names = in.net->names();
    }
    if (!c.data.empty()) {
        Dataset d = read_csv_file(c.data);
        in.data = in.net ? d.select(in.names) : std::move(d);
        if (!in.net) in.names = in.data->names();
    } else if (c.ci == "g2") {
        Rng rng(hash_combine(c.seed, 0x5a3b1e));
        in.data = forward_sample(*in.net, c.samples, rng);
    }
    if (c.ci == "g2")
        in.ci = std::make_unique<G2Test>(*in.data);
    else if (c.ci == "oracle")
        in.ci = std::make_unique<OracleTest>(*in.truth);
    else
        in.ci = std::make_unique<NoisyOracleTest>(*in.truth, NoiseParams{c.noise_alpha, c.noise_beta, c.seed});

    if (!c.metadata.empty()) {
        in.meta = read_metadata_file(c.metadata);
        const auto missing = in.meta.missing(in.names);
        if (!missing.empty()) {
            std::cerr << "warning: metadata is partial; no description for";
            for (const auto& m : missing) std::cerr << ' ' << m;
            std::cerr << '\n';
        }
    } else {
        in.meta = blank_metadata(in.names);
    }
    return in;
}

PipelineConfig pipeline_config(const RunConfig& c) {
    PipelineConfig p;
    p.skeleton.variant = parse_skeleton_variant(c.skeleton);
    p.skeleton.threshold = c.threshold;
    p.skeleton.max_level = c.max_level;
    p.seeding.vote.repeats = c.repeats;
    p.seeding.vote.shuffle = !c.no_shuffle;
    p.seeding.validate = !c.no_validate;
    p.seeding.concurrency = std::max(1, c.jobs);
    p.orient.rng_seed = c.seed;
    p.orient.enable_step5 = c.step5;
    return p;
}

void check(const RunConfig& c) {
    const auto problems = c.problems();
    if (problems.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw UsageError(msg);
}

/// Writes the effective config twice: JSON for tools, TOML that `--config` reads back.
fs::path prepare_out(const RunConfig& c, const std::string& command) {
    fs::path dir(c.out);
    fs::create_directories(dir);
    const nlohmann::json j = c.to_json();
    write_file(dir / "config.json", j.dump(2));
    std::ostringstream toml;
    toml << "[" << command << "]\n";
    for (const auto& [key, value] : j.items()) {
        if (key == "jobs") continue;  // global option, not part of the subcommand section
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        toml << name << " = " << value.dump() << '\n';
    }
    write_file(dir / "config.toml", toml.str());
    return dir;
}

void write_graph(const fs::path& dir, const std::string& stem, const Pdag& g, std::span<const std::string> names) {
    write_file(dir / (stem + ".json"), to_json(g, names).dump(2));
    write_file(dir / (stem + ".dot"), to_dot(g, names));
    write_file(dir / (stem + ".txt"), to_text(g, names));
}

std::unique_ptr<ExpertBackend> backend_for(const RunConfig& c, const Inputs& in) {
    auto backend = make_backend(c.expert, in.truth ? &*in.truth : nullptr);
    if (backend && backend->uses_network()) std::cerr << "note: expert backend " << backend->describe() << " uses the network\n";
    return backend;
}

}  // namespace

std::vector<std::string> RunConfig::problems() const {
    std::vector<std::string> out;
    if (network.empty() && data.empty()) out.push_back("need --network or --data");
    if (!network.empty() && !fs::exists(network)) out.push_back("network file not found: " + network);
    if (!data.empty() && !fs::exists(data)) out.push_back("data file not found: " + data);
    if (!metadata.empty() && !fs::exists(metadata)) out.push_back("metadata file not found: " + metadata);
    if (ci != "g2" && ci != "oracle" && ci != "noisy") out.push_back("--ci must be g2, oracle or noisy");
    if (ci != "g2" && network.empty()) out.push_back("--ci " + ci + " needs --network");
    if (ci == "g2" && data.empty() && samples < 1) out.push_back("--samples must be >= 1");
    if (noise_alpha < 0 || noise_alpha > 1 || noise_beta < 0 || noise_beta > 1)
        out.push_back("noise rates must lie in [0,1]");
    try {
        parse_skeleton_variant(skeleton);
    } catch (const InputError& e) {
        out.push_back(e.what());
    }
    if (!(threshold > 0 && threshold < 1)) out.push_back("--threshold must lie in (0,1)");
    if (max_level < 0) out.push_back("--max-level must be >= 0");
    if (repeats < 1) out.push_back("--repeats must be >= 1");
    if (jobs < 1) out.push_back("--jobs must be >= 1");
    if (expert.rfind("scripted:truth", 0) == 0 && network.empty()) out.push_back("--expert " + expert + " needs --network");
    if (expert.rfind("replay:", 0) == 0 && !fs::exists(expert.substr(7)))
        out.push_back("transcript not found: " + expert.substr(7));
    return out;
}

nlohmann::json RunConfig::to_json() const {
    return {{"network", network},     {"data", data},
            {"metadata", metadata},   {"samples", samples},
            {"ci", ci},               {"noise_alpha", noise_alpha},
            {"noise_beta", noise_beta}, {"skeleton", skeleton},
            {"threshold", threshold}, {"max_level", max_level},
            {"expert", expert},       {"repeats", repeats},
            {"no_shuffle", no_shuffle}, {"no_validate", no_validate},
            {"seed", seed},           {"step5", step5},
            {"out", out},             {"jobs", jobs}};
}

int cmd_discover(const RunConfig& c) {
    check(c);
    Inputs in = load_inputs(c);
    const fs::path dir = prepare_out(c, "discover");
    auto backend = backend_for(c, in);
    std::unique_ptr<TranscriptLog> log;
    if (backend) log = std::make_unique<TranscriptLog>(dir / "transcripts.jsonl");

    const RunResult r = run_mosacd(*in.ci, in.names, in.meta, backend.get(), pipeline_config(c),
                                   in.truth ? &*in.truth : nullptr, log.get());
    const Pdag& final_graph = r.orientation.completed ? Pdag::from_dag(r.orientation.dag) : r.orientation.pdag;
    write_graph(dir, "graph", final_graph, in.names);
    write_file(dir / "report.json", report_to_json(r, in.names, c.to_json().dump()));
    write_file(dir / "seeds.json", seeds_to_json(r.seeds, in.names));
    write_file(dir / "sepsets.json", sepsets_to_json(r.skeleton.sepsets));

    std::cout << "ci tests: " << r.report.ci_tests << "\nseeds: " << r.report.seeds << " (abstained "
              << r.report.abstained << ", rejected " << r.report.rejected << ")\n";
    std::cout << "directed: " << final_graph.directed_count() << " of " << final_graph.edge_count() << " edges\n";
    if (in.truth) {
        const EvalReport e = orientation_f1(final_graph, *in.truth);
        nlohmann::json j = {{"policy", kF1Policy}, {"precision", e.precision}, {"recall", e.recall},
                            {"f1", e.f1},          {"tp", e.tp},               {"fp", e.fp},
                            {"fn", e.fn},          {"seed_true", r.report.seeds_true},
                            {"seed_false", r.report.seeds_false},          {"seed_abstain", r.report.abstained}};
        write_file(dir / "eval.json", j.dump(2));
        std::cout << std::setprecision(4) << "f1 vs truth: " << e.f1 << '\n';
    }
    std::cout << "wrote " << dir.string() << '\n';
    return 0;
}

int cmd_skeleton(const RunConfig& c) {
    check(c);
    Inputs in = load_inputs(c);
    const fs::path dir = prepare_out(c, "skeleton");
    const Skeleton s = skel_search(*in.ci, pipeline_config(c).skeleton);
    write_graph(dir, "skeleton", s.graph, in.names);
    write_file(dir / "sepsets.json", sepsets_to_json(s.sepsets));
    std::cout << "edges: " << s.graph.edge_count() << "\nci tests: " << s.tests << "\nwrote " << dir.string() << '\n';
    return 0;
}

int cmd_seed(const RunConfig& c) {
    check(c);
    Inputs in = load_inputs(c);
    const fs::path dir = prepare_out(c, "seed");
    auto backend = backend_for(c, in);
    if (!backend) throw UsageError("seed needs an --expert other than none");
    TranscriptLog log(dir / "transcripts.jsonl");
    const PipelineConfig pc = pipeline_config(c);
    const Skeleton s = skel_search(*in.ci, pc.skeleton);
    Pdag p = s.graph;
    const SeedSet seeds = run_seeding(p, s.sepsets, in.names, in.meta, *backend, pc.seeding, &log);
    write_graph(dir, "seeded", p, in.names);
    write_file(dir / "seeds.json", seeds_to_json(seeds, in.names));
    write_file(dir / "sepsets.json", sepsets_to_json(s.sepsets));
    std::cout << "seeds: " << seeds.seeds.size() << " (abstained " << seeds.abstained << ", rejected "
              << seeds.rejected.size() << ", errors " << seeds.errors.size() << ")\n";
    if (in.truth) {
        const SeedTally t = seed_accuracy(seeds, *in.truth);
        std::cout << "true " << t.true_count << ", false " << t.false_count << '\n';
    }
    return 0;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    try {
        const auto dots = text.find("..");
        if (dots != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dots));
            const int hi = std::stoi(text.substr(dots + 2));
            if (hi < lo) throw UsageError("empty range " + text);
            for (int i = lo; i <= hi; ++i) out.push_back(i);
            return out;
        }
        for (double d : parse_double_list(text)) {
            if (d != std::floor(d)) throw UsageError("not an integer in list: " + text);
            out.push_back(static_cast<int>(d));
        }
    } catch (const std::logic_error&) {
        throw UsageError("cannot parse integer list '" + text + "'");
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double d = 0;
        try {
            d = std::stod(item, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" ", used) != std::string::npos)
            throw UsageError("cannot parse number '" + item + "' in '" + text + "'");
        out.push_back(d);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

int cmd_theory_ratios(const RatiosOptions& o) {
    Sink sink(o.out);
    std::ostream& out = sink.stream();
    out << "M,l,rule,R,log_R,R_approx,above_one,l_below_half_M\n";
    out << std::setprecision(10);
    for (int l : parse_int_list(o.levels)) {
        const theory::StylizedModel model{o.M, l, o.alpha, o.beta};
        model.validate();
        for (auto rule : {theory::Rule::PC, theory::Rule::CPC}) {
            const auto r = theory::r_ratio(model, rule);
            const auto a = theory::r_ratio_approx(model, rule);
            out << o.M << ',' << l << ',' << theory::to_string(rule) << ',' << r.value << ',' << r.log_value << ','
                << a.value << ',' << (r.log_value > 0 ? "yes" : "no") << ',' << (2 * l < o.M ? "yes" : "no") << '\n';
        }
    }
    return 0;
}

int cmd_theory_fpr(const FprOptions& o) {
    std::ifstream in(o.networks);
    if (!in) throw InputError("cannot open network stats " + o.networks);
    const auto rows = theory::expected_fpr_table(theory::read_network_stats(in), o.lmax, o.alpha, o.beta);
    Sink sink(o.out);
    theory::write_fpr_csv(sink.stream(), rows);
    return 0;
}

int cmd_theory_simulate(const SimulateOptions& o) {
    if (!(o.trials >= 1) || o.trials != std::floor(o.trials)) throw UsageError("--trials must be a positive integer");
    const theory::StylizedModel model{o.M, o.level, o.alpha, o.beta};
    model.validate();
    Sink sink(o.out);
    std::ostream& out = sink.stream();
    out << "M,l,truth,rule,monte_carlo,closed_form,sigma,z,within_3_sigma\n" << std::setprecision(8);
    double mc[2][2] = {};
    double cf[2][2] = {};
    int ti = 0;
    for (auto truth : {theory::Truth::NonCollider, theory::Truth::Collider}) {
        theory::SimulationConfig sc;
        sc.M = o.M;
        sc.start_level = sc.max_level = o.level;
        sc.alpha = o.alpha;
        sc.beta = o.beta;
        sc.truth = truth;
        sc.trials = static_cast<std::uint64_t>(o.trials);
        Rng rng(hash_combine(o.seed, static_cast<std::uint64_t>(ti)));
        const auto res = theory::monte_carlo_stylized(sc, rng);
        int ri = 0;
        for (auto rule : {theory::Rule::PC, theory::Rule::CPC}) {
            const double p = theory::level_error_rate(model, truth, rule);
            const double m = res.error_rate(truth, rule);
            const double sigma = std::sqrt(p * (1 - p) / o.trials);
            const double z = sigma > 0 ? (m - p) / sigma : 0.0;
            out << o.M << ',' << o.level << ',' << theory::to_string(truth) << ',' << theory::to_string(rule) << ','
                << m << ',' << p << ',' << sigma << ',' << z << ',' << (std::abs(z) <= 3 ? "yes" : "no") << '\n';
            mc[ti][ri] = m;
            cf[ti][ri] = p;
            ++ri;
        }
        ++ti;
    }
    std::cerr << std::setprecision(6);
    int ri = 0;
    for (auto rule : {theory::Rule::PC, theory::Rule::CPC}) {
        std::cerr << theory::to_string(rule) << " R: monte carlo " << (mc[1][ri] > 0 ? mc[0][ri] / mc[1][ri] : NAN)
                  << ", closed form " << cf[0][ri] / cf[1][ri] << '\n';
        ++ri;
    }
    return 0;
}

int cmd_sample(const SampleOptions& o) {
    if (o.samples < 1) throw UsageError("--samples must be >= 1");
    const BayesNet net = read_bif_file(o.network);
    Rng rng(hash_combine(o.seed, 0x5a3b1e));
    const Dataset data = forward_sample(net, o.samples, rng);
    Sink sink(o.out);
    write_csv(sink.stream(), data);
    return 0;
}

namespace {

NamedPdag read_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return pdag_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace

int cmd_eval(const EvalOptions& o) {
    const NamedPdag pred = read_graph_json(o.pred);
    Dag truth;
    std::vector<std::string> truth_names;
    if (fs::path(o.truth).extension() == ".bif") {
        const BayesNet net = read_bif_file(o.truth);
        truth = net.dag();
        truth_names = net.names();
    } else {
        const NamedPdag t = read_graph_json(o.truth);
        if (t.graph.directed_count() != t.graph.edge_count()) throw InputError("truth graph has undirected edges");
        const auto edges = t.graph.directed_edges();
        truth = Dag(t.graph.node_count(), edges);
        truth_names = t.names;
    }
    if (truth_names != pred.names) throw InputError("prediction and truth list different nodes");
    const EvalReport e = orientation_f1(pred.graph, truth, {o.strict, o.cpdag_target});
    const nlohmann::json j = {{"policy", o.strict ? "strict: undirected predicted edges count as false positives"
                                                  : kF1Policy},
                              {"target", o.cpdag_target ? "cpdag" : "dag"},
                              {"precision", e.precision},
                              {"recall", e.recall},
                              {"f1", e.f1},
                              {"tp", e.tp},
                              {"fp", e.fp},
                              {"fn", e.fn}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_ablate(const AblateOptions& o) {
    AblationConfig c;
    try {
        c.vary = parse_ablation_axis(o.vary);
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
    c.grid = parse_double_list(o.grid);
    c.trials = o.trials;
    c.seed = o.seed;
    c.setup.nodes = o.nodes;
    c.setup.edge_probability = o.edge_probability;
    c.setup.alpha = o.alpha;
    c.setup.beta = o.beta;
    c.setup.skeleton.variant = parse_skeleton_variant(o.skeleton);
    if (o.nodes < 2 || o.trials < 1 || o.edge_probability < 0 || o.edge_probability > 1)
        throw UsageError("need nodes >= 2, trials >= 1 and edge probability in [0,1]");
    const auto rows = run_ablation(c, &std::cerr);
    Sink sink(o.out);
    write_ablation_csv(sink.stream(), c, rows);
    return 0;
}

}  // namespace mosacd::cli
