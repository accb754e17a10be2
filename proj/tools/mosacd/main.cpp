#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mosacd/error.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kBackend = 3, kInternal = 4 };

/// Exit code for the innermost exception of a (possibly nested) chain.
int classify(const std::exception& e) {
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        return classify(inner);
    }
    if (dynamic_cast<const mosacd::cli::UsageError*>(&e)) return kUsage;
    if (dynamic_cast<const mosacd::BackendError*>(&e)) return kBackend;
    if (dynamic_cast<const mosacd::InputError*>(&e) || dynamic_cast<const mosacd::ParseError*>(&e) ||
        dynamic_cast<const mosacd::DegenerateTestError*>(&e) || dynamic_cast<const mosacd::TemplateError*>(&e) ||
        dynamic_cast<const std::ios_base::failure*>(&e))
        return kData;
    return kInternal;
}

void print_chain(const std::exception& e, int depth = 0) {
    std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
    try {
        std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
        print_chain(inner, depth + 1);
    }
}

void add_run_options(CLI::App* cmd, mosacd::cli::RunConfig& c) {
    cmd->add_option("--network", c.network, "Bayesian network (.bif); sampled from and used as truth");
    cmd->add_option("--data", c.data, "Categorical CSV with a header row (instead of sampling)");
    cmd->add_option("--metadata", c.metadata, "Variable descriptions (.json)");
    cmd->add_option("--samples", c.samples, "Rows to sample from --network")->capture_default_str();
    cmd->add_option("--ci", c.ci, "CI test: g2, oracle or noisy (oracle ones need --network)")->capture_default_str();
    cmd->add_option("--noise-alpha", c.noise_alpha, "Noisy oracle false-dependence rate")->capture_default_str();
    cmd->add_option("--noise-beta", c.noise_beta, "Noisy oracle false-independence rate")->capture_default_str();
    cmd->add_option("--skeleton", c.skeleton, "pc, pc-stable or cpc")->capture_default_str();
    cmd->add_option("--threshold", c.threshold, "CI acceptance threshold (independent when p > threshold)")
        ->capture_default_str();
    cmd->add_option("--max-level", c.max_level, "Largest conditioning set size")->capture_default_str();
    cmd->add_option("--expert", c.expert,
                    "none | scripted:truth[,abstain=,error=,seed=] | scripted:first | replay:<jsonl> | "
                    "llm[:url=,path=,model=,temperature=,retries=,timeout=,key_env=]")
        ->capture_default_str();
    cmd->add_option("--repeats", c.repeats, "Queries per answer order")->capture_default_str();
    cmd->add_flag("--no-shuffle", c.no_shuffle, "Ask in one answer order only (disables the positional-bias filter)");
    cmd->add_flag("--no-validate", c.no_validate, "Keep seeds that contradict the separating sets");
    cmd->add_option("--seed", c.seed, "RNG seed for sampling and tie-breaking")->capture_default_str();
    cmd->add_flag("--step5", c.step5, "Complete the remaining undirected edges from the votes");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mosacd::cli;
    CLI::App app{"MosaCD causal discovery: PC-family skeletons, expert seeding and conflict-aware orientation"};
    app.set_config("--config", "", "TOML/INI file with defaults; command-line flags take precedence");
    app.require_subcommand(1);
    int jobs = 4;
    app.add_option("--jobs", jobs, "Upper bound on worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    RunConfig discover_cfg, skeleton_cfg, seed_cfg;
    auto* discover = app.add_subcommand("discover", "Run the full pipeline and write graph, report and transcripts");
    add_run_options(discover, discover_cfg);
    auto* skeleton = app.add_subcommand("skeleton", "Skeleton search only; writes the skeleton and separating sets");
    add_run_options(skeleton, skeleton_cfg);
    auto* seed = app.add_subcommand("seed", "Skeleton plus expert seeding; writes the seeds and transcripts");
    add_run_options(seed, seed_cfg);

    auto* theory = app.add_subcommand("theory", "Closed-form and simulated error rates of the orientation rules");
    theory->require_subcommand(1);
    RatiosOptions ratios_opt;
    auto* ratios = theory->add_subcommand("ratios", "Wrong-orientation odds R per level");
    ratios->add_option("--M", ratios_opt.M, "Candidate conditioning variables")->capture_default_str();
    ratios->add_option("--l", ratios_opt.levels, "Levels, e.g. 1..4 or 1,3")->capture_default_str();
    ratios->add_option("--alpha", ratios_opt.alpha)->capture_default_str();
    ratios->add_option("--beta", ratios_opt.beta)->capture_default_str();
    ratios->add_option("--out", ratios_opt.out, "CSV path (default stdout)");

    FprOptions fpr_opt;
    auto* fpr = theory->add_subcommand("fpr-table", "Expected false positive rates per network");
    fpr->add_option("--alpha", fpr_opt.alpha)->capture_default_str();
    fpr->add_option("--beta", fpr_opt.beta)->capture_default_str();
    fpr->add_option("--lmax", fpr_opt.lmax, "Largest level searched")->capture_default_str();
    fpr->add_option("--networks", fpr_opt.networks, "CSV name,nodes,arcs")->required()->check(CLI::ExistingFile);
    fpr->add_option("--out", fpr_opt.out, "CSV path (default stdout)");

    SimulateOptions sim_opt;
    auto* sim = theory->add_subcommand("simulate", "Monte Carlo check of the level error rates");
    sim->add_option("--trials", sim_opt.trials, "Trials per truth (1e6 notation accepted)")->capture_default_str();
    sim->add_option("--M", sim_opt.M)->capture_default_str();
    sim->add_option("--l", sim_opt.level)->capture_default_str();
    sim->add_option("--alpha", sim_opt.alpha)->capture_default_str();
    sim->add_option("--beta", sim_opt.beta)->capture_default_str();
    sim->add_option("--seed", sim_opt.seed)->capture_default_str();
    sim->add_option("--out", sim_opt.out, "CSV path (default stdout)");

    SampleOptions sample_opt;
    auto* sample = app.add_subcommand("sample", "Forward-sample a network to CSV");
    sample->add_option("--network", sample_opt.network)->required()->check(CLI::ExistingFile);
    sample->add_option("--samples", sample_opt.samples)->capture_default_str();
    sample->add_option("--seed", sample_opt.seed)->capture_default_str();
    sample->add_option("--out", sample_opt.out, "CSV path (default stdout)");

    EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Orientation precision, recall and F1 of a graph against a truth");
    eval->add_option("--pred", eval_opt.pred, "graph.json from discover")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", eval_opt.truth, ".bif or graph JSON with every edge directed")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_flag("--strict", eval_opt.strict, "Count undirected predictions as false positives too");
    eval->add_flag("--cpdag-target", eval_opt.cpdag_target, "Score against the truth's CPDAG");

    AblateOptions ablate_opt;
    auto* ablate = app.add_subcommand("ablate", "Paired MosaCD vs Meek-baseline trials over a parameter grid");
    ablate->add_option("--vary", ablate_opt.vary, "true_seeds, false_seed_fraction, mask_fraction or sample_size")
        ->capture_default_str();
    ablate->add_option("--grid", ablate_opt.grid, "Comma-separated values")->capture_default_str();
    ablate->add_option("--trials", ablate_opt.trials)->capture_default_str();
    ablate->add_option("--seed", ablate_opt.seed)->capture_default_str();
    ablate->add_option("--nodes", ablate_opt.nodes)->capture_default_str();
    ablate->add_option("--edge-probability", ablate_opt.edge_probability)->capture_default_str();
    ablate->add_option("--noise-alpha", ablate_opt.alpha)->capture_default_str();
    ablate->add_option("--noise-beta", ablate_opt.beta)->capture_default_str();
    ablate->add_option("--skeleton", ablate_opt.skeleton)->capture_default_str();
    ablate->add_option("--out", ablate_opt.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        for (RunConfig* c : {&discover_cfg, &skeleton_cfg, &seed_cfg}) c->jobs = jobs;
        if (discover->parsed()) return cmd_discover(discover_cfg);
        if (skeleton->parsed()) return cmd_skeleton(skeleton_cfg);
        if (seed->parsed()) return cmd_seed(seed_cfg);
        if (ratios->parsed()) return cmd_theory_ratios(ratios_opt);
        if (fpr->parsed()) return cmd_theory_fpr(fpr_opt);
        if (sim->parsed()) return cmd_theory_simulate(sim_opt);
        if (sample->parsed()) return cmd_sample(sample_opt);
        if (eval->parsed()) return cmd_eval(eval_opt);
        if (ablate->parsed()) return cmd_ablate(ablate_opt);
    } catch (const std::exception& e) {
        print_chain(e);
        return classify(e);
    }
    return kUsage;
}
