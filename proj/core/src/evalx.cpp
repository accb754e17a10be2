#include "mosacd/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "mosacd/bayes_net.hpp"
#include "mosacd/citest.hpp"
#include "mosacd/error.hpp"
#include "mosacd/metadata.hpp"
#include "mosacd/pipeline.hpp"

namespace mosacd {

namespace {

EvalReport score(const std::set<Edge>& predicted, const std::vector<NodePair>& undirected, const std::set<Edge>& target,
                 const F1Options& options) {
    EvalReport r;
    for (const Edge& e : predicted) (target.count(e) ? r.tp : r.fp)++;
    r.fn = static_cast<int>(target.size()) - r.tp;
    if (options.strict) r.fp += static_cast<int>(undirected.size());
    r.precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

std::set<Edge> target_edges(const Dag& truth, const F1Options& options) {
    if (!options.cpdag_target) {
        const auto e = truth.edges();
        return {e.begin(), e.end()};
    }
    const auto e = cpdag_of(truth).directed_edges();
    return {e.begin(), e.end()};
}

}  // namespace

EvalReport orientation_f1(const Pdag& pred, const Dag& truth, const F1Options& options) {
    if (pred.node_count() != truth.node_count()) throw InputError("prediction and truth have different node sets");
    const auto d = pred.directed_edges();
    return score({d.begin(), d.end()}, pred.undirected_edges(), target_edges(truth, options), options);
}

EvalReport orientation_f1(const Dag& pred, const Dag& truth, const F1Options& options) {
    return orientation_f1(Pdag::from_dag(pred), truth, options);
}

SeedTally seed_accuracy(std::span<const Edge> seeds, const Dag& truth) {
    SeedTally t;
    for (const Edge& e : seeds) (truth.has_edge(e.from, e.to) ? t.true_count : t.false_count)++;
    return t;
}

SeedTally seed_accuracy(const SeedSet& seeds, const Dag& truth) {
    std::vector<Edge> edges;
    for (const Seed& s : seeds.seeds) edges.push_back(s.edge);
    return seed_accuracy(edges, truth);
}

std::string UninformedGuessExpert::query(const ExpertRequest& request) {
    auto masked = [&](NodeId v) {
        if (v < 0 || v >= static_cast<int>(names_.size())) return false;
        const std::string needle = "- " + names_[v] + ": " + std::string(kUninformativeDescription);
        return request.prompt.find(needle) != std::string::npos;
    };
    if (masked(request.u) || masked(request.v)) return "Final choice: <Answer>B</Answer>";
    return inner_->query(request);
}

TrialInstance make_instance(const TrialSetup& setup, Rng& rng) {
    TrialInstance inst;
    inst.truth = random_dag(setup.nodes, setup.edge_probability, rng);
    for (int i = 0; i < setup.nodes; ++i) inst.names.push_back("X" + std::to_string(i));
    if (setup.sample_size) {
        const BayesNet net = random_bayes_net(inst.truth, 2, 3, 1.0, rng);
        const Dataset data = forward_sample(net, *setup.sample_size, rng);
        inst.skeleton = skel_search(G2Test(data), setup.skeleton);
    } else {
        const NoiseParams noise{setup.alpha, setup.beta, rng()};
        inst.skeleton = skel_search(NoisyOracleTest(inst.truth, noise), setup.skeleton);
    }
    return inst;
}

Pdag meek_with_seeds(const TrialInstance& inst, std::span<const Edge> seeds) {
    Pdag p = inst.skeleton.graph;
    for (const Edge& e : seeds) try_orient(p, e.from, e.to, CycleGuard::Directed);
    return baseline_orient(std::move(p), inst.skeleton.sepsets);
}

Pdag mosacd_with_seeds(const TrialInstance& inst, std::span<const Edge> seeds, const OrientConfig& config) {
    return run_from_skeleton(inst.skeleton, seeds, true, config).orientation.pdag;
}

std::pair<Pdag, SeedSet> mosacd_with_expert(const TrialInstance& inst, ExpertBackend& backend, const Metadata& meta,
                                            const SeedingConfig& seeding, const OrientConfig& config) {
    Pdag p = inst.skeleton.graph;
    SeedSet seeds = run_seeding(p, inst.skeleton.sepsets, inst.names, meta, backend, seeding);
    auto result = orient_pdag(std::move(p), inst.skeleton.sepsets, seeds.votes, config);
    return {std::move(result.pdag), std::move(seeds)};
}

std::optional<std::vector<Edge>> sample_seeds(const TrialInstance& inst, int true_count, int false_count, Rng& rng) {
    std::vector<Edge> pool;
    for (const Edge& e : inst.truth.edges())
        if (inst.skeleton.graph.adjacent(e.from, e.to)) pool.push_back(e);
    if (true_count < 0 || false_count < 0 || true_count + false_count > static_cast<int>(pool.size()))
        return std::nullopt;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<Edge> out(pool.begin(), pool.begin() + true_count);
    for (int i = 0; i < false_count; ++i) {
        const Edge e = pool[true_count + i];
        out.push_back({e.to, e.from});
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::string to_string(AblationAxis axis) {
    switch (axis) {
        case AblationAxis::TrueSeeds: return "true_seeds";
        case AblationAxis::FalseSeedFraction: return "false_seed_fraction";
        case AblationAxis::MaskFraction: return "mask_fraction";
        case AblationAxis::SampleSize: return "sample_size";
    }
    return "?";
}

AblationAxis parse_ablation_axis(std::string_view text) {
    for (auto a : {AblationAxis::TrueSeeds, AblationAxis::FalseSeedFraction, AblationAxis::MaskFraction,
                   AblationAxis::SampleSize})
        if (text == to_string(a)) return a;
    throw InputError("unknown ablation axis '" + std::string(text) + "'");
}

namespace {

struct Accumulator {
    std::vector<EvalReport> reports;
    int skipped = 0;

    AblationRow row(const std::string& axis, double value, const std::string& method) const {
        AblationRow r{axis, value, method, static_cast<int>(reports.size()), skipped};
        if (reports.empty()) return r;
        double sum = 0, sq = 0, p = 0, rc = 0;
        for (const auto& e : reports) {
            sum += e.f1;
            sq += e.f1 * e.f1;
            p += e.precision;
            rc += e.recall;
        }
        const double n = static_cast<double>(reports.size());
        r.mean_f1 = sum / n;
        r.mean_precision = p / n;
        r.mean_recall = rc / n;
        const double var = n > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1)) : 0.0;
        r.stderr_f1 = std::sqrt(var / n);
        return r;
    }
};

}  // namespace

std::vector<AblationRow> run_ablation(const AblationConfig& config, std::ostream* notices) {
    if (config.trials < 1) throw InputError("trials must be >= 1");
    if (config.grid.empty()) throw InputError("ablation grid is empty");
    const std::string axis = to_string(config.vary);
    std::vector<AblationRow> rows;
    for (std::size_t g = 0; g < config.grid.size(); ++g) {
        const double value = config.grid[g];
        Accumulator mosacd, meek;
        for (int t = 0; t < config.trials; ++t) {
            // Same trial seed across grid points: paired designs see identical graphs.
            Rng rng(hash_combine(config.seed, static_cast<std::uint64_t>(t)));
            TrialSetup setup = config.setup;
            if (config.vary == AblationAxis::SampleSize) {
                if (value < 1) throw InputError("sample size must be >= 1");
                setup.sample_size = static_cast<std::size_t>(value);
            }
            const TrialInstance inst = make_instance(setup, rng);
            const OrientConfig orient{hash_combine(config.seed, 0x5eed + t), false, 100};

            if (config.vary == AblationAxis::TrueSeeds || config.vary == AblationAxis::FalseSeedFraction) {
                int n_true = 0, n_false = 0;
                if (config.vary == AblationAxis::TrueSeeds) {
                    n_true = static_cast<int>(value);
                } else {
                    if (value < 0 || value > 1) throw InputError("false seed fraction must lie in [0,1]");
                    int available = 0;
                    for (const Edge& e : inst.truth.edges()) available += inst.skeleton.graph.adjacent(e.from, e.to);
                    const int total = std::min(config.total_seeds, available);
                    n_false = static_cast<int>(std::lround(value * total));
                    n_true = total - n_false;
                }
                const auto seeds = sample_seeds(inst, n_true, n_false, rng);
                if (!seeds) {
                    ++mosacd.skipped;
                    ++meek.skipped;
                    if (notices)
                        *notices << "skipping " << axis << "=" << value << " trial " << t
                                 << ": not enough true edges in the skeleton\n";
                    continue;
                }
                mosacd.reports.push_back(orientation_f1(mosacd_with_seeds(inst, *seeds, orient), inst.truth));
                meek.reports.push_back(orientation_f1(meek_with_seeds(inst, *seeds), inst.truth));
                continue;
            }

            GroundTruthExpert truth_expert(inst.truth, {config.expert_abstain, 0.0, rng()});
            Metadata meta = blank_metadata({}, "Simulated data");
            for (const auto& n : inst.names) meta.descriptions[n] = "Variable " + n + " of the simulated system.";
            SeedingConfig seeding;
            seeding.vote.repeats = config.repeats;
            seeding.concurrency = 1;
            std::pair<Pdag, SeedSet> out;
            if (config.vary == AblationAxis::MaskFraction) {
                meta = mask_descriptions(meta, inst.names, value, rng);
                UninformedGuessExpert expert(truth_expert);
                expert.set_names(inst.names);
                out = mosacd_with_expert(inst, expert, meta, seeding, orient);
            } else {
                out = mosacd_with_expert(inst, truth_expert, meta, seeding, orient);
            }
            EvalReport rep = orientation_f1(out.first, inst.truth);
            const auto tally = seed_accuracy(out.second, inst.truth);
            rep.seed_true = tally.true_count;
            rep.seed_false = tally.false_count;
            rep.seed_abstain = static_cast<int>(out.second.abstained);
            mosacd.reports.push_back(rep);
            meek.reports.push_back(orientation_f1(meek_with_seeds(inst, {}), inst.truth));
        }
        rows.push_back(mosacd.row(axis, value, "mosacd"));
        rows.push_back(meek.row(axis, value, "meek"));
    }
    return rows;
}

void write_ablation_csv(std::ostream& out, const AblationConfig& config, const std::vector<AblationRow>& rows) {
    out << "# f1 policy: " << kF1Policy << "\n";
    out << "axis,value,method,trials,skipped,mean_f1,stderr_f1,mean_precision,mean_recall,"
           "nodes,edge_probability,alpha,beta,skeleton,threshold,seed\n";
    for (const auto& r : rows) {
        out << r.axis << ',' << r.value << ',' << r.method << ',' << r.trials << ',' << r.skipped << ',' << r.mean_f1
            << ',' << r.stderr_f1 << ',' << r.mean_precision << ',' << r.mean_recall << ',' << config.setup.nodes << ','
            << config.setup.edge_probability << ',' << config.setup.alpha << ',' << config.setup.beta << ','
            << to_string(config.setup.skeleton.variant) << ',' << config.setup.skeleton.threshold << ','
            << config.seed << '\n';
    }
}

}  // namespace mosacd
