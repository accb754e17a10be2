#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mosacd::cli {

/// Bad or inconsistent options; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a discover / skeleton / seed run needs. Written back out as config.json.
struct RunConfig {
    std::string network;   // .bif (sampled from, and used as truth)
    std::string data;      // .csv instead of sampling
    std::string metadata;  // .json descriptions
    std::size_t samples = 20000;
    std::string ci = "g2";  // g2 | oracle | noisy
    double noise_alpha = 0.05;
    double noise_beta = 0.1;
    std::string skeleton = "pc";
    double threshold = 0.05;
    int max_level = 3;
    std::string expert = "none";
    int repeats = 5;
    bool no_shuffle = false;
    bool no_validate = false;
    std::uint64_t seed = 0;
    bool step5 = false;
    std::string out = "mosacd-out";
    int jobs = 4;

    /// Every problem found, not just the first.
    std::vector<std::string> problems() const;
    nlohmann::json to_json() const;
};

int cmd_discover(const RunConfig& config);
int cmd_skeleton(const RunConfig& config);
int cmd_seed(const RunConfig& config);

struct RatiosOptions {
    int M = 10;
    std::string levels = "1..4";
    double alpha = 0.05;
    double beta = 0.1;
    std::string out;
};
int cmd_theory_ratios(const RatiosOptions& o);

struct FprOptions {
    double alpha = 0.05;
    double beta = 0.1;
    int lmax = 3;
    std::string networks;
    std::string out;
};
int cmd_theory_fpr(const FprOptions& o);

struct SimulateOptions {
    double trials = 1e6;
    int M = 8;
    int level = 2;
    double alpha = 0.05;
    double beta = 0.1;
    std::uint64_t seed = 0;
    std::string out;
};
int cmd_theory_simulate(const SimulateOptions& o);

struct SampleOptions {
    std::string network;
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    std::string out;
};
int cmd_sample(const SampleOptions& o);

struct EvalOptions {
    std::string pred;   // graph.json
    std::string truth;  // .bif or graph.json (all edges directed)
    bool strict = false;
    bool cpdag_target = false;
};
int cmd_eval(const EvalOptions& o);

struct AblateOptions {
    std::string vary = "true_seeds";
    std::string grid = "0,2,4,6";
    int trials = 10;
    std::uint64_t seed = 0;
    int nodes = 7;
    double edge_probability = 0.4;
    double alpha = 0.05;
    double beta = 0.1;
    std::string skeleton = "pc";
    std::string out;
};
int cmd_ablate(const AblateOptions& o);

/// "1..4" or "1,3,5"; throws UsageError.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace mosacd::cli
