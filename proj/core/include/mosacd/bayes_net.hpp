#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mosacd/dataset.hpp"
#include "mosacd/graph.hpp"
#include "mosacd/rng.hpp"

namespace mosacd {

struct Variable {
    std::string name;
    std::vector<std::string> states;
    std::vector<NodeId> parents;
    /// One row per parent configuration (mixed radix, last parent varies fastest); each row
    /// holds states.size() probabilities.
    std::vector<double> cpt;

    friend bool operator==(const Variable&, const Variable&) = default;
};

class BayesNet {
public:
    std::string name = "unknown";
    std::vector<Variable> variables;

    int size() const noexcept { return static_cast<int>(variables.size()); }
    int find(std::string_view variable) const;
    std::vector<std::string> names() const;
    std::size_t config_count(NodeId v) const;
    Dag dag() const;

    /// Row-sum, shape and acyclicity checks. Throws ParseError with the offending variable.
    void validate(double row_tolerance = 1e-9) const;

    friend bool operator==(const BayesNet&, const BayesNet&) = default;
};

/// Parses the bnlearn BIF dialect: `network`, `variable ... type discrete [k] { ... };` and
/// `probability ( child | parents ) { table ...; | (config) values; }`. `property` lines are
/// skipped. Errors carry line/column.
BayesNet parse_bif(std::string_view text, double row_tolerance = 1e-9);
BayesNet read_bif_file(const std::filesystem::path& path, double row_tolerance = 1e-9);

/// Serializes in the same dialect (`table` for roots, one row per configuration otherwise).
std::string to_bif(const BayesNet& net);

/// Ancestral sampling; columns in declaration order, levels equal to the state lists.
Dataset forward_sample(const BayesNet& net, std::size_t n, Rng& rng);

/// CPTs drawn from a symmetric Dirichlet(concentration) per row; states named s0, s1, ...
BayesNet random_bayes_net(const Dag& g, int min_states, int max_states, double concentration, Rng& rng);

}  // namespace mosacd
