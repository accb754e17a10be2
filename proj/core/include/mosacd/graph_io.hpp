#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mosacd/graph.hpp"

namespace mosacd {

/// Node display names; falls back to decimal ids when `names` is empty.
std::vector<std::string> resolve_names(int node_count, std::span<const std::string> names);

/// One edge per line, `a -> b` or `a -- b`, directed edges first, each block sorted by id.
std::string to_text(const Pdag& p, std::span<const std::string> names = {});

/// Inverse of to_text; every name must appear in `names`. Blank lines and `#` comments skipped.
Pdag pdag_from_text(std::string_view text, std::span<const std::string> names);

std::string to_dot(const Pdag& p, std::span<const std::string> names = {});

/// {"nodes": [...], "directed": [[a,b],...], "undirected": [[a,b],...]} with names as strings.
nlohmann::json to_json(const Pdag& p, std::span<const std::string> names = {});

struct NamedPdag {
    std::vector<std::string> names;
    Pdag graph;
};

NamedPdag pdag_from_json(const nlohmann::json& j);

}  // namespace mosacd
