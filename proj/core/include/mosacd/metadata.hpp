#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosacd/rng.hpp"

namespace mosacd {

inline constexpr std::string_view kUninformativeDescription = "No description available for this variable.";

/// Variable names and free-text descriptions handed to the expert.
struct Metadata {
    std::string data_desc;
    std::map<std::string, std::string> descriptions;

    /// Description for `name`, or the uninformative sentinel when none is on file.
    std::string describe(const std::string& name) const;

    /// Names in `variables` that have no description.
    std::vector<std::string> missing(std::span<const std::string> variables) const;

    friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// Reads {data_desc, nodes:{name:{description}}}. Throws ParseError on schema mismatch.
Metadata parse_metadata(std::string_view json_text);
Metadata read_metadata_file(const std::filesystem::path& path);
std::string to_json(const Metadata& meta);

/// Replaces ceil(fraction * |variables|) uniformly chosen descriptions with the sentinel.
Metadata mask_descriptions(const Metadata& meta, std::span<const std::string> variables, double fraction, Rng& rng);

/// Placeholder metadata (every description is the sentinel).
Metadata blank_metadata(std::span<const std::string> variables, std::string data_desc = {});

}  // namespace mosacd
