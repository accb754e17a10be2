#include "mosacd/metadata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "mosacd/error.hpp"

namespace mosacd {

std::string Metadata::describe(const std::string& name) const {
    auto it = descriptions.find(name);
    return it == descriptions.end() ? std::string(kUninformativeDescription) : it->second;
}

std::vector<std::string> Metadata::missing(std::span<const std::string> variables) const {
    std::vector<std::string> out;
    for (const auto& v : variables)
        if (!descriptions.count(v)) out.push_back(v);
    return out;
}

Metadata parse_metadata(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("metadata: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("metadata: top level must be an object");
    Metadata meta;
    if (auto it = doc.find("data_desc"); it != doc.end()) {
        if (!it->is_string()) throw ParseError("metadata: data_desc must be a string");
        meta.data_desc = it->get<std::string>();
    }
    auto nodes = doc.find("nodes");
    if (nodes == doc.end() || !nodes->is_object()) throw ParseError("metadata: missing 'nodes' object");
    for (const auto& [name, entry] : nodes->items()) {
        if (entry.is_string()) {
            meta.descriptions[name] = entry.get<std::string>();
            continue;
        }
        auto d = entry.find("description");
        if (!entry.is_object() || d == entry.end() || !d->is_string())
            throw ParseError("metadata: node '" + name + "' needs a string 'description'");
        meta.descriptions[name] = d->get<std::string>();
    }
    return meta;
}

Metadata read_metadata_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_metadata(buffer.str());
}

std::string to_json(const Metadata& meta) {
    nlohmann::json doc;
    doc["data_desc"] = meta.data_desc;
    doc["nodes"] = nlohmann::json::object();
    for (const auto& [name, text] : meta.descriptions) doc["nodes"][name] = {{"description", text}};
    return doc.dump(2);
}

Metadata mask_descriptions(const Metadata& meta, std::span<const std::string> variables, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw InputError("mask fraction must lie in [0,1]");
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(variables.size()) - 1e-9));
    std::vector<std::size_t> idx(variables.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    Metadata out = meta;
    for (std::size_t i = 0; i < count; ++i) out.descriptions[variables[idx[i]]] = std::string(kUninformativeDescription);
    return out;
}

Metadata blank_metadata(std::span<const std::string> variables, std::string data_desc) {
    Metadata meta;
    meta.data_desc = std::move(data_desc);
    for (const auto& v : variables) meta.descriptions[v] = std::string(kUninformativeDescription);
    return meta;
}

}  // namespace mosacd
