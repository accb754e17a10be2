#include "mosacd/graph_io.hpp"

#include <sstream>
#include <unordered_map>

#include "mosacd/error.hpp"

namespace mosacd {

namespace {

std::unordered_map<std::string, NodeId> index_names(std::span<const std::string> names) {
    std::unordered_map<std::string, NodeId> index;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (!index.emplace(names[i], static_cast<NodeId>(i)).second)
            throw InputError("duplicate node name '" + names[i] + "'");
    return index;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::vector<std::string> resolve_names(int node_count, std::span<const std::string> names) {
    if (!names.empty()) {
        if (static_cast<int>(names.size()) != node_count)
            throw InputError("name table has " + std::to_string(names.size()) + " entries for " +
                             std::to_string(node_count) + " nodes");
        return {names.begin(), names.end()};
    }
    std::vector<std::string> out;
    for (int i = 0; i < node_count; ++i) out.push_back(std::to_string(i));
    return out;
}

std::string to_text(const Pdag& p, std::span<const std::string> names) {
    const auto n = resolve_names(p.node_count(), names);
    std::ostringstream out;
    for (const Edge& e : p.directed_edges()) out << n[e.from] << " -> " << n[e.to] << '\n';
    for (const NodePair& e : p.undirected_edges()) out << n[e.first] << " -- " << n[e.second] << '\n';
    return out.str();
}

Pdag pdag_from_text(std::string_view text, std::span<const std::string> names) {
    const auto index = index_names(names);
    Pdag p(static_cast<int>(names.size()));
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t pos = t.find(" -> ");
        bool directed = true;
        if (pos == std::string::npos) {
            pos = t.find(" -- ");
            directed = false;
        }
        if (pos == std::string::npos) throw ParseError("expected 'a -> b' or 'a -- b'", line_no, 1);
        const std::string a = trim(t.substr(0, pos));
        const std::string b = trim(t.substr(pos + 4));
        auto ia = index.find(a);
        auto ib = index.find(b);
        if (ia == index.end()) throw ParseError("unknown node '" + a + "'", line_no, 1);
        if (ib == index.end()) throw ParseError("unknown node '" + b + "'", line_no, static_cast<int>(pos) + 5);
        if (directed)
            p.add_directed(ia->second, ib->second);
        else
            p.add_undirected(ia->second, ib->second);
    }
    return p;
}

std::string to_dot(const Pdag& p, std::span<const std::string> names) {
    const auto n = resolve_names(p.node_count(), names);
    std::ostringstream out;
    out << "digraph G {\n";
    for (const auto& name : n) out << "  " << dot_quote(name) << ";\n";
    for (const Edge& e : p.directed_edges())
        out << "  " << dot_quote(n[e.from]) << " -> " << dot_quote(n[e.to]) << ";\n";
    for (const NodePair& e : p.undirected_edges())
        out << "  " << dot_quote(n[e.first]) << " -> " << dot_quote(n[e.second]) << " [dir=none];\n";
    out << "}\n";
    return out.str();
}

nlohmann::json to_json(const Pdag& p, std::span<const std::string> names) {
    const auto n = resolve_names(p.node_count(), names);
    nlohmann::json j;
    j["nodes"] = n;
    j["directed"] = nlohmann::json::array();
    j["undirected"] = nlohmann::json::array();
    for (const Edge& e : p.directed_edges()) j["directed"].push_back({n[e.from], n[e.to]});
    for (const NodePair& e : p.undirected_edges()) j["undirected"].push_back({n[e.first], n[e.second]});
    return j;
}

NamedPdag pdag_from_json(const nlohmann::json& j) {
    try {
        NamedPdag out;
        out.names = j.at("nodes").get<std::vector<std::string>>();
        const auto index = index_names(out.names);
        out.graph = Pdag(static_cast<int>(out.names.size()));
        auto lookup = [&](const nlohmann::json& v) {
            auto it = index.find(v.get<std::string>());
            if (it == index.end()) throw ParseError("graph JSON references unknown node '" + v.get<std::string>() + "'");
            return it->second;
        };
        for (const auto& e : j.value("directed", nlohmann::json::array()))
            out.graph.add_directed(lookup(e.at(0)), lookup(e.at(1)));
        for (const auto& e : j.value("undirected", nlohmann::json::array()))
            out.graph.add_undirected(lookup(e.at(0)), lookup(e.at(1)));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed graph JSON: ") + e.what());
    }
}

}  // namespace mosacd
