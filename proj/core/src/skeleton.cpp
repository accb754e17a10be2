#include "mosacd/skeleton.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "mosacd/error.hpp"

namespace mosacd {

void SepsetRecord::add(NodeId a, NodeId b, SepsetEntry entry) {
    if (a == b) throw InputError("sepset pair needs two distinct nodes");
    std::sort(entry.set.begin(), entry.set.end());
    for (NodeId v : entry.set)
        if (v == a || v == b) throw InputError("separating set contains an endpoint of its pair");
    entries_[NodePair::of(a, b)].push_back(std::move(entry));
}

std::span<const SepsetEntry> SepsetRecord::find(NodeId a, NodeId b) const {
    auto it = entries_.find(NodePair::of(a, b));
    if (it == entries_.end()) return {};
    return it->second;
}

double SepsetRecord::max_p(NodeId a, NodeId b) const {
    double best = 0.0;
    for (const auto& e : find(a, b)) best = std::max(best, e.p_value);
    return best;
}

Membership SepsetRecord::membership(NodeId a, NodeId b, NodeId z) const {
    const auto list = find(a, b);
    if (list.empty()) return Membership::Unknown;
    std::size_t hits = 0;
    for (const auto& e : list)
        if (std::binary_search(e.set.begin(), e.set.end(), z)) ++hits;
    if (hits == list.size()) return Membership::All;
    if (hits == 0) return Membership::None;
    return Membership::Mixed;
}

std::string to_string(SkeletonVariant v) {
    switch (v) {
        case SkeletonVariant::PC: return "pc";
        case SkeletonVariant::PCStable: return "pc-stable";
        case SkeletonVariant::CPC: return "cpc";
    }
    return "?";
}

SkeletonVariant parse_skeleton_variant(std::string_view text) {
    if (text == "pc") return SkeletonVariant::PC;
    if (text == "pc-stable" || text == "pcstable" || text == "stable") return SkeletonVariant::PCStable;
    if (text == "cpc") return SkeletonVariant::CPC;
    throw InputError("unknown skeleton variant '" + std::string(text) + "'");
}

namespace {

/// Calls f on every size-k subset of `pool` (sorted), in lexicographic rank order;
/// stops early when f returns false.
template <class F>
bool for_each_subset(const std::vector<NodeId>& pool, int k, F&& f) {
    const int n = static_cast<int>(pool.size());
    if (k > n) return true;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::vector<NodeId> subset(k);
    for (;;) {
        for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
        if (!f(subset)) return false;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return true;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::string describe_query(NodeId x, NodeId y, const std::vector<NodeId>& s) {
    std::ostringstream out;
    out << "CI query " << x << " _||_ " << y << " | {";
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
    out << "}";
    return out.str();
}

}  // namespace

Skeleton skel_search(const CiTest& ci, const SkeletonConfig& config) {
    if (config.max_level < 0) throw InputError("max_level must be >= 0");
    if (!(config.threshold > 0.0 && config.threshold < 1.0)) throw InputError("threshold must lie in (0,1)");
    const int n = ci.node_count();
    Skeleton out;
    out.graph = Pdag(n);
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b) out.graph.add_undirected(a, b);

    const bool stable = config.variant == SkeletonVariant::PCStable;
    const bool keep_all = config.variant == SkeletonVariant::CPC;

    for (int level = 0; level <= config.max_level; ++level) {
        std::vector<std::vector<NodeId>> frozen;
        if (stable)
            for (NodeId v = 0; v < n; ++v) frozen.push_back(out.graph.neighbors(v));

        auto pool_of = [&](NodeId a, NodeId b) {
            std::vector<NodeId> pool;
            if (config.scope == SepsetScope::All) {
                for (NodeId v = 0; v < n; ++v)
                    if (v != a && v != b) pool.push_back(v);
                return pool;
            }
            for (NodeId v : stable ? frozen[a] : out.graph.neighbors(a))
                if (v != b) pool.push_back(v);
            return pool;
        };

        bool any_testable = false;
        for (NodeId x = 0; x < n; ++x) {
            for (NodeId y = x + 1; y < n; ++y) {
                if (!out.graph.adjacent(x, y)) continue;
                std::vector<std::vector<NodeId>> pools{pool_of(x, y)};
                if (config.scope == SepsetScope::Neighbors) pools.push_back(pool_of(y, x));
                std::set<std::vector<NodeId>> tried;
                std::vector<SepsetEntry> accepted;
                for (const auto& pool : pools) {
                    if (static_cast<int>(pool.size()) < level) continue;
                    any_testable = true;
                    const bool go_on = for_each_subset(pool, level, [&](const std::vector<NodeId>& s) {
                        if (!tried.insert(s).second) return true;
                        CiResult r;
                        try {
                            r = ci.test(x, y, s, config.threshold);
                        } catch (...) {
                            std::throw_with_nested(std::runtime_error(describe_query(x, y, s) + " failed"));
                        }
                        ++out.tests;
                        if (r.p_value > config.threshold) {
                            accepted.push_back({s, r.p_value});
                            return keep_all;
                        }
                        return true;
                    });
                    if (!go_on) break;
                }
                if (!accepted.empty()) {
                    out.graph.remove_edge(x, y);
                    for (auto& e : accepted) out.sepsets.add(x, y, std::move(e));
                }
            }
        }
        if (!any_testable) break;
    }
    return out;
}

std::string sepsets_to_json(const SepsetRecord& sigma) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& [pair, list] : sigma.entries()) {
        nlohmann::json sets = nlohmann::json::array();
        for (const auto& e : list) sets.push_back({{"s", e.set}, {"p", e.p_value}});
        doc.push_back({{"pair", {pair.first, pair.second}}, {"sepsets", sets}});
    }
    return doc.dump(2);
}

SepsetRecord sepsets_from_json(std::string_view text) {
    SepsetRecord sigma;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (!doc.is_array()) throw ParseError("sepsets: top level must be an array");
        for (const auto& item : doc) {
            const auto pair = item.at("pair").get<std::vector<NodeId>>();
            if (pair.size() != 2) throw ParseError("sepsets: 'pair' needs two entries");
            for (const auto& e : item.at("sepsets"))
                sigma.add(pair[0], pair[1], {e.at("s").get<std::vector<NodeId>>(), e.at("p").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sepsets: ") + e.what());
    }
    return sigma;
}

}  // namespace mosacd
