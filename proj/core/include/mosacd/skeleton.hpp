#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosacd/citest.hpp"
#include "mosacd/graph.hpp"

namespace mosacd {

struct SepsetEntry {
    std::vector<NodeId> set;  // sorted
    double p_value = 1.0;

    friend bool operator==(const SepsetEntry&, const SepsetEntry&) = default;
};

enum class Membership { All, None, Mixed, Unknown };

/// Sigma: accepted separating sets per non-adjacent pair, in the order they were found.
class SepsetRecord {
public:
    void add(NodeId a, NodeId b, SepsetEntry entry);
    /// Empty span when the pair has no record.
    std::span<const SepsetEntry> find(NodeId a, NodeId b) const;
    bool contains(NodeId a, NodeId b) const { return entries_.count(NodePair::of(a, b)) > 0; }

    /// Largest p over the pair's entries; 0 when there are none.
    double max_p(NodeId a, NodeId b) const;

    /// Whether z sits in every, none or some of the recorded sets of {a,b}.
    Membership membership(NodeId a, NodeId b, NodeId z) const;

    const std::map<NodePair, std::vector<SepsetEntry>>& entries() const noexcept { return entries_; }
    std::size_t pair_count() const noexcept { return entries_.size(); }

    friend bool operator==(const SepsetRecord&, const SepsetRecord&) = default;

private:
    std::map<NodePair, std::vector<SepsetEntry>> entries_;
};

enum class SkeletonVariant { PC, PCStable, CPC };
enum class SepsetScope { Neighbors, All };

std::string to_string(SkeletonVariant v);
SkeletonVariant parse_skeleton_variant(std::string_view text);

struct SkeletonConfig {
    SkeletonVariant variant = SkeletonVariant::PC;
    double threshold = 0.05;
    int max_level = 3;
    SepsetScope scope = SepsetScope::Neighbors;
};

struct Skeleton {
    Pdag graph;
    SepsetRecord sepsets;
    std::size_t tests = 0;
};

/// Level-wise edge deletion from the complete graph. A set is accepted when p > threshold.
/// PC and PC-stable keep the first accepted set; CPC keeps every accepted set of the deletion
/// level. PC-stable freezes adjacencies per level; PC and CPC read them live.
Skeleton skel_search(const CiTest& ci, const SkeletonConfig& config);

/// [{pair:[a,b], sepsets:[{s:[...], p:...}]}]
std::string sepsets_to_json(const SepsetRecord& sigma);
SepsetRecord sepsets_from_json(std::string_view text);

}  // namespace mosacd
