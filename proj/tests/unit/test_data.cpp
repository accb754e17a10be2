#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mosacd/bayes_net.hpp"
#include "mosacd/dataset.hpp"
#include "mosacd/error.hpp"
#include "mosacd/metadata.hpp"

using namespace mosacd;

namespace {

const char* kTwoNode = R"(network tiny {
  property version 1;
}
// comment
variable A {
  type discrete [ 2 ] { yes, no };
  property note x;
}
variable B {
  type discrete [ 3 ] { lo, mid, hi };
}
probability ( A ) {
  table 0.5, 0.5;
}
/* per-configuration rows */
probability ( B | A ) {
  (yes) 0.2, 0.3, 0.5;
  (no) 0.6, 0.3, 0.1;
}
)";

int parse_error_line(const std::string& text) {
    try {
        parse_bif(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

}  // namespace

TEST(Bif, ParsesTheBnlearnDialect) {
    const BayesNet net = parse_bif(kTwoNode);
    EXPECT_EQ(net.name, "tiny");
    ASSERT_EQ(net.size(), 2);
    EXPECT_EQ(net.variables[1].states, (std::vector<std::string>{"lo", "mid", "hi"}));
    EXPECT_EQ(net.variables[1].parents, (std::vector<NodeId>{0}));
    EXPECT_EQ(net.variables[1].cpt, (std::vector<double>{0.2, 0.3, 0.5, 0.6, 0.3, 0.1}));
    EXPECT_TRUE(net.dag().has_edge(0, 1));
}

TEST(Bif, TableFormWithParentsIsChildStateMajor) {
    std::string text = kTwoNode;
    const auto start = text.find("/* per");
    text = text.substr(0, start) + "probability ( B | A ) {\n  table 0.2, 0.6, 0.3, 0.3, 0.5, 0.1;\n}\n";
    EXPECT_EQ(parse_bif(text), parse_bif(kTwoNode));
}

TEST(Bif, ErrorsCarryPositions) {
    std::string bad = kTwoNode;
    bad.replace(bad.find("probability ( B | A )"), 21, "probability ( B | A ");
    EXPECT_EQ(parse_error_line(bad), 16);
    std::string sums = kTwoNode;
    sums.replace(sums.find("0.6, 0.3, 0.1"), 13, "0.6, 0.3, 0.2");
    EXPECT_THROW(parse_bif(sums), ParseError);
    std::string unknown = kTwoNode;
    unknown.replace(unknown.find("B | A"), 5, "B | Q");
    EXPECT_THROW(parse_bif(unknown), ParseError);
    std::string cyclic = kTwoNode;
    const std::string root = "probability ( A ) {\n  table 0.5, 0.5;";
    cyclic.replace(cyclic.find(root), root.size(), "probability ( A | B ) {\n  table 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;");
    EXPECT_THROW(parse_bif(cyclic), ParseError);
}

TEST(Bif, RoundTripOnGeneratedNetworks) {
    Rng rng(71);
    for (int t = 0; t < 25; ++t) {
        const Dag g = random_dag(2 + t % 7, 0.4, rng);
        const BayesNet net = random_bayes_net(g, 2, 4, 0.7, rng);
        net.validate();
        const BayesNet back = parse_bif(to_bif(net));
        EXPECT_EQ(back, net) << to_bif(net);
        EXPECT_EQ(back.dag(), g);
    }
}

TEST(Bif, ShippedNetworksParse) {
    const BayesNet asia = read_bif_file(std::string(MOSACD_RESOURCE_DIR) + "/networks/asia.bif");
    EXPECT_EQ(asia.size(), 8);
    EXPECT_EQ(asia.dag().edge_count(), 8u);
    const BayesNet cancer = read_bif_file(std::string(MOSACD_RESOURCE_DIR) + "/networks/cancer.bif");
    EXPECT_EQ(cancer.dag().edge_count(), 4u);
}

TEST(Sampling, DeterministicAndDegenerateCases) {
    BayesNet net = parse_bif(kTwoNode);
    Rng a(5), b(5);
    EXPECT_EQ(forward_sample(net, 200, a), forward_sample(net, 200, b));

    net.variables[0].cpt = {1.0, 0.0};
    Rng r(1);
    const Dataset d = forward_sample(net, 500, r);
    for (int v : d.column(0)) EXPECT_EQ(v, 0);
}

TEST(Sampling, DeterministicChainCopiesParent) {
    const BayesNet net = parse_bif(R"(network c {}
variable A { type discrete [ 2 ] { a0, a1 }; }
variable B { type discrete [ 2 ] { b0, b1 }; }
probability ( A ) { table 0.3, 0.7; }
probability ( B | A ) { (a0) 1.0, 0.0; (a1) 0.0, 1.0; }
)");
    Rng rng(2);
    const Dataset d = forward_sample(net, 2000, rng);
    for (std::size_t i = 0; i < d.rows(); ++i) EXPECT_EQ(d.column(0)[i], d.column(1)[i]);
}

TEST(Sampling, RootMarginalsWithinThreeSigma) {
    const BayesNet net = read_bif_file(std::string(MOSACD_RESOURCE_DIR) + "/networks/asia.bif");
    Rng rng(3);
    const std::size_t n = 20000;
    const Dataset d = forward_sample(net, n, rng);
    for (int v = 0; v < net.size(); ++v) {
        if (!net.variables[v].parents.empty()) continue;
        const double p = net.variables[v].cpt[0];
        long hits = 0;
        for (int x : d.column(v)) hits += x == 0;
        EXPECT_NEAR(static_cast<double>(hits) / n, p, 3 * std::sqrt(p * (1 - p) / n)) << net.variables[v].name;
    }
}

TEST(Csv, RoundTripRandomTables) {
    Rng rng(73);
    for (int t = 0; t < 10; ++t) {
        const BayesNet net = random_bayes_net(random_dag(5, 0.5, rng), 2, 5, 1.0, rng);
        const Dataset d = forward_sample(net, 50 + t, rng);
        std::stringstream ss;
        write_csv(ss, d);
        EXPECT_EQ(read_csv(ss), d);
    }
}

TEST(Csv, RejectsBadShapes) {
    std::istringstream empty("a,b\n");
    EXPECT_THROW(read_csv(empty), ParseError);
    std::istringstream ragged("a,b\n1,2\n3\n");
    EXPECT_THROW(read_csv(ragged), ParseError);
    std::istringstream dup("a,a\n1,2\n");
    EXPECT_THROW(read_csv(dup), ParseError);
    std::istringstream ok("x,y\n1,2\n1,3\n");
    const Dataset d = read_csv(ok);
    EXPECT_EQ(d.cardinality(1), 2);
    EXPECT_EQ(d.label(1, 1), "3");
}

TEST(Metadata, MaskingCounts) {
    std::vector<std::string> vars;
    Metadata meta;
    for (int i = 0; i < 27; ++i) {
        vars.push_back("v" + std::to_string(i));
        meta.descriptions[vars.back()] = "describes v" + std::to_string(i);
    }
    Rng rng(1);
    EXPECT_EQ(mask_descriptions(meta, vars, 0.0, rng), meta);
    auto masked_count = [&](const Metadata& m) {
        int c = 0;
        for (const auto& v : vars) c += m.describe(v) == kUninformativeDescription;
        return c;
    };
    EXPECT_EQ(masked_count(mask_descriptions(meta, vars, 1.0, rng)), 27);
    EXPECT_EQ(masked_count(mask_descriptions(meta, vars, 0.5, rng)), 14);
    Rng a(9), b(9);
    EXPECT_EQ(mask_descriptions(meta, vars, 0.3, a), mask_descriptions(meta, vars, 0.3, b));
    EXPECT_THROW(mask_descriptions(meta, vars, 1.5, rng), InputError);
}

TEST(Metadata, PartialFilesAreReported) {
    const Metadata m = parse_metadata(R"({"data_desc": "d", "nodes": {"a": {"description": "first"}, "b": "second"}})");
    EXPECT_EQ(m.describe("a"), "first");
    EXPECT_EQ(m.describe("b"), "second");
    const std::vector<std::string> vars{"a", "b", "c"};
    EXPECT_EQ(m.missing(vars), (std::vector<std::string>{"c"}));
    EXPECT_EQ(parse_metadata(to_json(m)), m);
    EXPECT_THROW(parse_metadata(R"({"nodes": [1, 2]})"), ParseError);
    const Metadata asia = read_metadata_file(std::string(MOSACD_RESOURCE_DIR) + "/networks/asia.json");
    const BayesNet net = read_bif_file(std::string(MOSACD_RESOURCE_DIR) + "/networks/asia.bif");
    EXPECT_TRUE(asia.missing(net.names()).empty());
}
