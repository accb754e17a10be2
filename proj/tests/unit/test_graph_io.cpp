#include <gtest/gtest.h>

#include "mosacd/error.hpp"
#include "mosacd/graph_io.hpp"

using namespace mosacd;

namespace {

Pdag sample_pdag() {
    Pdag p(4);
    p.add_directed(0, 1);
    p.add_directed(2, 1);
    p.add_undirected(1, 3);
    return p;
}

const std::vector<std::string> kNames{"a", "b", "c", "d"};

}  // namespace

TEST(GraphIo, TextListsDirectedThenUndirected) {
    EXPECT_EQ(to_text(sample_pdag(), kNames), "a -> b\nc -> b\nb -- d\n");
}

TEST(GraphIo, TextRoundTrip) {
    const std::string text = to_text(sample_pdag(), kNames);
    EXPECT_EQ(pdag_from_text(text, kNames), sample_pdag());
    EXPECT_EQ(pdag_from_text("# comment\n\n" + text, kNames), sample_pdag());
    EXPECT_THROW(pdag_from_text("a -> zz\n", kNames), ParseError);
}

TEST(GraphIo, JsonRoundTripKeepsNames) {
    Rng rng(4);
    for (int t = 0; t < 10; ++t) {
        const Dag g = random_dag(6, 0.5, rng);
        const Pdag p = cpdag_of(g);
        const NamedPdag back = pdag_from_json(to_json(p, {}));
        EXPECT_EQ(back.graph, p);
        EXPECT_EQ(back.names, resolve_names(6, {}));
    }
    const NamedPdag named = pdag_from_json(to_json(sample_pdag(), kNames));
    EXPECT_EQ(named.names, kNames);
}

TEST(GraphIo, DotMarksUndirectedEdges) {
    const std::string dot = to_dot(sample_pdag(), kNames);
    EXPECT_NE(dot.find("\"a\" -> \"b\""), std::string::npos);
    EXPECT_NE(dot.find("dir=none"), std::string::npos);
}
