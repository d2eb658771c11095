#include <trapdoor/semantic/cycles.hpp>

#include <oracles.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace trapdoor::semantic;

namespace {

CallGraph graph(std::vector<std::pair<NodeId, NodeId>> edges, std::vector<NodeId> nodes = {}) {
    CallGraph g;
    g.nodes = std::move(nodes);
    for (auto [a, b] : edges) g.add_edge(a, b);
    g.normalize();
    return g;
}

} // namespace

TEST(FindCycles, TwoCycle) {
    EXPECT_EQ(find_cycles(graph({{1, 2}, {2, 1}})), (std::vector<std::vector<NodeId>>{{1, 2}}));
}

TEST(FindCycles, DagHasNone) {
    EXPECT_TRUE(find_cycles(graph({{1, 2}, {2, 3}, {1, 3}})).empty());
    EXPECT_TRUE(find_cycles(graph({}, {1, 2, 3})).empty());
}

TEST(FindCycles, SelfLoopAndDisjointComponents) {
    const auto c = find_cycles(graph({{5, 5}, {1, 2}, {2, 3}, {3, 1}, {3, 4}, {7, 8}, {8, 7}}));
    EXPECT_EQ(c, (std::vector<std::vector<NodeId>>{{1, 2, 3}, {5}, {7, 8}}));
}

TEST(FindCycles, NormalizeDeduplicates) {
    auto g = graph({{1, 2}, {1, 2}, {2, 1}});
    EXPECT_EQ(g.edges.size(), 2u);
    EXPECT_EQ(g.nodes, (std::vector<NodeId>{1, 2}));
}

TEST(FindCycles, MatchesBruteForceOnRandomGraphs) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 1000; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 0.35)(rng);
        CallGraph g;
        for (int v = 0; v < n; ++v) g.nodes.push_back(v * 10);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (std::bernoulli_distribution(p)(rng)) g.add_edge(a * 10, b * 10);
            }
        }
        g.normalize();
        ASSERT_EQ(find_cycles(g), oracle::cycles_by_dfs(g)) << "graph " << i;
    }
}
