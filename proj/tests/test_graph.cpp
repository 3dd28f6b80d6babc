#include <gtest/gtest.h>

#include "mixcert/generators.hpp"
#include "mixcert/graph.hpp"
#include "mixcert/rng.hpp"
#include "oracles.hpp"

using namespace mixcert;

TEST(EdgeList, TriangleParses) {
    auto g = parse_edge_list("0 1\n1 2\n2 0");
    EXPECT_EQ(g.order(), 3u);
    EXPECT_EQ(g.edge_count(), 3u);
    EXPECT_TRUE(g.is_regular());
    EXPECT_EQ(g.regular_degree(), 2u);
}

TEST(EdgeList, DuplicateEdgeNamesLine) {
    try {
        parse_edge_list("0 1\n0 1");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(EdgeList, ReversedDuplicateIsRejected) { EXPECT_THROW(parse_edge_list("0 1\n# c\n1 0\n"), ParseError); }

TEST(EdgeList, SelfLoopNamesLine) {
    try {
        parse_edge_list("# header\n0 0");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(EdgeList, MalformedLines) {
    EXPECT_THROW(parse_edge_list("0 1\n2"), ParseError);
    EXPECT_THROW(parse_edge_list("0 x"), ParseError);
    EXPECT_THROW(parse_edge_list("0 -1"), ParseError);
    EXPECT_THROW(parse_edge_list("n=2\n0 3"), ParseError);
}

TEST(EdgeList, HeaderAndCommentsRoundTrip) {
    auto g = parse_edge_list("# two isolated vertices at the end\nn=5\n0 1\n1 2\n");
    EXPECT_EQ(g.order(), 5u);
    EXPECT_EQ(g.degree(4), 0u);
    EXPECT_EQ(parse_edge_list(write_edge_list(g)), g);
    auto q = hypercube(4);
    EXPECT_EQ(parse_edge_list(write_edge_list(q)), q);
}

TEST(Graph, NeighborListsSortedAndSymmetric) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = random_regular(30, 5, seed);
        for (Vertex v = 0; v < g.order(); ++v) {
            auto nb = g.neighbors(v);
            EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
            EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
            for (Vertex w : nb) {
                EXPECT_NE(v, w);
                EXPECT_TRUE(g.has_edge(w, v));
            }
        }
    }
}

TEST(Graph, NonRegularDegreeQuery) {
    auto s = oracle::star(3);
    EXPECT_FALSE(s.is_regular());
    EXPECT_EQ(s.min_degree(), 1u);
    EXPECT_EQ(s.max_degree(), 3u);
    EXPECT_THROW(s.regular_degree(), GraphKindError);
}

TEST(Components, SingleAndTwin) {
    auto k3 = complete_graph(3);
    auto c = components(k3);
    EXPECT_EQ(c.count(), 1u);
    EXPECT_EQ(c.sizes[0], 3u);

    auto twin = disjoint_union(k3, k3);
    auto d = components(twin);
    ASSERT_EQ(d.count(), 2u);
    EXPECT_EQ(d.sizes[0], 3u);
    EXPECT_EQ(d.sizes[1], 3u);
    EXPECT_EQ(d.giant, 0u);
    EXPECT_TRUE(d.members(d.giant).contains(0));
}

TEST(Components, ExpanderPlusCliqueSizes) {
    auto g = expander_plus_clique(100, 3, 1);
    auto c = components(g);
    auto sizes = c.sizes;
    std::sort(sizes.rbegin(), sizes.rend());
    ASSERT_GE(sizes.size(), 2u);
    EXPECT_EQ(sizes.back(), 4u);
    EXPECT_EQ(c.sizes[c.giant], oracle::component_sizes(g).front());
    std::size_t total = 0;
    for (auto s : c.sizes) total += s;
    EXPECT_EQ(total, 100u);
    if (sizes.size() == 2) {
        EXPECT_EQ(sizes[0], 96u);
    }
}

TEST(Components, MatchesUnionFind) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = disjoint_union(random_regular(12, 2, seed), complete_graph(4));
        auto c = components(g);
        auto sizes = c.sizes;
        std::sort(sizes.rbegin(), sizes.rend());
        EXPECT_EQ(sizes, oracle::component_sizes(g));
        for (Vertex v = 0; v < g.order(); ++v)
            for (Vertex w : g.neighbors(v)) EXPECT_EQ(c.component_id[v], c.component_id[w]);
    }
}

TEST(Induced, Examples) {
    auto k4 = complete_graph(4);
    auto sub = induced(k4, VertexSet::of(4, {0, 2, 3}));
    EXPECT_EQ(sub.graph, complete_graph(3));
    EXPECT_EQ(sub.to_parent, (std::vector<Vertex>{0, 2, 3}));

    auto c6 = cycle_graph(6);
    auto p = induced(c6, VertexSet::of(6, {0, 1, 2}));
    EXPECT_EQ(p.graph, oracle::path(3));

    auto q3 = hypercube(3);
    auto half = induced(q3, VertexSet::of(8, {0, 2, 4, 6}));
    EXPECT_TRUE(half.graph.is_regular());
    EXPECT_EQ(half.graph.regular_degree(), 2u);
    EXPECT_EQ(half.graph, hypercube(2));
    EXPECT_THROW(induced(q3, VertexSet(8)), InvalidArgument);
}

TEST(Induced, RelabelRoundTrip) {
    auto g = random_regular(20, 4, 3);
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        VertexSet keep(20);
        for (Vertex v = 0; v < 20; ++v)
            if (rng.below(2)) keep.insert(v);
        if (keep.empty()) continue;
        auto sub = induced(g, keep);
        std::size_t expected = 0;
        for (auto [u, v] : g.edges()) expected += keep.contains(u) && keep.contains(v);
        EXPECT_EQ(sub.graph.edge_count(), expected);
        for (auto [u, v] : sub.graph.edges()) EXPECT_TRUE(g.has_edge(sub.to_parent[u], sub.to_parent[v]));
    }
}

TEST(Boundary, Examples) {
    EXPECT_EQ(edge_boundary(complete_graph(4), VertexSet::of(4, {2})), 3u);
    EXPECT_EQ(edge_boundary(hypercube(3), VertexSet::of(8, {0, 2, 4, 6})), 4u);
    EXPECT_EQ(edge_boundary(cycle_graph(6), VertexSet::of(6, {0, 1, 2})), 2u);
    EXPECT_THROW(edge_boundary(cycle_graph(6), VertexSet(6)), InvalidArgument);
    EXPECT_THROW(edge_boundary(cycle_graph(6), VertexSet::full(6)), InvalidArgument);
}

TEST(Boundary, ComplementSymmetricExhaustive) {
    auto g = random_regular(12, 3, 7);
    for (std::uint64_t m = 1; m + 1 < (1u << 12); ++m) {
        auto x = VertexSet::from_mask(12, m);
        ASSERT_EQ(edge_boundary(g, x), edge_boundary(g, x.complement()));
        ASSERT_EQ(edge_boundary(g, x), oracle::boundary(g, m));
    }
}

TEST(Neighborhood, Examples) {
    EXPECT_EQ(neighborhood(cycle_graph(6), VertexSet::of(6, {0})), VertexSet::of(6, {1, 5}));
    EXPECT_EQ(neighborhood(complete_graph(4), VertexSet::of(4, {0, 1})), VertexSet::of(4, {2, 3}));
    auto p = oracle::petersen();
    EXPECT_EQ(neighborhood(p, VertexSet::of(10, {0, 1})).size(), 4u);
    EXPECT_THROW(neighborhood(p, VertexSet(10)), InvalidArgument);
}

TEST(Neighborhood, DisjointAndAdjacent) {
    auto g = random_regular(16, 3, 2);
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        VertexSet w(16);
        for (Vertex v = 0; v < 16; ++v)
            if (rng.below(3) == 0) w.insert(v);
        if (w.empty()) continue;
        auto nb = neighborhood(g, w);
        for (Vertex u : nb.members()) {
            EXPECT_FALSE(w.contains(u));
            bool touches = false;
            for (Vertex x : g.neighbors(u)) touches |= w.contains(x);
            EXPECT_TRUE(touches);
        }
    }
}

TEST(VertexSet, BasicOperations) {
    auto s = VertexSet::of(10, {1, 3, 5});
    EXPECT_EQ(s.size(), 3u);
    s.insert(3);
    EXPECT_EQ(s.size(), 3u);
    s.erase(1);
    EXPECT_EQ(s.members(), (std::vector<Vertex>{3, 5}));
    EXPECT_EQ(s.complement().size(), 8u);
    EXPECT_TRUE(s.is_subset_of(VertexSet::of(10, {3, 5, 7})));
    EXPECT_EQ(VertexSet::from_mask(10, s.mask()), s);
}

TEST(Bipartite, Examples) {
    EXPECT_TRUE(is_bipartite(hypercube(4)));
    EXPECT_TRUE(is_bipartite(cycle_graph(8)));
    EXPECT_FALSE(is_bipartite(cycle_graph(7)));
    EXPECT_FALSE(is_bipartite(oracle::petersen()));
}
