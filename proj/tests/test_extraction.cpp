#include <gtest/gtest.h>

#include "mixcert/extraction.hpp"
#include "mixcert/generators.hpp"
#include "oracles.hpp"

using namespace mixcert;

namespace {

Rational r(long p, unsigned long q = 1) { return make_rational(p, q); }

void expect_consistent(const Graph& g, const ExtractionResult& res) {
    EXPECT_EQ(res.deleted.size() + res.kept_graph.order(), g.order());
    for (Vertex i = 0; i < res.kept_to_parent.size(); ++i) EXPECT_FALSE(res.deleted.contains(res.kept_to_parent[i]));
    for (auto [u, v] : res.kept_graph.edges()) EXPECT_TRUE(g.has_edge(res.kept_to_parent[u], res.kept_to_parent[v]));
    EXPECT_TRUE(res.certificate.holds());
    EXPECT_EQ(res.certificate.bound, res.constant);
    for (const auto& step : res.peel_trace) {
        EXPECT_LT(step.ratio, res.constant);
        EXPECT_TRUE(step.removed.is_subset_of(res.deleted));
    }
}

}  // namespace

TEST(Extraction, IsolatedCliqueIsRemoved) {
    // A random cubic graph on 100 vertices plus a K4. Expander-side walks reach TV about
    // 4/104 < 1/20, so half the vertices mix.
    auto g = expander_plus_clique(104, 3, 1);
    auto res = extract_expander(g, r(1, 2), r(1, 20), 60, {Backend::float64, {}});
    EXPECT_EQ(res.deleted, VertexSet::of(104, {100, 101, 102, 103}));
    EXPECT_TRUE(res.peel_trace.empty());
    EXPECT_EQ(res.giant_size, 100u);
    EXPECT_EQ(res.budget, r(26));
    EXPECT_TRUE(res.within_budget);
    EXPECT_EQ(res.certificate.verdict, Verdict::certified_sampled);
    expect_consistent(g, res);
}

TEST(Extraction, ExpanderIsFixedPoint) {
    auto g = random_regular(20, 3, 1);
    auto res = extract_expander(g, r(1, 2), r(1, 4), 10);
    EXPECT_TRUE(res.deleted.empty());
    EXPECT_EQ(res.kept_graph, g);
    EXPECT_EQ(res.constant, r(3, 320));
    EXPECT_EQ(res.certificate.verdict, Verdict::certified);
    std::size_t mixing = 0;
    for (Vertex v = 0; v < 20; ++v) mixing += oracle::tv_uniform(oracle::distribution(g, v, 10)) < r(1, 4);
    EXPECT_EQ(res.well_mixing_count, mixing);
    expect_consistent(g, res);
}

TEST(Extraction, CertificateMatchesOracleOnSmallCores) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = disjoint_union(random_regular(20, 4, seed), complete_graph(5));
        auto res = extract_expander(g, r(1, 2), r(1, 4), 12);
        expect_consistent(g, res);
        ASSERT_EQ(res.certificate.mode, SearchMode::exact);
        const std::size_t m = res.kept_graph.order();
        EXPECT_GE(oracle::min_ratio(res.kept_graph, 1, m / 2), res.constant);
    }
}

TEST(Extraction, HypothesisError) {
    auto g = disjoint_union(complete_graph(3), complete_graph(3));
    try {
        extract_expander(g, make_rational(9, 10), r(1, 30), 5);
        FAIL() << "expected a hypothesis error";
    } catch (const HypothesisError& e) {
        EXPECT_EQ(e.actual_count(), 0u);
        EXPECT_NEAR(e.required_count(), 5.4, 1e-12);
    }
}

TEST(Extraction, ExhaustionIsReported) {
    // On a long cycle with tau = 1 the constant 1/16 exceeds every arc's ratio, so peeling
    // eats the giant component.
    auto g = cycle_graph(100);
    EXPECT_THROW(extract_expander(g, r(1, 2), r(99, 100), 1, {Backend::float64, {}}), Error);
}

TEST(Extraction, InvalidParameters) {
    auto g = random_regular(10, 3, 1);
    EXPECT_THROW(extract_expander(g, r(0), r(1, 4), 5), InvalidArgument);
    EXPECT_THROW(extract_expander(g, r(1, 2), r(1), 5), InvalidArgument);
    EXPECT_THROW(extract_expander(g, r(1, 2), r(1, 4), 0), InvalidArgument);
}
