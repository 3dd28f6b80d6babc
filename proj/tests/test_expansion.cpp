#include <gtest/gtest.h>

#include "mixcert/expansion.hpp"
#include "mixcert/generators.hpp"
#include "oracles.hpp"

using namespace mixcert;

namespace {

Rational r(long p, unsigned long q = 1) { return make_rational(p, q); }

bool contiguous_on_cycle(const VertexSet& s, std::size_t n) {
    // Exactly two boundary edges on a cycle means one arc.
    std::size_t changes = 0;
    for (Vertex v = 0; v < n; ++v) changes += s.contains(v) != s.contains(static_cast<Vertex>((v + 1) % n));
    return changes == 2;
}

}  // namespace

TEST(Conductance, CompleteGraphs) {
    for (std::size_t n = 3; n <= 9; ++n) {
        auto res = conductance(complete_graph(n), SearchMode::exact);
        EXPECT_EQ(res.value, r(n, n - 1));
        EXPECT_EQ(res.value, oracle::conductance(complete_graph(n)));
        EXPECT_EQ(res.mode, SearchMode::exact);
        EXPECT_EQ(res.candidate_count, (std::uint64_t{1} << (n - 1)) - 1);
    }
}

TEST(Conductance, EvenCycles) {
    for (std::size_t n = 4; n <= 14; n += 2) {
        auto g = cycle_graph(n);
        auto res = conductance(g, SearchMode::exact);
        EXPECT_EQ(res.value, r(4, n));
        EXPECT_EQ(res.value, oracle::conductance(g));
        EXPECT_EQ(res.argmin.size(), n / 2);
        EXPECT_TRUE(contiguous_on_cycle(res.argmin, n));
        EXPECT_EQ(conductance_of(g, res.argmin), res.value);
    }
}

TEST(Conductance, DisconnectedIsZero) {
    auto g = disjoint_union(complete_graph(3), complete_graph(3));
    auto res = conductance(g, SearchMode::exact);
    EXPECT_EQ(res.value, 0);
    EXPECT_EQ(edge_boundary(g, res.argmin), 0u);
    EXPECT_EQ(conductance(g, SearchMode::sweep).value, 0);
}

TEST(Conductance, ExactMatchesOracleAndSweepIsUpperBound) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto g = random_regular(14, 3, seed);
        auto exact = conductance(g, SearchMode::exact);
        EXPECT_EQ(exact.value, oracle::conductance(g));
        auto sweep = conductance(g, SearchMode::sweep);
        EXPECT_LE(exact.value, sweep.value);
        EXPECT_EQ(conductance_of(g, sweep.argmin), sweep.value);
    }
}

TEST(Conductance, ExactLimit) {
    EXPECT_THROW(conductance(random_regular(28, 3, 1), SearchMode::exact), TooLarge);
}

TEST(MinRatio, ExactMatchesOracle) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto g = random_regular(16, 4, seed);
        for (auto [lo, hi] : {std::pair{1u, 8u}, {3u, 5u}, {8u, 8u}}) {
            auto s = min_ratio_set(g, lo, hi, SearchMode::exact);
            ASSERT_TRUE(s.best);
            EXPECT_EQ(s.best->ratio(), oracle::min_ratio(g, lo, hi));
            EXPECT_EQ(s.best->boundary, oracle::boundary(g, s.best->set.mask()));
            auto sw = min_ratio_set(g, lo, hi, SearchMode::sweep);
            ASSERT_TRUE(sw.best);
            EXPECT_LE(s.best->ratio(), sw.best->ratio());
            EXPECT_GE(sw.best->set.size(), lo);
            EXPECT_LE(sw.best->set.size(), hi);
        }
    }
}

TEST(MinRatio, InvalidRange) {
    auto g = cycle_graph(8);
    EXPECT_THROW(min_ratio_set(g, 0, 3, SearchMode::exact), InvalidArgument);
    EXPECT_THROW(min_ratio_set(g, 3, 2, SearchMode::exact), InvalidArgument);
    EXPECT_THROW(min_ratio_set(g, 1, 5, SearchMode::exact), InvalidArgument);
}

TEST(MinRatio, SweepFindsPlantedCut) {
    auto g = matched_expanders(40, 4, 3);
    auto sw = min_ratio_set(g, 1, 40, SearchMode::sweep);
    ASSERT_TRUE(sw.best);
    EXPECT_LE(sw.best->ratio(), r(1));
    EXPECT_EQ(sw.best->boundary, edge_boundary(g, sw.best->set));
}

TEST(EdgeExpansion, Examples) {
    auto q = check_edge_expansion(hypercube(3), r(1), 1, 4, SearchMode::exact);
    EXPECT_EQ(q.verdict, Verdict::certified);
    ASSERT_TRUE(q.min_ratio_set);
    EXPECT_EQ(q.min_ratio_set->ratio(), 1);
    EXPECT_EQ(q.min_ratio_set->set.size(), 4u);
    EXPECT_EQ(q.enumerated, 162u);  // C(8,1) + C(8,2) + C(8,3) + C(8,4)

    auto twin = disjoint_union(complete_graph(3), complete_graph(3));
    auto t = check_edge_expansion(twin, r(1, 10), 1, 3, SearchMode::exact);
    EXPECT_EQ(t.verdict, Verdict::violated);
    ASSERT_TRUE(t.witness);
    EXPECT_EQ(*t.witness, VertexSet::of(6, {0, 1, 2}));
    EXPECT_EQ(*t.witness_boundary, 0u);

    auto c = check_edge_expansion(cycle_graph(6), r(1), 3, 3, SearchMode::exact);
    EXPECT_EQ(c.verdict, Verdict::violated);
    EXPECT_EQ(*c.witness, VertexSet::of(6, {0, 1, 2}));
    EXPECT_EQ(*c.witness_boundary, 2u);
}

TEST(EdgeExpansion, SampledModesNeverClaimCertified) {
    auto g = random_regular(30, 4, 2);
    auto cert = check_edge_expansion(g, r(1, 100), 1, 15, SearchMode::sweep);
    EXPECT_EQ(cert.verdict, Verdict::certified_sampled);
    EXPECT_EQ(cert.mode, SearchMode::sweep);
    EXPECT_TRUE(cert.holds());
    EXPECT_EQ(to_string(cert.verdict), "certified (sampled)");
}

TEST(EdgeExpansion, WellMixingImpliesExpansion) {
    // Connected graphs whose well-mixing set at 2 delta has size at least eps n expand at
    // eps D / (8 tau) on sizes [4 delta n, n/2].
    const Rational eps = r(1, 2), delta = r(1, 10);
    int applicable = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        for (std::size_t d : {3u, 4u}) {
            auto g = random_regular(20, d, seed);
            if (!is_connected(g)) continue;
            for (std::size_t tau : {4u, 8u, 16u}) {
                auto a = well_mixing_set(g, tau, 2 * delta, Backend::exact);
                if (Rational(static_cast<unsigned long>(a.members.size())) < eps * 20) continue;
                ++applicable;
                const auto lo = static_cast<std::size_t>(ceil(4 * delta * 20).get_ui());
                auto cert = check_edge_expansion(g, eps * d / (8 * tau), lo, 10, SearchMode::exact);
                EXPECT_EQ(cert.verdict, Verdict::certified) << seed << " " << d << " " << tau;
            }
        }
    }
    EXPECT_GT(applicable, 10);
}

TEST(Sandwich, Examples) {
    auto k5 = sandwich_check(complete_graph(5), 100, Backend::exact);
    EXPECT_TRUE(k5.applicable);
    EXPECT_EQ(k5.phi, r(5, 4));
    EXPECT_EQ(k5.mix, 1u);
    EXPECT_EQ(k5.lower, r(4, 5));
    EXPECT_NEAR(k5.upper, 16 * std::log2(5.0) / 1.5625, 1e-12);
    EXPECT_TRUE(k5.holds);

    auto c4 = sandwich_check(cycle_graph(4), 50, Backend::exact);
    EXPECT_FALSE(c4.applicable);
    EXPECT_FALSE(c4.holds);

    auto rr = sandwich_check(random_regular(12, 3, 1), default_t_max(12), Backend::exact);
    EXPECT_TRUE(rr.applicable);
    EXPECT_TRUE(rr.holds);
    auto rf = sandwich_check(random_regular(12, 3, 1), default_t_max(12), Backend::float64);
    EXPECT_EQ(rf.mix, rr.mix);
}

TEST(SearchModeNames, RoundTrip) {
    for (auto m : {SearchMode::exact, SearchMode::sweep, SearchMode::sampled})
        EXPECT_EQ(parse_search_mode(to_string(m)), m);
    EXPECT_THROW(parse_search_mode("greedy"), Error);
}
