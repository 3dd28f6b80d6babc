#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "walk.hpp"

namespace mixcert {

inline constexpr std::size_t kMaxLadderDepth = 8;

/// A quantity computed on either backend: `exact` is set on the exact backend.
struct Value {
    double approx = 0;
    std::optional<Rational> exact;

    static Value of(const Rational& q) { return {q.get_d(), q}; }
    static Value of(double d) { return {d, std::nullopt}; }
};

/// delta_0 = eps * 3^(-M 4^M) / 10^8. The exact value is kept when M <= 8; log10 always.
struct Delta0 {
    std::optional<Rational> value;
    double log10 = 0;
};

inline Delta0 delta0(const Rational& eps, std::size_t M) {
    if (eps <= 0 || eps >= make_rational(1, 4)) throw InvalidArgument("delta0 needs 0 < eps < 1/4");
    if (M < 1) throw InvalidArgument("delta0 needs M >= 1");
    Delta0 out;
    const double power = static_cast<double>(M) * std::pow(4.0, static_cast<double>(M));
    out.log10 = std::log10(eps.get_d()) - 8.0 - power * std::log10(3.0);
    if (M <= kMaxLadderDepth) {
        const unsigned long e = static_cast<unsigned long>(M) << (2 * M);
        Rational v = eps / (pow(BigInt(10), 8) * pow(BigInt(3), e));
        v.canonicalize();
        out.value = v;
    }
    return out;
}

/// eta_i = 2 * 3^(i+1) * (delta/eps)^(2^-i) for 0 <= i <= M. The values are irrational in
/// general; comparisons against them go through eta_compare, which is exact.
struct EtaSchedule {
    Rational eps, delta, ratio;  ///< ratio = delta / eps
    std::size_t M = 0;
    std::vector<double> values;
};

/// Sign of x - eta_i, decided exactly: for x > 0, x > eta_i iff (x / (2 * 3^(i+1)))^(2^i) > ratio.
inline int eta_compare(const Rational& x, std::size_t i, const Rational& ratio) {
    if (x <= 0) return -1;
    Rational base = x / (2 * pow(BigInt(3), static_cast<unsigned long>(i + 1)));
    base.canonicalize();
    const Rational lhs = pow(base, 1ul << i);
    return lhs < ratio ? -1 : (lhs > ratio ? 1 : 0);
}

inline EtaSchedule eta_schedule(const Rational& eps, const Rational& delta, std::size_t M) {
    if (eps <= 0 || delta <= 0) throw InvalidArgument("eta schedule needs eps, delta > 0");
    if (M > kMaxLadderDepth) throw TooLarge("ladder depth is limited to M <= 8");
    EtaSchedule s{eps, delta, delta / eps, M, {}};
    s.ratio.canonicalize();
    const double r = s.ratio.get_d();
    for (std::size_t i = 0; i <= M; ++i)
        s.values.push_back(2.0 * std::pow(3.0, static_cast<double>(i + 1)) * std::pow(r, std::ldexp(1.0, -static_cast<int>(i))));
    // eta_{i+1}^2 / 9 = 4 * 3^(2i+2) * ratio^(2^-i), so the recursion reduces to 2*3^(i+1) <= 4*3^(2i+2).
    for (std::size_t i = 0; i < M; ++i) {
        const BigInt left = 2 * pow(BigInt(3), static_cast<unsigned long>(i + 1));
        const BigInt right = 4 * pow(BigInt(3), static_cast<unsigned long>(2 * i + 2));
        if (left > right) throw Error("internal: eta recursion violated");
    }
    return s;
}

/// Whether eta_i <= eta_{i+1}^2 / 9, evaluated in floating point from the stored values.
inline bool eta_recursion_holds(const EtaSchedule& s, double relative_tolerance = 1e-12) {
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i)
        if (s.values[i] > s.values[i + 1] * s.values[i + 1] / 9.0 * (1 + relative_tolerance)) return false;
    return true;
}

/// A, B_0..B_M and the unions B^0..B^M.
struct BadSetLadder {
    VertexSet A;
    std::vector<VertexSet> B, cumulative;
    EtaSchedule schedule;
    std::size_t tau = 0, M = 0;
    Backend backend = Backend::exact;
    VertexSet borderline;  ///< float backend: vertices within the guard band of a threshold
};

namespace detail {

template <WalkArithmetic Arith>
BadSetLadder bad_set_ladder(const Graph& g, std::size_t tau, const Rational& delta, const Rational& eps, std::size_t M) {
    const std::size_t n = g.order();
    BadSetLadder L;
    L.tau = tau;
    L.M = M;
    L.backend = Arith::backend;
    L.schedule = eta_schedule(eps, delta, M);
    auto mixing = well_mixing_set<Arith>(g, tau, delta);
    L.A = mixing.members;
    L.borderline = mixing.borderline;
    const Rational half_eps = eps / 2;
    VertexSet b0(n);
    auto hit = hitting_probabilities<Arith>(g, L.A, tau);
    for (Vertex v = 0; v < n; ++v) {
        if constexpr (Arith::backend == Backend::exact) {
            if (hit[v] < half_eps) b0.insert(v);
        } else {
            if (hit[v] < half_eps.get_d()) b0.insert(v);
            if (std::abs(hit[v] - half_eps.get_d()) <= float_guard()) L.borderline.insert(v);
        }
    }
    L.B.push_back(b0);
    L.cumulative.push_back(b0);
    for (std::size_t i = 1; i <= M; ++i) {
        auto p = hitting_probabilities<Arith>(g, L.cumulative.back(), tau);
        VertexSet bi(n);
        for (Vertex v = 0; v < n; ++v) {
            if constexpr (Arith::backend == Backend::exact) {
                if (eta_compare(p[v], i, L.schedule.ratio) > 0) bi.insert(v);
            } else {
                if (p[v] > L.schedule.values[i]) bi.insert(v);
                if (std::abs(p[v] - L.schedule.values[i]) <= float_guard()) L.borderline.insert(v);
            }
        }
        VertexSet next = L.cumulative.back();
        next |= bi;
        if (!L.cumulative.back().is_subset_of(next)) throw Error("internal: ladder not monotone");
        L.B.push_back(std::move(bi));
        L.cumulative.push_back(std::move(next));
    }
    return L;
}

/// Taboo chain from v: after each block of tau steps the mass on A is removed and kept.
template <WalkArithmetic Arith>
struct TabooRun {
    Distribution<Arith> survivor;
    std::vector<Distribution<Arith>> absorbed;  ///< absorbed[i] is the mass first on A at time (i+1) tau
};

template <WalkArithmetic Arith>
TabooRun<Arith> taboo_chain(const Graph& g, Vertex v, const VertexSet& a, std::size_t tau, std::size_t M) {
    TabooRun<Arith> run{Distribution<Arith>::point(g.order(), v), {}};
    for (std::size_t i = 0; i < M; ++i) {
        advance(g, run.survivor, tau);
        Distribution<Arith> hit = run.survivor;
        for (Vertex u = 0; u < g.order(); ++u) {
            if (a.contains(u))
                run.survivor.weight[u] = 0;
            else
                hit.weight[u] = 0;
        }
        hit.origin.reset();
        run.absorbed.push_back(std::move(hit));
    }
    return run;
}

}  // namespace detail

/// The bad-set ladder with A = well_mixing_set(g, tau, delta), B_0 = {v : Pr[Q_v^tau in A] < eps/2}
/// and B_i = {v : Pr[Q_v^tau in B^(i-1)] > eta_i}.
inline BadSetLadder bad_set_ladder(const Graph& g, std::size_t tau, const Rational& delta, const Rational& eps,
                                   std::size_t M, Backend backend = Backend::exact) {
    if (tau < 1) throw InvalidArgument("tau must be positive");
    return with_backend(backend, [&]<typename A>(A) { return detail::bad_set_ladder<A>(g, tau, delta, eps, M); });
}

/// Probability that the walk from v avoids A at times tau, 2 tau, ..., M tau.
template <WalkArithmetic Arith>
typename Arith::value_type no_visit_probability(const Graph& g, Vertex v, const VertexSet& a, std::size_t tau,
                                                std::size_t M) {
    return detail::taboo_chain<Arith>(g, v, a, tau, M).survivor.total();
}

/// Rational bounds lo <= e^(-x) <= hi for rational x >= 0, with relative width below 1e-40.
inline std::pair<Rational, Rational> exp_neg_bounds(const Rational& x) {
    if (x < 0) throw InvalidArgument("exp_neg_bounds needs x >= 0");
    const Rational tiny = make_rational(1, pow(BigInt(10), 40));
    Rational sum = 1, term = 1;
    for (unsigned long k = 1;; ++k) {
        term *= x / k;
        term.canonicalize();
        sum += term;
        const Rational next_ratio = x / (k + 1);
        if (next_ratio < make_rational(1, 2)) {
            Rational tail = term * next_ratio / (1 - next_ratio);
            tail.canonicalize();
            if (tail < tiny * sum) {
                Rational lo = 1 / (sum + tail), hi = 1 / sum;
                lo.canonicalize();
                hi.canonicalize();
                return {lo, hi};
            }
        }
    }
}

struct LevelVerdict {
    std::size_t level = 0;
    std::size_t size = 0;  ///< |B^i|
    double bound = 0;      ///< eta_i * n
    bool holds = false;
};

struct VertexVerdict {
    Vertex vertex = 0;
    Value value;
    bool holds = false;
    bool borderline = false;
};

struct AmplificationReport {
    std::size_t n = 0, degree = 0, tau = 0, M = 0;
    Rational eps, delta;
    Backend backend = Backend::exact;
    bool hypothesis = false;  ///< |A| >= eps n
    Delta0 delta0;
    bool delta_feasible = false;  ///< eps < 1/4 and delta < delta0
    BadSetLadder ladder;
    bool eta_recursion = false;

    Rational claim_b0_bound;  ///< 6 delta n / eps
    bool claim_b0 = false;
    std::vector<LevelVerdict> claim_bm;

    std::pair<Rational, Rational> final_bound;  ///< bracket for 2 e^(-eps M / 2) + 6 delta
    double final_bound_approx = 0;
    std::vector<VertexVerdict> final_tv;  ///< v outside B^M
    std::size_t final_violations = 0;
    std::pair<Rational, Rational> no_visit_bound;  ///< bracket for 2 e^(-eps M / 2)
    std::vector<VertexVerdict> no_visit;           ///< v outside B^M
    bool visit_complement = false;                  ///< no-visit + visit = 1 at every such v

    std::size_t exceptional = 0;  ///< vertices failing the final bound, over all of V
    double exceptional_bound = 0;  ///< (delta/eps)^(1/4^M) n
    bool exceptional_holds = false;

    Value identity_lhs, identity_rhs;
    bool identity_holds = false;

    std::vector<Vertex> decomposition_samples;
    double decomposition_error = 0;
    bool decomposition_holds = false;

    std::size_t newnotion_passed = 0;
    bool newnotion_holds = false;

    std::vector<std::size_t> component_sizes;
};

inline constexpr std::size_t kDecompositionSamples = 16;
inline constexpr double kDecompositionTolerance = 1e-9;

namespace detail {

/// Decides value < 2 e^(-x) + c against a rational bracket of e^(-x); `undecided` when the
/// bracket straddles the value.
inline bool below_bracket(const Rational& v, const std::pair<Rational, Rational>& b, bool& undecided) {
    undecided = false;
    if (v < b.first) return true;
    if (v >= b.second) return false;
    undecided = true;
    return false;
}

template <WalkArithmetic Arith>
AmplificationReport verify_amplification(const Graph& g, std::size_t tau, const Rational& delta, const Rational& eps,
                                         std::size_t M) {
    const std::size_t n = g.order();
    AmplificationReport r;
    r.n = n;
    r.degree = walk_degree(g);
    r.tau = tau;
    r.M = M;
    r.eps = eps;
    r.delta = delta;
    r.backend = Arith::backend;
    r.ladder = bad_set_ladder<Arith>(g, tau, delta, eps, M);
    const auto& L = r.ladder;
    const auto& ratio = L.schedule.ratio;
    const unsigned long nn = static_cast<unsigned long>(n);
    r.hypothesis = Rational(static_cast<unsigned long>(L.A.size())) >= eps * nn;
    if (eps < make_rational(1, 4)) {
        r.delta0 = mixcert::delta0(eps, M);
        r.delta_feasible = r.delta0.value ? delta < *r.delta0.value : std::log10(delta.get_d()) < r.delta0.log10;
    }
    r.eta_recursion = eta_recursion_holds(L.schedule);

    r.claim_b0_bound = 6 * delta * nn / eps;
    r.claim_b0_bound.canonicalize();
    r.claim_b0 = Rational(static_cast<unsigned long>(L.B[0].size())) < r.claim_b0_bound;
    for (std::size_t i = 0; i <= M; ++i) {
        const std::size_t size = L.cumulative[i].size();
        r.claim_bm.push_back({i, size, L.schedule.values[i] * static_cast<double>(n),
                              eta_compare(make_rational(size, n), i, ratio) < 0});
    }

    const Rational x = eps * static_cast<unsigned long>(M) / 2;
    const auto e = exp_neg_bounds(x);
    r.no_visit_bound = {2 * e.first, 2 * e.second};
    r.final_bound = {2 * e.first + 6 * delta, 2 * e.second + 6 * delta};
    r.final_bound_approx = 2 * std::exp(-x.get_d()) + 6 * delta.get_d();

    // TV at (M+1) tau for every vertex, taboo chains for vertices outside B^M.
    const std::size_t horizon = (M + 1) * tau;
    std::vector<typename Arith::value_type> tv(n), stay(n);
    std::vector<char> complement_ok(n, 1);
    const VertexSet& top = L.cumulative.back();
    parallel_for(n, [&](std::size_t i) {
        const Vertex v = static_cast<Vertex>(i);
        tv[v] = tv_to_uniform(distribution_at<Arith>(g, v, horizon));
        if (top.contains(v)) return;
        auto run = taboo_chain<Arith>(g, v, L.A, tau, M);
        stay[v] = run.survivor.total();
        if constexpr (Arith::backend == Backend::exact) {
            Rational total = stay[v];
            for (const auto& a : run.absorbed) total += a.total();
            complement_ok[v] = total == 1;
        } else {
            double total = stay[v];
            for (const auto& a : run.absorbed) total += a.total();
            complement_ok[v] = std::abs(total - 1) <= kDecompositionTolerance;
        }
    });
    auto judge = [&](const typename Arith::value_type& value, const std::pair<Rational, Rational>& bracket,
                     double approx_bound) {
        VertexVerdict out;
        if constexpr (Arith::backend == Backend::exact) {
            out.value = Value::of(value);
            out.holds = below_bracket(value, bracket, out.borderline);
        } else {
            out.value = Value::of(value);
            out.holds = value < approx_bound;
            out.borderline = std::abs(value - approx_bound) <= float_guard();
        }
        return out;
    };
    r.visit_complement = true;
    for (Vertex v = 0; v < n; ++v) {
        auto verdict = judge(tv[v], r.final_bound, r.final_bound_approx);
        if (!verdict.holds) ++r.exceptional;
        if (top.contains(v)) continue;
        verdict.vertex = v;
        if (!verdict.holds) ++r.final_violations;
        r.final_tv.push_back(verdict);
        auto nv = judge(stay[v], r.no_visit_bound, 2 * std::exp(-x.get_d()));
        nv.vertex = v;
        r.no_visit.push_back(nv);
        if (!complement_ok[v]) r.visit_complement = false;
    }
    r.exceptional_bound = std::pow(ratio.get_d(), std::pow(0.25, static_cast<double>(M))) * static_cast<double>(n);
    // |E| <= ratio^(1/4^M) n  iff  (|E|/n)^(4^M) <= ratio
    r.exceptional_holds = pow(make_rational(r.exceptional, n), 1ul << (2 * M)) <= ratio;

    // sum over v in A of Pr[Q_v^tau in B_0] against sum over v in B_0 of Pr[Q_v^tau in A]
    {
        auto from_a = pushed_indicator<Arith>(g, L.A, tau);
        auto from_b = pushed_indicator<Arith>(g, L.B[0], tau);
        auto lhs = from_a.mass(L.B[0]), rhs = from_b.mass(L.A);
        if constexpr (Arith::backend == Backend::exact) {
            r.identity_lhs = Value::of(lhs);
            r.identity_rhs = Value::of(rhs);
            r.identity_holds = lhs == rhs;
        } else {
            r.identity_lhs = Value::of(lhs);
            r.identity_rhs = Value::of(rhs);
            r.identity_holds = std::abs(lhs - rhs) <= kDecompositionTolerance * std::max(1.0, std::abs(lhs));
        }
    }

    // Pr[Q_v^((M+1)tau) = w] recomposed from first visits to A plus the surviving mass.
    for (Vertex v = 0; v < n && r.decomposition_samples.size() < kDecompositionSamples; ++v)
        if (!top.contains(v)) r.decomposition_samples.push_back(v);
    std::vector<double> errors(r.decomposition_samples.size(), 0);
    parallel_for(r.decomposition_samples.size(), [&](std::size_t s) {
        const Vertex v = r.decomposition_samples[s];
        auto run = taboo_chain<Arith>(g, v, L.A, tau, M);
        auto direct = distribution_at<Arith>(g, v, horizon);
        std::vector<typename Arith::weight_type> sum(n, typename Arith::weight_type(0));
        auto add = [&](Distribution<Arith> part, std::size_t steps) {
            advance(g, part, steps);
            if (part.scale != direct.scale) throw Error("internal: decomposition scales differ");
            for (Vertex w = 0; w < n; ++w) sum[w] += part.weight[w];
        };
        for (std::size_t i = 0; i < M; ++i) add(run.absorbed[i], (M - i) * tau);
        add(run.survivor, tau);
        double worst = 0;
        for (Vertex w = 0; w < n; ++w) {
            if constexpr (Arith::backend == Backend::exact) {
                worst = std::max(worst, std::abs(make_rational(sum[w] - direct.weight[w], direct.scale).get_d()));
            } else {
                worst = std::max(worst, std::abs(sum[w] - direct.weight[w]) / direct.scale);
            }
        }
        errors[s] = worst;
    });
    for (double e2 : errors) r.decomposition_error = std::max(r.decomposition_error, e2);
    r.decomposition_holds = r.decomposition_error <= kDecompositionTolerance;

    // members of A are (tau, eps, 2 delta / eps)-mixing
    const Rational del = 2 * delta / eps;
    auto members = L.A.members();
    std::vector<char> passed(members.size(), 1);
    if (del < 1) {
        parallel_for(members.size(), [&](std::size_t i) {
            passed[i] = is_mixing_vertex<Arith>(g, members[i], tau, eps, del);
        });
    }
    for (char p : passed) r.newnotion_passed += p;
    r.newnotion_holds = r.newnotion_passed == members.size();

    auto cd = components(g);
    r.component_sizes = cd.sizes;
    return r;
}

}  // namespace detail

/// Evaluates every quantitative claim of the amplification argument on one instance. The
/// run proceeds whatever (eps, delta, M) are; hypothesis and delta_feasible are reported.
inline AmplificationReport verify_amplification(const Graph& g, std::size_t tau, const Rational& delta,
                                                const Rational& eps, std::size_t M, Backend backend = Backend::exact) {
    if (tau < 1 || M < 1) throw InvalidArgument("need tau >= 1 and M >= 1");
    if (eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1) throw InvalidArgument("need eps, delta in (0,1)");
    return with_backend(backend,
                        [&]<typename A>(A) { return detail::verify_amplification<A>(g, tau, delta, eps, M); });
}

}  // namespace mixcert
