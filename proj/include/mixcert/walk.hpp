#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace mixcert {

enum class Backend { exact, float64 };

inline std::string_view to_string(Backend b) { return b == Backend::exact ? "exact" : "float"; }

inline Backend parse_backend(std::string_view text) {
    if (text == "exact") return Backend::exact;
    if (text == "float" || text == "float64") return Backend::float64;
    throw InvalidArgument("unknown backend '" + std::string(text) + "'");
}

/// Exact rationals for small instances, float64 otherwise.
inline Backend default_backend(std::size_t n, std::size_t horizon) {
    return n <= 64 && horizon <= 64 ? Backend::exact : Backend::float64;
}

namespace detail {
inline std::atomic<double>& float_guard_setting() {
    static std::atomic<double> value{1e-10};
    return value;
}
}  // namespace detail

/// Float-backend comparisons closer than this to a threshold are flagged as borderline.
inline double float_guard() { return detail::float_guard_setting(); }
inline void set_float_guard(double tolerance) { detail::float_guard_setting() = tolerance; }

/// Exact arithmetic: a distribution at time t is an integer vector over the common
/// denominator scale = (initial scale) * D^t, so each step is a pure integer update.
struct ExactArith {
    using weight_type = BigInt;
    using value_type = Rational;
    static constexpr Backend backend = Backend::exact;

    static void after_step(std::vector<BigInt>&, BigInt& scale, std::size_t degree) { scale *= degree; }
    static Rational ratio(const BigInt& num, const BigInt& den) { return make_rational(num, den); }
    static Rational from(const Rational& q) { return q; }
    static bool less(const Rational& a, const Rational& b) { return a < b; }
    static bool borderline(const Rational&, const Rational&) { return false; }
};

struct FloatArith {
    using weight_type = double;
    using value_type = double;
    static constexpr Backend backend = Backend::float64;

    static void after_step(std::vector<double>& weight, double&, std::size_t degree) {
        const double inv = 1.0 / static_cast<double>(degree);
        for (double& w : weight) w *= inv;
    }
    static double ratio(double num, double den) { return num / den; }
    static double from(const Rational& q) { return q.get_d(); }
    static bool less(double a, double b) { return a < b; }
    static bool borderline(double a, double b) { return std::abs(a - b) <= float_guard(); }
};

template <typename A>
concept WalkArithmetic = std::same_as<A, ExactArith> || std::same_as<A, FloatArith>;

/// Runs fn(ExactArith{}) or fn(FloatArith{}) according to `backend`.
template <typename Fn>
decltype(auto) with_backend(Backend backend, Fn&& fn) {
    if (backend == Backend::exact) return fn(ExactArith{});
    return fn(FloatArith{});
}

/// Probability vector Q over the vertices at walk time `time`: mass(u) = weight[u] / scale.
template <WalkArithmetic Arith>
struct Distribution {
    using weight_type = typename Arith::weight_type;
    using value_type = typename Arith::value_type;

    std::vector<weight_type> weight;
    weight_type scale{1};
    std::size_t time = 0;
    std::optional<Vertex> origin;  ///< start vertex; empty for mixtures

    static constexpr Backend backend = Arith::backend;

    static Distribution point(std::size_t n, Vertex v) {
        if (v >= n) throw InvalidArgument("start vertex outside the graph");
        Distribution d;
        d.weight.assign(n, weight_type(0));
        d.weight[v] = weight_type(1);
        d.origin = v;
        return d;
    }

    static Distribution uniform(std::size_t n) {
        Distribution d;
        d.weight.assign(n, weight_type(1));
        d.scale = weight_type(static_cast<unsigned long>(n));
        if constexpr (Arith::backend == Backend::float64) {
            for (auto& w : d.weight) w /= static_cast<double>(n);
            d.scale = 1.0;
        }
        return d;
    }

    std::size_t size() const noexcept { return weight.size(); }
    value_type mass(Vertex u) const { return Arith::ratio(weight[u], scale); }

    value_type mass(const VertexSet& s) const {
        weight_type sum(0);
        for (Vertex u = 0; u < size(); ++u)
            if (s.contains(u)) sum += weight[u];
        return Arith::ratio(sum, scale);
    }

    value_type total() const {
        weight_type sum(0);
        for (const auto& w : weight) sum += w;
        return Arith::ratio(sum, scale);
    }
};

using ExactDistribution = Distribution<ExactArith>;
using FloatDistribution = Distribution<FloatArith>;

namespace detail {
inline std::size_t walk_degree(const Graph& g) {
    if (!g.is_regular()) throw GraphKindError("the nearest-neighbor walk needs a regular graph");
    std::size_t d = g.regular_degree();
    if (d == 0) throw GraphKindError("the nearest-neighbor walk needs degree at least 1");
    return d;
}

/// One forward step of a nonnegative measure (push along every edge), without rescaling.
template <typename W>
std::vector<W> push(const Graph& g, const std::vector<W>& mass) {
    std::vector<W> next(mass.size(), W(0));
    for (Vertex v = 0; v < g.order(); ++v) {
        if (mass[v] == 0) continue;
        for (Vertex w : g.neighbors(v)) next[w] += mass[v];
    }
    return next;
}

/// One application of the adjacency operator to a function on vertices (pull form).
template <typename W>
std::vector<W> pull(const Graph& g, const std::vector<W>& f) {
    std::vector<W> next(f.size(), W(0));
    for (Vertex v = 0; v < g.order(); ++v)
        for (Vertex w : g.neighbors(v)) next[v] += f[w];
    return next;
}
}  // namespace detail

/// One step of the nearest-neighbor walk: mass(u) <- sum over v adjacent to u of mass(v)/D.
template <WalkArithmetic Arith>
Distribution<Arith> step(const Graph& g, const Distribution<Arith>& d) {
    const std::size_t degree = detail::walk_degree(g);
    if (d.size() != g.order()) throw InvalidArgument("distribution does not match the graph");
    Distribution<Arith> out;
    out.weight = detail::push(g, d.weight);
    out.scale = d.scale;
    out.time = d.time + 1;
    out.origin = d.origin;
    Arith::after_step(out.weight, out.scale, degree);
    return out;
}

/// Advances `d` by `steps` walk steps in place.
template <WalkArithmetic Arith>
void advance(const Graph& g, Distribution<Arith>& d, std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) d = step(g, d);
}

/// Q_v^t, the law of the walk started at v after t steps.
template <WalkArithmetic Arith>
Distribution<Arith> distribution_at(const Graph& g, Vertex v, std::size_t t) {
    detail::walk_degree(g);
    auto d = Distribution<Arith>::point(g.order(), v);
    advance(g, d, t);
    return d;
}

/// Total variation distance, half the L1 distance.
template <WalkArithmetic Arith>
typename Arith::value_type tv_distance(const Distribution<Arith>& p, const Distribution<Arith>& q) {
    if (p.size() != q.size()) throw InvalidArgument("distributions have different lengths");
    if constexpr (Arith::backend == Backend::exact) {
        BigInt sum(0), diff;
        for (std::size_t i = 0; i < p.size(); ++i) {
            diff = p.weight[i] * q.scale - q.weight[i] * p.scale;
            sum += abs(diff);
        }
        return make_rational(sum, BigInt(2 * p.scale * q.scale));
    } else {
        double sum = 0;
        for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.weight[i] / p.scale - q.weight[i] / q.scale);
        return sum / 2;
    }
}

/// ||d - U|| against the uniform distribution on all vertices.
template <WalkArithmetic Arith>
typename Arith::value_type tv_to_uniform(const Distribution<Arith>& d) {
    const std::size_t n = d.size();
    if constexpr (Arith::backend == Backend::exact) {
        BigInt sum(0), diff;
        const BigInt nn(static_cast<unsigned long>(n));
        for (const auto& w : d.weight) {
            diff = nn * w - d.scale;
            sum += abs(diff);
        }
        return make_rational(sum, BigInt(2 * nn * d.scale));
    } else {
        double sum = 0;
        const double u = 1.0 / static_cast<double>(n);
        for (double w : d.weight) sum += std::abs(w / d.scale - u);
        return sum / 2;
    }
}

/// Default horizon for mixing-time scans, 64 * ceil(log2 n).
inline std::size_t default_t_max(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    return 64 * std::max<std::size_t>(bits, 1);
}

template <WalkArithmetic Arith>
struct MixingTime {
    std::size_t time = 0;  ///< least t with TV < threshold, or t_max when capped
    bool capped = false;
    typename Arith::value_type tv{};  ///< TV at `time`
};

/// Least t <= t_max with ||Q_v^t - U|| < threshold. The scan is linear in t.
template <WalkArithmetic Arith>
MixingTime<Arith> vertex_mixing_time(const Graph& g, Vertex v, const Rational& threshold, std::size_t t_max) {
    if (threshold <= 0 || threshold >= 1) throw InvalidArgument("threshold must lie in (0, 1)");
    const auto limit = Arith::from(threshold);
    auto d = distribution_at<Arith>(g, v, 0);
    for (std::size_t t = 0;; ++t) {
        auto tv = tv_to_uniform(d);
        if (Arith::less(tv, limit)) return {t, false, tv};
        if (t == t_max) return {t, true, tv};
        d = step(g, d);
    }
}

template <WalkArithmetic Arith>
struct MixingRecord {
    Vertex vertex = 0;
    typename Arith::value_type tv_at_tau{};
    std::size_t mixing_time = 0;  ///< equals t_max when capped
    bool capped = false;
    bool borderline = false;  ///< float backend: tv_at_tau within the guard band of delta
};

template <WalkArithmetic Arith>
struct MixingProfile {
    std::vector<MixingRecord<Arith>> records;
    std::size_t tau = 0;
    Rational threshold = make_rational(1, 4);
    std::size_t t_max = 0;
    static constexpr Backend backend = Arith::backend;

    bool any_capped() const {
        return std::any_of(records.begin(), records.end(), [](const auto& r) { return r.capped; });
    }
    /// mix(G): the largest per-vertex mixing time; meaningful only when nothing is capped.
    std::size_t max_mixing_time() const {
        std::size_t m = 0;
        for (const auto& r : records) m = std::max(m, r.mixing_time);
        return m;
    }
};

/// Per-vertex TV at time tau and mixing time at `threshold`, one independent walk per start vertex.
template <WalkArithmetic Arith>
MixingProfile<Arith> mixing_profile(const Graph& g, std::size_t tau, const Rational& threshold,
                                    std::size_t t_max) {
    detail::walk_degree(g);
    if (threshold <= 0 || threshold >= 1) throw InvalidArgument("threshold must lie in (0, 1)");
    MixingProfile<Arith> profile;
    profile.tau = tau;
    profile.threshold = threshold;
    profile.t_max = t_max;
    profile.records.resize(g.order());
    const auto limit = Arith::from(threshold);
    parallel_for(g.order(), [&](std::size_t i) {
        const auto v = static_cast<Vertex>(i);
        auto& rec = profile.records[i];
        rec.vertex = v;
        auto d = Distribution<Arith>::point(g.order(), v);
        bool found = false;
        for (std::size_t t = 0; !(found && t > tau); ++t) {
            auto tv = tv_to_uniform(d);
            if (t == tau) rec.tv_at_tau = tv;
            if (!found && Arith::less(tv, limit)) {
                rec.mixing_time = t;
                found = true;
            }
            if (!found && t == t_max) {
                rec.mixing_time = t_max;
                rec.capped = true;
                found = true;
            }
            if (found && t >= tau) break;
            d = step(g, d);
        }
    });
    return profile;
}

/// ||Q_v^tau - U|| for every start vertex v.
template <WalkArithmetic Arith>
std::vector<typename Arith::value_type> tv_at(const Graph& g, std::size_t tau) {
    detail::walk_degree(g);
    std::vector<typename Arith::value_type> out(g.order());
    parallel_for(g.order(), [&](std::size_t v) {
        out[v] = tv_to_uniform(distribution_at<Arith>(g, static_cast<Vertex>(v), tau));
    });
    return out;
}

/// { v : ||Q_v^tau - U|| < delta }, strict. Vertices whose float TV lies within the guard
/// band of delta are reported in `borderline`.
struct WellMixingSet {
    VertexSet members;
    VertexSet borderline;
    Backend backend = Backend::exact;
};

template <WalkArithmetic Arith>
WellMixingSet well_mixing_set_from(const std::vector<typename Arith::value_type>& tv, const Rational& delta) {
    WellMixingSet out{VertexSet(tv.size()), VertexSet(tv.size()), Arith::backend};
    const auto limit = Arith::from(delta);
    for (Vertex v = 0; v < tv.size(); ++v) {
        if (Arith::less(tv[v], limit)) out.members.insert(v);
        if (Arith::borderline(tv[v], limit)) out.borderline.insert(v);
    }
    return out;
}

template <WalkArithmetic Arith>
WellMixingSet well_mixing_set(const Graph& g, std::size_t tau, const Rational& delta) {
    return well_mixing_set_from<Arith>(tv_at<Arith>(g, tau), delta);
}

inline WellMixingSet well_mixing_set(const Graph& g, std::size_t tau, const Rational& delta, Backend backend) {
    return with_backend(backend, [&]<typename A>(A) { return well_mixing_set<A>(g, tau, delta); });
}

/// Whether Q_v^tau(u) lies in [(1-eps)/n, (1+eps)/n] for all but at most del*n vertices u.
template <WalkArithmetic Arith>
bool is_mixing_vertex(const Distribution<Arith>& q, const Rational& eps, const Rational& del) {
    if (eps <= 0 || eps >= 1 || del < 0 || del >= 1) throw InvalidArgument("eps must lie in (0,1) and del in [0,1)");
    const std::size_t n = q.size();
    std::size_t outside = 0;
    if constexpr (Arith::backend == Backend::exact) {
        // n*w*den against (den -/+ num)*scale.
        const BigInt num = eps.get_num(), den = eps.get_den();
        const BigInt lo = (den - num) * q.scale, hi = (den + num) * q.scale;
        for (const auto& w : q.weight) {
            BigInt lhs = w * static_cast<unsigned long>(n) * den;
            if (lhs < lo || lhs > hi) ++outside;
        }
    } else {
        const double e = eps.get_d(), nn = static_cast<double>(n);
        for (double w : q.weight) {
            double p = w / q.scale;
            if (p < (1 - e) / nn || p > (1 + e) / nn) ++outside;
        }
    }
    return Rational(static_cast<unsigned long>(outside)) <= del * static_cast<unsigned long>(n);
}

template <WalkArithmetic Arith>
bool is_mixing_vertex(const Graph& g, Vertex v, std::size_t tau, const Rational& eps, const Rational& del) {
    return is_mixing_vertex(distribution_at<Arith>(g, v, tau), eps, del);
}

/// Sum over v in `start` of Q_v^k as one unnormalised measure: 1_start pushed k steps.
template <WalkArithmetic Arith>
Distribution<Arith> pushed_indicator(const Graph& g, const VertexSet& start, std::size_t k) {
    const std::size_t degree = detail::walk_degree(g);
    Distribution<Arith> d;
    d.weight.assign(g.order(), typename Arith::weight_type(0));
    for (Vertex v : start.members()) d.weight[v] = typename Arith::weight_type(1);
    for (std::size_t i = 0; i < k; ++i) {
        d.weight = detail::push(g, d.weight);
        Arith::after_step(d.weight, d.scale, degree);
        ++d.time;
    }
    return d;
}

/// Pr[Q_v^k in target] for every v, via k applications of the transition operator to 1_target.
template <WalkArithmetic Arith>
std::vector<typename Arith::value_type> hitting_probabilities(const Graph& g, const VertexSet& target, std::size_t k) {
    const std::size_t degree = detail::walk_degree(g);
    using W = typename Arith::weight_type;
    std::vector<W> f(g.order(), W(0));
    for (Vertex v : target.members()) f[v] = W(1);
    W scale(1);
    for (std::size_t i = 0; i < k; ++i) {
        f = detail::pull(g, f);
        Arith::after_step(f, scale, degree);
    }
    std::vector<typename Arith::value_type> out(g.order());
    for (Vertex v = 0; v < g.order(); ++v) out[v] = Arith::ratio(f[v], scale);
    return out;
}

/// (1/|X|) * sum over v in X of Pr[Q_v^k in X].
template <WalkArithmetic Arith>
typename Arith::value_type stay_probability(const Graph& g, const VertexSet& x, std::size_t k) {
    if (x.empty()) throw InvalidArgument("stay probability of an empty set");
    auto d = pushed_indicator<Arith>(g, x, k);
    typename Arith::weight_type inside(0);
    for (Vertex v : x.members()) inside += d.weight[v];
    return Arith::ratio(inside, d.scale * typename Arith::weight_type(static_cast<unsigned long>(x.size())));
}

/// W_0..W_k: number of k-walks with a specified start vertex (a walk and its reverse count
/// separately). Works on any graph, regular or not.
inline std::vector<BigInt> walk_counts(const Graph& g, std::size_t k) {
    std::vector<BigInt> ends(g.order(), BigInt(1));
    std::vector<BigInt> out;
    out.reserve(k + 1);
    for (std::size_t i = 0;; ++i) {
        BigInt total(0);
        for (const auto& c : ends) total += c;
        out.push_back(total);
        if (i == k) break;
        ends = detail::pull(g, ends);
    }
    return out;
}

inline BigInt count_walks(const Graph& g, std::size_t k) { return walk_counts(g, k).back(); }

inline BigInt count_walks(const Graph& g, const VertexSet& restrict_to, std::size_t k) {
    return count_walks(induced(g, restrict_to).graph, k);
}

/// |sum_{v in A} Pr[Q_v^k in B] - sum_{v in B} Pr[Q_v^k in A]|, both sides from forward walks.
template <WalkArithmetic Arith>
typename Arith::value_type flow_symmetry_defect(const Graph& g, const VertexSet& a, const VertexSet& b, std::size_t k) {
    if (a.empty() || b.empty()) throw InvalidArgument("flow symmetry needs nonempty sets");
    auto from_a = pushed_indicator<Arith>(g, a, k);
    auto from_b = pushed_indicator<Arith>(g, b, k);
    auto lhs = from_a.mass(b);
    auto rhs = from_b.mass(a);
    if constexpr (Arith::backend == Backend::exact) {
        return abs(Rational(lhs - rhs));
    } else {
        return std::abs(lhs - rhs);
    }
}

/// Result of checking the flow identity for every pair of nonempty subsets.
struct FlowSymmetrySweep {
    Rational max_defect{0};
    std::uint64_t pairs_checked = 0;
    std::uint64_t worst_a = 0, worst_b = 0;  ///< subset masks attaining max_defect
};

/// Exact check of the flow identity over all pairs (A, B) of nonempty subsets, n <= 10.
/// Subset sums of the forward distributions are built incrementally over the masks.
inline FlowSymmetrySweep flow_symmetry_all_pairs(const Graph& g, std::size_t k) {
    const std::size_t n = g.order();
    if (n > 10) throw TooLarge("all-pairs flow symmetry needs n <= 10");
    detail::walk_degree(g);
    std::vector<std::vector<BigInt>> rows(n);
    BigInt scale(1);
    for (Vertex v = 0; v < n; ++v) {
        auto d = distribution_at<ExactArith>(g, v, k);
        rows[v] = std::move(d.weight);
        scale = d.scale;
    }
    const std::uint64_t subsets = std::uint64_t{1} << n;
    // into[B][v] = D^k * Pr[Q_v^k in B]
    std::vector<std::vector<BigInt>> into(subsets, std::vector<BigInt>(n, BigInt(0)));
    for (std::uint64_t b = 1; b < subsets; ++b) {
        const unsigned low = static_cast<unsigned>(__builtin_ctzll(b));
        const std::uint64_t rest = b & (b - 1);
        for (Vertex v = 0; v < n; ++v) into[b][v] = into[rest][v] + rows[v][low];
    }
    FlowSymmetrySweep out;
    BigInt worst(0);
    // all[B][A] = D^k * sum_{v in A} Pr[Q_v^k in B]
    std::vector<std::vector<BigInt>> all(subsets);
    for (std::uint64_t b = 1; b < subsets; ++b) {
        all[b].assign(subsets, BigInt(0));
        for (std::uint64_t a = 1; a < subsets; ++a) {
            const unsigned low = static_cast<unsigned>(__builtin_ctzll(a));
            all[b][a] = all[b][a & (a - 1)] + into[b][low];
        }
    }
    BigInt diff;
    for (std::uint64_t a = 1; a < subsets; ++a) {
        for (std::uint64_t b = 1; b < subsets; ++b) {
            diff = all[b][a] - all[a][b];
            ++out.pairs_checked;
            if (abs(diff) > worst) {
                worst = abs(diff);
                out.worst_a = a;
                out.worst_b = b;
            }
        }
    }
    out.max_defect = make_rational(worst, scale);
    return out;
}

}  // namespace mixcert
