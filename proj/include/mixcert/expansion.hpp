#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "walk.hpp"

namespace mixcert {

enum class SearchMode { exact, sweep, sampled };

inline std::string_view to_string(SearchMode m) {
    switch (m) {
        case SearchMode::exact: return "exact";
        case SearchMode::sweep: return "sweep";
        case SearchMode::sampled: return "sampled";
    }
    return "unknown";
}

inline SearchMode parse_search_mode(std::string_view text) {
    if (text == "exact") return SearchMode::exact;
    if (text == "sweep") return SearchMode::sweep;
    if (text == "sampled") return SearchMode::sampled;
    throw InvalidArgument("unknown mode '" + std::string(text) + "'");
}

/// Largest vertex count for which subsets are enumerated exhaustively.
inline constexpr std::size_t kExactSubsetLimit = 26;

/// Settings for the heuristic (non-exhaustive) searches.
struct SweepOptions {
    double eigen_tolerance = 1e-8;
    std::size_t eigen_max_iterations = 100000;
    std::size_t random_orders = 32;
    std::size_t random_sets = 10000;
    std::uint64_t seed = 1;
};

namespace detail {

struct MaskGraph {
    std::vector<std::uint32_t> adj;
    std::vector<unsigned> deg;
};

inline MaskGraph mask_graph(const Graph& g) {
    if (g.order() > 32) throw TooLarge("bitmask enumeration needs at most 32 vertices");
    MaskGraph m;
    m.adj.assign(g.order(), 0);
    m.deg.assign(g.order(), 0);
    for (Vertex v = 0; v < g.order(); ++v) {
        for (Vertex w : g.neighbors(v)) m.adj[v] |= std::uint32_t{1} << w;
        m.deg[v] = static_cast<unsigned>(g.degree(v));
    }
    return m;
}

inline unsigned mask_boundary(const MaskGraph& m, std::uint32_t mask) {
    unsigned b = 0;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
        unsigned v = static_cast<unsigned>(std::countr_zero(rest));
        b += static_cast<unsigned>(std::popcount(m.adj[v] & ~mask));
    }
    return b;
}

/// Visits every subset of the first `bits` vertices in Gray-code order as
/// visit(mask, size, boundary). The index range is split into contiguous chunks that run
/// in parallel, each with its own copy of `proto`; the per-chunk accumulators are returned
/// in chunk order so callers can reduce deterministically.
template <typename Acc>
std::vector<Acc> scan_subsets(const MaskGraph& m, unsigned bits, const Acc& proto) {
    const std::uint64_t total = std::uint64_t{1} << bits;
    const unsigned chunk_bits = std::min(bits, 6u);
    const std::uint64_t chunks = std::uint64_t{1} << chunk_bits;
    const std::uint64_t per_chunk = total / chunks;
    std::vector<Acc> accs(chunks, proto);
    parallel_for(chunks, [&](std::size_t c) {
        Acc& acc = accs[c];
        const std::uint64_t begin = c * per_chunk, end = begin + per_chunk;
        auto mask = static_cast<std::uint32_t>(begin ^ (begin >> 1));
        unsigned size = static_cast<unsigned>(std::popcount(mask));
        unsigned boundary = mask_boundary(m, mask);
        for (std::uint64_t i = begin;;) {
            acc.visit(mask, size, boundary);
            if (++i == end) break;
            const unsigned v = static_cast<unsigned>(std::countr_zero(i));
            const std::uint32_t bit = std::uint32_t{1} << v;
            const unsigned inside = static_cast<unsigned>(std::popcount(m.adj[v] & mask));
            if (mask & bit) {
                mask ^= bit;
                boundary = boundary + 2 * inside - m.deg[v];
                --size;
            } else {
                mask ^= bit;
                boundary = boundary + m.deg[v] - 2 * inside;
                ++size;
            }
        }
    });
    return accs;
}

/// Lexicographic order on sorted member lists for equal-size sets: the set holding the
/// lowest element of the symmetric difference comes first.
inline bool lex_less(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    return diff && (a & (diff & (~diff + 1)));
}

inline bool lex_less(const VertexSet& a, const VertexSet& b) {
    for (Vertex v = 0; v < std::min(a.universe(), b.universe()); ++v)
        if (a.contains(v) != b.contains(v)) return a.contains(v);
    return false;
}

/// Ratio boundary/size, smallest first; ties by smaller size, then lexicographic.
struct RatioKey {
    std::uint64_t boundary = 0;
    std::uint64_t size = 0;

    bool ratio_less(const RatioKey& o) const { return boundary * o.size < o.boundary * size; }
    bool ratio_equal(const RatioKey& o) const { return boundary * o.size == o.boundary * size; }
};

}  // namespace detail

/// A vertex set with its edge boundary, as found by a search.
struct CutCandidate {
    VertexSet set;
    std::size_t boundary = 0;

    Rational ratio() const { return make_rational(static_cast<long>(boundary), set.size()); }
};

/// Minimum of e(X, V \ X)/|X| over sets with lo <= |X| <= hi, from a given search.
struct RatioSearch {
    std::optional<CutCandidate> best;
    std::uint64_t candidates = 0;
    SearchMode mode = SearchMode::exact;
};

namespace detail {

inline bool candidate_better(const CutCandidate& a, const CutCandidate& b) {
    RatioKey ka{a.boundary, a.set.size()}, kb{b.boundary, b.set.size()};
    if (ka.ratio_less(kb)) return true;
    if (!ka.ratio_equal(kb)) return false;
    if (a.set.size() != b.set.size()) return a.set.size() < b.set.size();
    return lex_less(a.set, b.set);
}

inline void offer(std::optional<CutCandidate>& best, CutCandidate c) {
    if (!best || candidate_better(c, *best)) best = std::move(c);
}

struct MinRatioAcc {
    unsigned lo = 0, hi = 0;
    bool found = false;
    std::uint32_t mask = 0;
    unsigned size = 0, boundary = 0;
    std::uint64_t seen = 0;

    void visit(std::uint32_t m, unsigned s, unsigned b) {
        if (s < lo || s > hi) return;
        ++seen;
        if (!found || better(m, s, b)) {
            found = true;
            mask = m;
            size = s;
            boundary = b;
        }
    }

    bool better(std::uint32_t m, unsigned s, unsigned b) const {
        RatioKey k{b, s}, cur{boundary, size};
        if (k.ratio_less(cur)) return true;
        if (!k.ratio_equal(cur)) return false;
        if (s != size) return s < size;
        return lex_less(m, mask);
    }
};

inline RatioSearch exact_min_ratio(const Graph& g, std::size_t lo, std::size_t hi) {
    if (g.order() > kExactSubsetLimit)
        throw TooLarge("exact enumeration needs n <= " + std::to_string(kExactSubsetLimit));
    auto m = mask_graph(g);
    MinRatioAcc proto;
    proto.lo = static_cast<unsigned>(lo);
    proto.hi = static_cast<unsigned>(hi);
    auto accs = scan_subsets(m, static_cast<unsigned>(g.order()), proto);
    MinRatioAcc best = proto;
    for (const auto& a : accs) {
        best.seen += a.seen;
        if (a.found && (!best.found || best.better(a.mask, a.size, a.boundary))) {
            best.found = true;
            best.mask = a.mask;
            best.size = a.size;
            best.boundary = a.boundary;
        }
    }
    RatioSearch out;
    out.mode = SearchMode::exact;
    out.candidates = best.seen;
    if (best.found) out.best = CutCandidate{VertexSet::from_mask(g.order(), best.mask), best.boundary};
    return out;
}

/// Scans every prefix of `order` and offers those with size in [lo, hi].
inline std::uint64_t sweep_prefixes(const Graph& g, std::span<const Vertex> order, std::size_t lo, std::size_t hi,
                                    std::optional<CutCandidate>& best) {
    VertexSet prefix(g.order());
    long boundary = 0;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < order.size() && i < hi; ++i) {
        Vertex v = order[i];
        long inside = 0;
        for (Vertex w : g.neighbors(v)) inside += prefix.contains(w);
        boundary += static_cast<long>(g.degree(v)) - 2 * inside;
        prefix.insert(v);
        if (i + 1 >= lo) {
            ++seen;
            offer(best, CutCandidate{prefix, static_cast<std::size_t>(boundary)});
        }
    }
    return seen;
}

}  // namespace detail

/// Approximate second eigenvector of the lazy normalised walk operator, by power iteration
/// with the stationary direction projected out. Returns vertices sorted by their entry.
inline std::vector<Vertex> spectral_order(const Graph& g, const SweepOptions& opt = {}) {
    const std::size_t n = g.order();
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    if (n < 3 || g.edge_count() == 0) return order;
    std::vector<double> root(n), x(n), next(n);
    double norm = 0;
    for (Vertex v = 0; v < n; ++v) {
        root[v] = std::sqrt(static_cast<double>(g.degree(v)));
        norm += root[v] * root[v];
    }
    for (double& r : root) r /= std::sqrt(norm);
    Rng rng(opt.seed);
    for (double& xi : x) xi = rng.unit() - 0.5;
    auto project = [&](std::vector<double>& y) {
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += y[i] * root[i];
        double len = 0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] -= dot * root[i];
            len += y[i] * y[i];
        }
        len = std::sqrt(len);
        if (len > 0)
            for (double& yi : y) yi /= len;
    };
    project(x);
    for (std::size_t it = 0; it < opt.eigen_max_iterations; ++it) {
        for (Vertex v = 0; v < n; ++v) {
            double s = 0;
            const double dv = static_cast<double>(g.degree(v));
            for (Vertex w : g.neighbors(v)) s += x[w] / std::sqrt(dv * static_cast<double>(g.degree(w)));
            next[v] = 0.5 * (x[v] + s);
        }
        project(next);
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) change += (next[i] - x[i]) * (next[i] - x[i]);
        x.swap(next);
        if (std::sqrt(change) < opt.eigen_tolerance) break;
    }
    std::vector<double> key(n);
    for (Vertex v = 0; v < n; ++v) key[v] = g.degree(v) ? x[v] / root[v] : 0.0;
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return key[a] < key[b]; });
    return order;
}

/// Minimum-ratio set e(X, V\X)/|X| over lo <= |X| <= hi. Exact mode enumerates all subsets
/// (n <= 26); sweep mode takes spectral and random-order prefix cuts, greedy growth from
/// every singleton, and seeded random sets. Sweep results are upper bounds only.
inline RatioSearch min_ratio_set(const Graph& g, std::size_t lo, std::size_t hi, SearchMode mode,
                                 const SweepOptions& opt = {}) {
    const std::size_t n = g.order();
    if (lo < 1 || lo > hi || hi > n / 2)
        throw InvalidArgument("size range must satisfy 1 <= lo <= hi <= n/2");
    if (mode == SearchMode::exact) return detail::exact_min_ratio(g, lo, hi);

    RatioSearch out;
    out.mode = mode;
    std::optional<CutCandidate> best;
    auto order = spectral_order(g, opt);
    out.candidates += detail::sweep_prefixes(g, order, lo, hi, best);
    std::vector<Vertex> reversed(order.rbegin(), order.rend());
    out.candidates += detail::sweep_prefixes(g, reversed, lo, hi, best);
    Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t r = 0; r < opt.random_orders; ++r) {
        std::vector<Vertex> perm(n);
        std::iota(perm.begin(), perm.end(), Vertex{0});
        rng.shuffle(std::span<Vertex>(perm));
        out.candidates += detail::sweep_prefixes(g, perm, lo, hi, best);
    }
    // Greedy growth: from each singleton, repeatedly add the outside vertex that lowers the
    // boundary most (lowest label on ties) and offer each prefix in range.
    std::vector<std::vector<Vertex>> orders(n);
    parallel_for(n, [&](std::size_t s) {
        VertexSet in(n);
        std::vector<long> inside_count(n, 0);
        std::vector<Vertex>& seq = orders[s];
        Vertex v = static_cast<Vertex>(s);
        while (true) {
            in.insert(v);
            seq.push_back(v);
            for (Vertex w : g.neighbors(v)) ++inside_count[w];
            if (seq.size() >= hi) break;
            // Adding u changes the boundary by deg(u) - 2 * (neighbors of u inside).
            long best_delta = 0;
            std::optional<Vertex> pick;
            for (Vertex u = 0; u < n; ++u) {
                if (in.contains(u)) continue;
                long delta = static_cast<long>(g.degree(u)) - 2 * inside_count[u];
                if (!pick || delta < best_delta) {
                    best_delta = delta;
                    pick = u;
                }
            }
            if (!pick) break;
            v = *pick;
        }
    });
    for (const auto& seq : orders) out.candidates += detail::sweep_prefixes(g, seq, lo, hi, best);
    for (std::size_t r = 0; r < opt.random_sets; ++r) {
        std::size_t size = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
        std::vector<Vertex> perm(n);
        std::iota(perm.begin(), perm.end(), Vertex{0});
        for (std::size_t i = 0; i < size; ++i) std::swap(perm[i], perm[i + rng.below(n - i)]);
        VertexSet x = VertexSet::of(n, std::span<const Vertex>(perm.data(), size));
        ++out.candidates;
        detail::offer(best, CutCandidate{x, edge_boundary(g, x)});
    }
    out.best = std::move(best);
    return out;
}

struct ConductanceResult {
    Rational value;  ///< n * e(A, A^c) / (D |A| (n - |A|))
    VertexSet argmin;
    SearchMode mode = SearchMode::exact;
    std::uint64_t candidate_count = 0;
};

/// n * e(A, A^c) / (D |A| (n - |A|)), recomputed from the graph.
inline Rational conductance_of(const Graph& g, const VertexSet& a) {
    const std::size_t n = g.order(), d = g.regular_degree(), s = a.size();
    return make_rational(BigInt(static_cast<unsigned long>(n * edge_boundary(g, a))),
                         BigInt(static_cast<unsigned long>(d * s * (n - s))));
}

namespace detail {
struct ConductanceAcc {
    unsigned n = 0;
    std::uint32_t full = 0;
    bool found = false;
    std::uint32_t rep = 0;  // reported side
    unsigned boundary = 0, size = 0;
    std::uint64_t seen = 0;

    // compares e / (a (n - a)) with the reported-side size and mask as tie-breaks
    bool better(unsigned b, unsigned s, std::uint32_t r) const {
        const std::uint64_t lhs = std::uint64_t{b} * size * (n - size);
        const std::uint64_t rhs = std::uint64_t{boundary} * s * (n - s);
        if (lhs != rhs) return lhs < rhs;
        const unsigned rs = static_cast<unsigned>(std::popcount(r)), cs = static_cast<unsigned>(std::popcount(rep));
        if (rs != cs) return rs < cs;
        return lex_less(r, rep);
    }

    void visit(std::uint32_t mask, unsigned s, unsigned b) {
        if (s == 0) return;
        ++seen;
        std::uint32_t r = mask;
        if (2 * s > n || (2 * s == n && !(mask & 1u))) r = full ^ mask;
        if (!found || better(b, s, r)) {
            found = true;
            rep = r;
            boundary = b;
            size = s;
        }
    }
};
}  // namespace detail

/// Conductance phi(G) of a regular graph. Exact mode enumerates all 2^(n-1) - 1 cuts
/// (n <= 26) and reports the smaller side of the minimising cut. A disconnected graph
/// gives 0 with a component as argmin.
inline ConductanceResult conductance(const Graph& g, SearchMode mode, const SweepOptions& opt = {}) {
    const std::size_t n = g.order();
    if (!g.is_regular() || g.regular_degree() == 0) throw GraphKindError("conductance needs a regular graph of positive degree");
    if (n < 2) throw InvalidArgument("conductance needs n >= 2");
    ConductanceResult out;
    out.mode = mode == SearchMode::exact ? SearchMode::exact : SearchMode::sweep;
    if (mode == SearchMode::exact) {
        if (n > kExactSubsetLimit) throw TooLarge("exact conductance needs n <= " + std::to_string(kExactSubsetLimit));
        auto m = detail::mask_graph(g);
        detail::ConductanceAcc proto;
        proto.n = static_cast<unsigned>(n);
        proto.full = n == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << n) - 1;
        auto accs = detail::scan_subsets(m, static_cast<unsigned>(n - 1), proto);
        detail::ConductanceAcc best = proto;
        for (const auto& a : accs) {
            best.seen += a.seen;
            if (a.found && (!best.found || best.better(a.boundary, a.size, a.rep))) {
                best.found = true;
                best.rep = a.rep;
                best.boundary = a.boundary;
                best.size = a.size;
            }
        }
        out.argmin = VertexSet::from_mask(n, best.rep);
        out.candidate_count = best.seen;
    } else {
        std::optional<CutCandidate> best;
        auto consider = [&](std::span<const Vertex> order) {
            VertexSet prefix(n);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                prefix.insert(order[i]);
                ++out.candidate_count;
                VertexSet side = 2 * prefix.size() <= n ? prefix : prefix.complement();
                CutCandidate c{side, 0};
                Rational value = conductance_of(g, side);
                if (!best || value < conductance_of(g, best->set) ||
                    (value == conductance_of(g, best->set) && detail::candidate_better(c, *best)))
                    best = c;
            }
        };
        auto order = spectral_order(g, opt);
        consider(order);
        Rng rng(opt.seed ^ 0x51ed270b27a3f6c9ULL);
        for (std::size_t r = 0; r < opt.random_orders; ++r) {
            std::vector<Vertex> perm(n);
            std::iota(perm.begin(), perm.end(), Vertex{0});
            rng.shuffle(std::span<Vertex>(perm));
            consider(perm);
        }
        out.argmin = best->set;
    }
    out.value = conductance_of(g, out.argmin);
    return out;
}

enum class Verdict { certified, certified_sampled, violated };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::certified_sampled: return "certified (sampled)";
        case Verdict::violated: return "violated";
    }
    return "unknown";
}

/// Claim that e(X, V\X) >= c|X| for every X with size_lo <= |X| <= size_hi.
struct ExpansionCertificate {
    Rational bound;
    std::size_t size_lo = 1, size_hi = 1;
    SearchMode mode = SearchMode::exact;
    Verdict verdict = Verdict::certified;
    std::optional<VertexSet> witness;           ///< violating set, boundary recomputed
    std::optional<std::size_t> witness_boundary;
    std::optional<CutCandidate> min_ratio_set;  ///< smallest ratio seen over the range
    std::uint64_t enumerated = 0;

    bool holds() const { return verdict != Verdict::violated; }
};

/// Checks e(X, V\X) >= c|X| over lo <= |X| <= hi. Exact mode is exhaustive and only it
/// may return Verdict::certified.
inline ExpansionCertificate check_edge_expansion(const Graph& g, const Rational& c, std::size_t lo, std::size_t hi,
                                                 SearchMode mode, const SweepOptions& opt = {}) {
    if (lo < 1 || lo > hi || hi > g.order() / 2)
        throw InvalidArgument("size range must satisfy 1 <= lo <= hi <= n/2");
    ExpansionCertificate cert;
    cert.bound = c;
    cert.size_lo = lo;
    cert.size_hi = hi;
    cert.mode = mode;
    auto search = min_ratio_set(g, lo, hi, mode, opt);
    cert.enumerated = search.candidates;
    cert.min_ratio_set = search.best;
    const bool violated = search.best && search.best->ratio() < c;
    if (violated) {
        cert.verdict = Verdict::violated;
        cert.witness = search.best->set;
        cert.witness_boundary = edge_boundary(g, search.best->set);
        const auto size = cert.witness->size();
        if (!(Rational(static_cast<unsigned long>(*cert.witness_boundary)) < c * static_cast<unsigned long>(size)) ||
            size < lo || size > hi)
            throw Error("internal: expansion witness failed recomputation");
    } else {
        cert.verdict = mode == SearchMode::exact ? Verdict::certified : Verdict::certified_sampled;
    }
    return cert;
}

/// Verdict of 1/phi < mix < 16 log2(n) / phi^2 on one graph.
struct SandwichReport {
    bool applicable = false;  ///< false when some vertex hit the mixing cap
    Rational phi;
    std::size_t mix = 0;
    Rational lower;       ///< 1 / phi
    double upper = 0;     ///< 16 log2(n) / phi^2
    bool holds = false;
    ConductanceResult conductance;
    Backend backend = Backend::exact;
};

inline SandwichReport sandwich_check(const Graph& g, std::size_t t_max, Backend backend,
                                     const Rational& threshold = make_rational(1, 4)) {
    SandwichReport r;
    r.backend = backend;
    r.conductance = conductance(g, SearchMode::exact);
    r.phi = r.conductance.value;
    with_backend(backend, [&]<typename A>(A) {
        auto profile = mixing_profile<A>(g, 0, threshold, t_max);
        r.applicable = !profile.any_capped();
        r.mix = profile.max_mixing_time();
    });
    if (!r.applicable || r.phi == 0) {
        r.applicable = false;
        return r;
    }
    r.lower = 1 / r.phi;
    r.upper = 16.0 * std::log2(static_cast<double>(g.order())) / (r.phi.get_d() * r.phi.get_d());
    r.holds = r.lower < static_cast<unsigned long>(r.mix) && static_cast<double>(r.mix) < r.upper;
    return r;
}

}  // namespace mixcert
