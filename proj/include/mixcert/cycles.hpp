#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expansion.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "walk.hpp"

namespace mixcert {

/// A cycle v_0 v_1 ... v_{L-1} v_0 on distinct vertices, L >= 3.
struct CycleWitness {
    std::vector<Vertex> vertices;
    std::size_t length() const noexcept { return vertices.size(); }
};

/// Checks the cycle invariants edge by edge. Independent of every search routine.
inline bool is_valid_cycle(const Graph& g, std::span<const Vertex> cycle) {
    const std::size_t len = cycle.size();
    if (len < 3) return false;
    std::vector<char> seen(g.order(), 0);
    for (Vertex v : cycle) {
        if (v >= g.order() || seen[v]) return false;
        seen[v] = 1;
    }
    for (std::size_t i = 0; i < len; ++i)
        if (!g.has_edge(cycle[i], cycle[(i + 1) % len])) return false;
    return true;
}

inline void validate_cycle(const Graph& g, const CycleWitness& c) {
    if (!is_valid_cycle(g, c.vertices)) throw Error("internal: cycle failed validation");
}

enum class ConditionMode { exact, sampled };

inline std::string_view to_string(ConditionMode m) { return m == ConditionMode::exact ? "exact" : "sampled"; }

/// |N(W)| >= ell for every W with k/2 <= |W| <= k.
struct NeighborhoodCondition {
    std::size_t k = 0, ell = 0;
    ConditionMode mode = ConditionMode::exact;
    bool holds = true;
    std::optional<VertexSet> witness;  ///< a W with |N(W)| < ell, recomputed
    std::uint64_t checked = 0;
};

inline constexpr double kExactConditionBudget = 1e8;
inline constexpr std::size_t kConditionSamples = 100000;

/// Sum of C(n, s) over ceil(k/2) <= s <= k, as a double.
inline double condition_subset_count(std::size_t n, std::size_t k) {
    double total = 0;
    for (std::size_t s = (k + 1) / 2; s <= k; ++s) {
        double c = 1;
        for (std::size_t i = 0; i < s; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
        total += c;
    }
    return total;
}

inline bool exact_condition_feasible(std::size_t n, std::size_t k) {
    return n <= 64 && condition_subset_count(n, k) <= kExactConditionBudget;
}

namespace detail {

struct ConditionScan {
    const std::vector<std::uint64_t>& adj;
    std::size_t n, lo, hi, ell;
    std::uint64_t checked = 0;
    std::optional<std::uint64_t> found;

    // Depth-first over increasing labels, so subsets come out in lexicographic order.
    bool visit(std::uint64_t set, std::uint64_t nbr, std::size_t size, std::size_t next) {
        if (size >= lo) {
            ++checked;
            if (static_cast<std::size_t>(std::popcount(nbr & ~set)) < ell) {
                found = set;
                return true;
            }
        }
        if (size == hi) return false;
        for (std::size_t v = next; v < n; ++v)
            if (visit(set | (std::uint64_t{1} << v), nbr | adj[v], size + 1, v + 1)) return true;
        return false;
    }
};

}  // namespace detail

/// Verifies the neighborhood condition. Exact mode enumerates every W in lexicographic
/// order and reports the first failure; sampled mode draws 1e5 seeded random W.
inline NeighborhoodCondition verify_neighborhood_condition(const Graph& g, std::size_t k, std::size_t ell,
                                                           ConditionMode mode, std::uint64_t seed = 1) {
    const std::size_t n = g.order();
    if (k == 0 || k >= n) throw InvalidArgument("need 0 < k < n");
    if (ell < 2) throw InvalidArgument("need ell >= 2");
    NeighborhoodCondition out;
    out.k = k;
    out.ell = ell;
    out.mode = mode;
    const std::size_t lo = (k + 1) / 2;
    if (mode == ConditionMode::exact) {
        if (!exact_condition_feasible(n, k))
            throw TooLarge("exact neighborhood check needs n <= 64 and at most 1e8 subsets");
        std::vector<std::uint64_t> adj(n, 0);
        for (Vertex v = 0; v < n; ++v)
            for (Vertex w : g.neighbors(v)) adj[v] |= std::uint64_t{1} << w;
        std::vector<detail::ConditionScan> scans(n, detail::ConditionScan{adj, n, lo, k, ell, 0, std::nullopt});
        parallel_for(n, [&](std::size_t first) {
            scans[first].visit(std::uint64_t{1} << first, adj[first], 1, first + 1);
        });
        for (auto& s : scans) {
            out.checked += s.checked;
            if (!out.witness && s.found) {
                VertexSet w(n);
                for (std::uint64_t m = *s.found; m; m &= m - 1) w.insert(static_cast<Vertex>(std::countr_zero(m)));
                out.witness = w;
            }
        }
    } else {
        Rng rng(seed);
        std::vector<Vertex> pool(n);
        for (Vertex v = 0; v < n; ++v) pool[v] = v;
        for (std::size_t t = 0; t < kConditionSamples && !out.witness; ++t) {
            const std::size_t size = lo + static_cast<std::size_t>(rng.below(k - lo + 1));
            for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
            ++out.checked;
            auto w = VertexSet::of(n, std::span<const Vertex>(pool.data(), size));
            if (neighborhood(g, w).size() < ell) out.witness = w;
        }
    }
    if (out.witness) {
        const std::size_t s = out.witness->size();
        if (neighborhood(g, *out.witness).size() >= ell || 2 * s < k || s > k)
            throw Error("internal: neighborhood witness failed recomputation");
        out.holds = false;
    }
    return out;
}

/// Raised when the depth-first search finds no cycle of length at least ell+1. Carries the
/// longest cycle seen and the set W produced by the search bookkeeping; when |N(W)| < ell the
/// neighborhood precondition is violated and W shows it.
class LongCycleNotFound : public Error {
public:
    LongCycleNotFound(std::optional<CycleWitness> best, std::optional<VertexSet> w, bool precondition_violated)
        : Error(precondition_violated ? "no cycle of the requested length; neighborhood condition fails"
                                      : "no cycle of the requested length; re-examine the precondition"),
          best_(std::move(best)), w_(std::move(w)), violated_(precondition_violated) {}
    const std::optional<CycleWitness>& best() const noexcept { return best_; }
    const std::optional<VertexSet>& witness() const noexcept { return w_; }
    bool precondition_violated() const noexcept { return violated_; }

private:
    std::optional<CycleWitness> best_;
    std::optional<VertexSet> w_;
    bool violated_;
};

namespace detail {

struct DfsForest {
    std::vector<std::int64_t> parent;  // -1 for roots
    std::vector<std::size_t> depth;
    std::vector<Vertex> postorder;
    std::optional<CycleWitness> found, best;
};

/// Depth-first search, roots and neighbors in ascending order. Every back edge closes the
/// stack segment into a cycle; the first one of length >= target stops the search.
inline DfsForest dfs_cycles(const Graph& g, std::size_t target) {
    const std::size_t n = g.order();
    DfsForest f;
    f.parent.assign(n, -1);
    f.depth.assign(n, 0);
    std::vector<char> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<Vertex> path;
    std::vector<std::size_t> cursor(n, 0);
    for (Vertex root = 0; root < n; ++root) {
        if (state[root]) continue;
        state[root] = 1;
        path.push_back(root);
        while (!path.empty()) {
            const Vertex v = path.back();
            auto nb = g.neighbors(v);
            if (cursor[v] == nb.size()) {
                state[v] = 2;
                f.postorder.push_back(v);
                path.pop_back();
                continue;
            }
            const Vertex w = nb[cursor[v]++];
            if (state[w] == 0) {
                state[w] = 1;
                f.parent[w] = v;
                f.depth[w] = f.depth[v] + 1;
                path.push_back(w);
            } else if (state[w] == 1 && static_cast<std::int64_t>(w) != f.parent[v]) {
                const std::size_t len = f.depth[v] - f.depth[w] + 1;
                if (f.best && f.best->length() >= len) continue;
                CycleWitness c;
                c.vertices.assign(path.end() - static_cast<std::ptrdiff_t>(len), path.end());
                f.best = c;
                if (len >= target) {
                    f.found = std::move(c);
                    return f;
                }
            }
        }
    }
    return f;
}

/// The set W of the constructive argument, built from a complete DFS forest: the first vertex x
/// in postorder whose subtree has at least ceil(k/2) vertices contributes whole child subtrees
/// until the size reaches ceil(k/2) (or its entire subtree); without such x, whole trees are
/// combined. Every outside neighbor of W is then an ancestor of x.
inline VertexSet proof_witness(const Graph& g, const DfsForest& f, std::size_t k) {
    const std::size_t n = g.order(), half = (k + 1) / 2;
    std::vector<std::size_t> sub(n, 1);
    std::vector<std::vector<Vertex>> children(n);
    for (Vertex v : f.postorder)
        if (f.parent[v] >= 0) {
            sub[f.parent[v]] += sub[v];
            children[f.parent[v]].push_back(v);
        }
    auto collect = [&](Vertex top, VertexSet& into) {
        std::vector<Vertex> stack{top};
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            into.insert(v);
            for (Vertex c : children[v]) stack.push_back(c);
        }
    };
    VertexSet w(n);
    for (Vertex x : f.postorder) {
        if (sub[x] < half) continue;
        for (Vertex c : children[x]) {
            collect(c, w);
            if (w.size() >= half) return w;
        }
        w.insert(x);
        return w;
    }
    for (Vertex v : f.postorder)
        if (f.parent[v] < 0) {
            collect(v, w);
            if (w.size() >= half) return w;
        }
    return w;
}

}  // namespace detail

/// A cycle of length at least ell+1 by depth-first search (first qualifying back-edge cycle).
/// When none exists the search bookkeeping yields W with k/2 <= |W| <= k whose outside
/// neighbors all lie on one root path; if |N(W)| >= ell the topmost of them would close a
/// cycle of length >= ell+1, so failure implies |N(W)| < ell.
inline CycleWitness find_long_cycle(const Graph& g, std::size_t k, std::size_t ell) {
    if (k == 0 || g.order() <= k) throw InvalidArgument("need 0 < k < n");
    if (ell < 2) throw InvalidArgument("need ell >= 2");
    auto forest = detail::dfs_cycles(g, ell + 1);
    if (forest.found) {
        validate_cycle(g, *forest.found);
        return *forest.found;
    }
    auto w = detail::proof_witness(g, forest, k);
    const bool violated = neighborhood(g, w).size() < ell;
    throw LongCycleNotFound(forest.best, w, violated);
}

inline constexpr std::size_t kCycleOracleLimit = 16;

/// Longest cycle by exhaustive search; empty for forests. Paths start at their smallest vertex
/// and a cycle is counted in one direction only.
inline std::optional<CycleWitness> longest_cycle_oracle(const Graph& g) {
    const std::size_t n = g.order();
    if (n > kCycleOracleLimit) throw TooLarge("longest-cycle oracle needs n <= 16");
    std::vector<std::uint32_t> adj(n, 0);
    for (Vertex v = 0; v < n; ++v)
        for (Vertex w : g.neighbors(v)) adj[v] |= std::uint32_t{1} << w;
    std::vector<Vertex> path, best;
    std::function<void(std::uint32_t, std::uint32_t)> extend = [&](std::uint32_t used, std::uint32_t allowed) {
        const Vertex last = path.back(), start = path.front();
        if (path.size() >= 3 && (adj[last] >> start & 1) && path[1] < last && path.size() > best.size()) best = path;
        if (path.size() + static_cast<std::size_t>(std::popcount(allowed & ~used)) <= best.size()) return;
        for (std::uint32_t next = adj[last] & allowed & ~used; next; next &= next - 1) {
            const Vertex w = static_cast<Vertex>(std::countr_zero(next));
            path.push_back(w);
            extend(used | std::uint32_t{1} << w, allowed);
            path.pop_back();
        }
    };
    const std::uint32_t full = n == 32 ? ~0u : (std::uint32_t{1} << n) - 1;
    for (Vertex s = 0; s < n; ++s) {
        if (n - s <= best.size()) break;
        const std::uint32_t allowed = full & ~((std::uint32_t{1} << s) - 1);
        path.assign(1, s);
        extend(std::uint32_t{1} << s, allowed);
    }
    if (best.empty()) return std::nullopt;
    CycleWitness c{best};
    validate_cycle(g, c);
    return c;
}

/// How the neighborhood condition on the giant component was justified.
enum class ConditionSource { verified, failed, theorem_implied };

inline std::string_view to_string(ConditionSource s) {
    switch (s) {
        case ConditionSource::verified: return "verified";
        case ConditionSource::failed: return "failed";
        case ConditionSource::theorem_implied: return "theorem_implied";
    }
    return "unknown";
}

struct CycleTrace {
    std::size_t n = 0;
    std::size_t giant = 0;  ///< n*
    std::size_t k = 0, ell = 0;
    std::size_t well_mixing = 0;
    ConditionSource source = ConditionSource::theorem_implied;
    std::optional<NeighborhoodCondition> condition;
    Rational required;  ///< eps n / (40 tau)
    bool exceeds_required = false;
};

struct CycleResult {
    CycleWitness cycle;  ///< labels of the input graph
    CycleTrace trace;
};

/// Mixing to a long cycle: on the giant component take k = floor(n*/2) and
/// ell = ceil(eps n / (40 tau)) + 1, verify the neighborhood condition when the exact check
/// is affordable, and run the depth-first search.
/// Throws HypothesisError when fewer than eps*n vertices have ||Q_v^tau - U|| < 1/30.
inline CycleResult mixing_to_cycle(const Graph& g, const Rational& eps, std::size_t tau,
                                   Backend backend = Backend::exact) {
    if (eps <= 0 || eps >= 1 || tau < 1) throw InvalidArgument("need eps in (0,1) and tau >= 1");
    const std::size_t n = g.order();
    CycleResult out;
    auto& tr = out.trace;
    tr.n = n;
    tr.well_mixing = well_mixing_set(g, tau, make_rational(1, 30), backend).members.size();
    const Rational needed = eps * static_cast<unsigned long>(n);
    if (Rational(static_cast<unsigned long>(tr.well_mixing)) < needed)
        throw HypothesisError("cycle hypothesis not met", tr.well_mixing, needed.get_d());

    auto cd = components(g);
    auto core = induced(g, cd.members(cd.giant));
    tr.giant = core.graph.order();
    tr.required = eps * static_cast<unsigned long>(n) / static_cast<unsigned long>(40 * tau);
    tr.required.canonicalize();
    tr.k = tr.giant / 2;
    tr.ell = static_cast<std::size_t>(mixcert::ceil(tr.required).get_ui()) + 1;
    if (tr.k == 0) throw InvalidArgument("giant component too small for a cycle");
    if (exact_condition_feasible(tr.giant, tr.k)) {
        tr.condition = verify_neighborhood_condition(core.graph, tr.k, tr.ell, ConditionMode::exact);
        tr.source = tr.condition->holds ? ConditionSource::verified : ConditionSource::failed;
    }
    auto cycle = find_long_cycle(core.graph, tr.k, tr.ell);
    for (Vertex& v : cycle.vertices) v = core.to_parent[v];
    validate_cycle(g, cycle);
    out.cycle = std::move(cycle);
    tr.exceeds_required = Rational(static_cast<unsigned long>(out.cycle.length())) > tr.required;
    return out;
}

}  // namespace mixcert
