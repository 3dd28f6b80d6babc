#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "expansion.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace mixcert {

inline constexpr std::size_t kExactSeparatorLimit = 22;

/// A vertex set whose removal leaves every component with at most 2n/3 vertices.
struct SeparatorResult {
    VertexSet separator;
    std::size_t largest_remaining = 0;
    double largest_remaining_fraction = 0;
    SearchMode mode = SearchMode::exact;
    std::uint64_t candidates = 0;
};

/// Largest component of G - S, by an independent traversal.
inline std::size_t largest_component_without(const Graph& g, const VertexSet& removed) {
    std::vector<char> seen(g.order(), 0);
    std::vector<Vertex> stack;
    std::size_t largest = 0;
    for (Vertex root = 0; root < g.order(); ++root) {
        if (seen[root] || removed.contains(root)) continue;
        std::size_t size = 0;
        seen[root] = 1;
        stack.push_back(root);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            ++size;
            for (Vertex w : g.neighbors(v))
                if (!seen[w] && !removed.contains(w)) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        largest = std::max(largest, size);
    }
    return largest;
}

/// Whether every component left after deleting `s` has at most 2n/3 vertices.
inline bool is_separator(const Graph& g, const VertexSet& s) {
    return 3 * largest_component_without(g, s) <= 2 * g.order();
}

namespace detail {

inline unsigned largest_component_mask(const MaskGraph& m, std::uint32_t alive) {
    unsigned largest = 0;
    while (alive) {
        std::uint32_t comp = alive & (~alive + 1), frontier = comp;
        while (frontier) {
            std::uint32_t grow = 0;
            for (std::uint32_t f = frontier; f; f &= f - 1) grow |= m.adj[std::countr_zero(f)];
            frontier = grow & alive & ~comp;
            comp |= frontier;
        }
        largest = std::max(largest, static_cast<unsigned>(std::popcount(comp)));
        alive &= ~comp;
    }
    return largest;
}

inline SeparatorResult finish_separator(const Graph& g, VertexSet s, SearchMode mode, std::uint64_t candidates) {
    SeparatorResult r;
    r.largest_remaining = largest_component_without(g, s);
    if (3 * r.largest_remaining > 2 * g.order()) throw Error("internal: separator failed revalidation");
    r.separator = std::move(s);
    r.largest_remaining_fraction = static_cast<double>(r.largest_remaining) / static_cast<double>(g.order());
    r.mode = mode;
    r.candidates = candidates;
    return r;
}

/// The vertices of `side` with a neighbor outside it.
inline VertexSet inner_boundary(const Graph& g, const VertexSet& side) {
    VertexSet out(g.order());
    for (Vertex v : side.members())
        for (Vertex w : g.neighbors(v))
            if (!side.contains(w)) {
                out.insert(v);
                break;
            }
    return out;
}

}  // namespace detail

/// Smallest separator. Exact mode tries all sets by increasing size, lexicographically within
/// a size (n <= 22). Heuristic mode turns balanced prefix cuts of spectral and BFS orders into
/// vertex separators by taking one side's inner boundary. Results are revalidated.
inline SeparatorResult find_separator(const Graph& g, SearchMode mode, const SweepOptions& opt = {}) {
    const std::size_t n = g.order();
    if (n < 3) throw InvalidArgument("separator search needs n >= 3");
    if (mode == SearchMode::exact) {
        if (n > kExactSeparatorLimit)
            throw TooLarge("exact separator search needs n <= " + std::to_string(kExactSeparatorLimit));
        auto m = detail::mask_graph(g);
        const std::uint32_t full = (std::uint32_t{1} << n) - 1;
        std::uint64_t checked = 0;
        for (unsigned size = 0; size <= n; ++size) {
            // Gosper's hack visits masks of a fixed popcount in increasing numeric order; the
            // bit-reversed view gives lexicographic order of sorted member lists.
            std::vector<std::uint32_t> found;
            if (size == 0) {
                ++checked;
                if (3 * detail::largest_component_mask(m, full) <= 2 * n) found.push_back(0);
            } else {
                std::uint32_t s = (std::uint32_t{1} << size) - 1;
                while (s <= full) {
                    ++checked;
                    if (3 * detail::largest_component_mask(m, full & ~s) <= 2 * n) found.push_back(s);
                    std::uint32_t c = s & (~s + 1), r = s + c;
                    s = (((r ^ s) >> 2) / c) | r;
                    if (s == 0) break;
                }
            }
            if (!found.empty()) {
                std::uint32_t best = found.front();
                for (auto f : found)
                    if (detail::lex_less(f, best)) best = f;
                return detail::finish_separator(g, VertexSet::from_mask(n, best), SearchMode::exact, checked);
            }
        }
        throw Error("internal: no separator found");
    }

    std::optional<VertexSet> best;
    std::uint64_t candidates = 0;
    auto offer = [&](VertexSet s) {
        ++candidates;
        if (!is_separator(g, s)) return;
        if (!best || s.size() < best->size()) best = std::move(s);
    };
    auto consider = [&](std::span<const Vertex> order) {
        VertexSet prefix(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            prefix.insert(order[i]);
            const std::size_t a = prefix.size(), b = n - a;
            if (3 * a > 2 * n || 3 * b > 2 * n) continue;
            offer(detail::inner_boundary(g, prefix));
            offer(detail::inner_boundary(g, prefix.complement()));
        }
    };
    consider(spectral_order(g, opt));
    Rng rng(opt.seed ^ 0x2545f4914f6cdd1dULL);
    for (std::size_t r = 0; r < opt.random_orders; ++r) {
        // breadth-first order from a random root, neighbors shuffled
        std::vector<Vertex> order;
        std::vector<char> seen(n, 0);
        std::vector<Vertex> roots(n);
        std::iota(roots.begin(), roots.end(), Vertex{0});
        rng.shuffle(std::span<Vertex>(roots));
        for (Vertex root : roots) {
            if (seen[root]) continue;
            seen[root] = 1;
            std::size_t head = order.size();
            order.push_back(root);
            while (head < order.size()) {
                Vertex v = order[head++];
                std::vector<Vertex> nb(g.neighbors(v).begin(), g.neighbors(v).end());
                rng.shuffle(std::span<Vertex>(nb));
                for (Vertex w : nb)
                    if (!seen[w]) {
                        seen[w] = 1;
                        order.push_back(w);
                    }
            }
        }
        consider(order);
    }
    if (!best) {
        // fall back to deleting all but floor(2n/3) vertices
        VertexSet s(n);
        for (Vertex v = static_cast<Vertex>(2 * n / 3); v < n; ++v) s.insert(v);
        best = s;
        ++candidates;
    }
    return detail::finish_separator(g, *best, SearchMode::sweep, candidates);
}

}  // namespace mixcert
