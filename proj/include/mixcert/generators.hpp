#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace mixcert {

enum class ConstructionKind {
    hypercube,
    random_regular,
    expander_plus_clique,
    matched_expanders,
    merged_expanders,
    complete,
    cycle,
};

inline constexpr std::pair<ConstructionKind, std::string_view> kConstructionNames[] = {
    {ConstructionKind::hypercube, "hypercube"},
    {ConstructionKind::random_regular, "random_regular"},
    {ConstructionKind::expander_plus_clique, "expander_plus_clique"},
    {ConstructionKind::matched_expanders, "matched_expanders"},
    {ConstructionKind::merged_expanders, "merged_expanders"},
    {ConstructionKind::complete, "complete"},
    {ConstructionKind::cycle, "cycle"},
};

inline std::string_view to_string(ConstructionKind kind) {
    for (auto [k, name] : kConstructionNames)
        if (k == kind) return name;
    return "unknown";
}

/// A named construction and its integer parameters (n, D, m, seed).
struct ConstructionSpec {
    ConstructionKind kind = ConstructionKind::complete;
    std::map<std::string, std::uint64_t> parameters;

    std::optional<std::uint64_t> get(const std::string& key) const {
        auto it = parameters.find(key);
        if (it == parameters.end()) return std::nullopt;
        return it->second;
    }

    std::uint64_t require(const std::string& key) const {
        auto value = get(key);
        if (!value) throw InvalidArgument(std::string(to_string(kind)) + " needs parameter " + key);
        return *value;
    }

    /// Canonical single-line descriptor, e.g. "merged_expanders:D=8,m=32,n=512,seed=7".
    std::string descriptor() const {
        std::string out(to_string(kind));
        char sep = ':';
        for (const auto& [key, value] : parameters) {
            out += sep;
            out += key + "=" + std::to_string(value);
            sep = ',';
        }
        return out;
    }
};

inline ConstructionSpec parse_construction(std::string_view text) {
    ConstructionSpec spec;
    auto colon = text.find(':');
    std::string_view name = detail::trim(text.substr(0, colon));
    bool known = false;
    for (auto [k, n] : kConstructionNames) {
        if (n == name) {
            spec.kind = k;
            known = true;
        }
    }
    if (!known) throw ParseError(0, "unknown construction '" + std::string(name) + "'");
    if (colon == std::string_view::npos) return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string_view item = detail::trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError(0, "expected key=value in '" + std::string(item) + "'");
        std::string key(detail::trim(item.substr(0, eq)));
        auto value = detail::parse_label(detail::trim(item.substr(eq + 1)));
        if (!value) throw ParseError(0, "parameter " + key + " is not a nonnegative integer");
        if (key != "n" && key != "D" && key != "m" && key != "seed")
            throw ParseError(0, "unknown construction parameter '" + key + "'");
        spec.parameters[key] = *value;
    }
    return spec;
}

namespace detail {

inline constexpr std::size_t kPairingAttempts = 10000;

/// One sequential-pairing attempt (Steger-Wormald): draw two unpaired points uniformly,
/// keep the pair if it creates neither a loop nor a repeated edge, redraw otherwise.
/// Returns nullopt at a dead end, where no compatible pair remains.
inline std::optional<std::vector<Edge>> try_pairing(std::span<const std::size_t> degree,
                                                    const std::vector<std::vector<Vertex>>& existing,
                                                    Rng& rng) {
    std::vector<Vertex> points;
    for (Vertex v = 0; v < degree.size(); ++v) points.insert(points.end(), degree[v], v);
    std::vector<std::vector<Vertex>> added(degree.size());
    auto adjacent = [&](Vertex a, Vertex b) {
        auto contains = [](const std::vector<Vertex>& list, Vertex x) {
            return std::find(list.begin(), list.end(), x) != list.end();
        };
        return contains(added[a], b) || (a < existing.size() && contains(existing[a], b));
    };
    auto compatible = [&](Vertex a, Vertex b) { return a != b && !adjacent(a, b); };
    std::vector<Edge> edges;
    edges.reserve(points.size() / 2);
    std::size_t misses = 0;
    while (!points.empty()) {
        std::size_t i = rng.below(points.size());
        std::size_t j = rng.below(points.size() - 1);
        if (j >= i) ++j;
        Vertex a = points[i], b = points[j];
        if (compatible(a, b)) {
            edges.emplace_back(std::min(a, b), std::max(a, b));
            added[a].push_back(b);
            added[b].push_back(a);
            for (std::size_t k : {std::max(i, j), std::min(i, j)}) {
                points[k] = points.back();
                points.pop_back();
            }
            misses = 0;
            continue;
        }
        if (++misses < 64) continue;
        misses = 0;
        bool any = false;
        for (std::size_t x = 0; x < points.size() && !any; ++x)
            for (std::size_t y = x + 1; y < points.size() && !any; ++y) any = compatible(points[x], points[y]);
        if (!any) return std::nullopt;
    }
    return edges;
}

/// Random simple graph with the given degree sequence avoiding `existing` edges.
inline std::vector<Edge> random_with_degrees(std::span<const std::size_t> degree,
                                             const std::vector<std::vector<Vertex>>& existing, Rng& rng) {
    std::size_t total = std::accumulate(degree.begin(), degree.end(), std::size_t{0});
    if (total % 2) throw InvalidArgument("degree sum is odd");
    for (std::size_t attempt = 1; attempt <= kPairingAttempts; ++attempt)
        if (auto edges = try_pairing(degree, existing, rng)) return *std::move(edges);
    throw GenerationError("random pairing never produced a simple graph", kPairingAttempts);
}

inline std::vector<Edge> random_regular_edges(std::size_t n, std::size_t d, Rng& rng) {
    if (d >= n) throw InvalidArgument("random_regular needs D < n");
    if ((n * d) % 2) throw InvalidArgument("random_regular needs n*D even");
    std::vector<std::size_t> degree(n, d);
    return random_with_degrees(degree, {}, rng);
}

inline void append_clique(std::vector<Edge>& edges, Vertex first, std::size_t size) {
    for (Vertex i = 0; i < size; ++i)
        for (Vertex j = i + 1; j < size; ++j) edges.emplace_back(first + i, first + j);
}

}  // namespace detail

inline Graph hypercube(std::size_t dimension) {
    if (dimension > 24) throw InvalidArgument("hypercube dimension above 24");
    std::size_t n = std::size_t{1} << dimension;
    std::vector<Edge> edges;
    for (Vertex v = 0; v < n; ++v)
        for (std::size_t i = 0; i < dimension; ++i) {
            Vertex w = v ^ (Vertex{1} << i);
            if (v < w) edges.emplace_back(v, w);
        }
    return Graph::from_edges(n, edges);
}

inline Graph complete_graph(std::size_t n) {
    if (n == 0) throw InvalidArgument("complete graph needs n >= 1");
    std::vector<Edge> edges;
    detail::append_clique(edges, 0, n);
    return Graph::from_edges(n, edges);
}

inline Graph cycle_graph(std::size_t n) {
    if (n < 3) throw InvalidArgument("cycle needs n >= 3");
    std::vector<Edge> edges;
    for (Vertex v = 0; v < n; ++v) edges.emplace_back(v, static_cast<Vertex>((v + 1) % n));
    return Graph::from_edges(n, edges);
}

inline Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    return Graph::from_edges(n, detail::random_regular_edges(n, d, rng));
}

/// Random D-regular graph on n-(D+1) vertices plus a disjoint K_{D+1} on the top labels.
inline Graph expander_plus_clique(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (n < 2 * (d + 1) + 1) throw InvalidArgument("expander_plus_clique needs n > 2(D+1)");
    std::size_t big = n - (d + 1);
    if ((big * d) % 2) throw InvalidArgument("expander_plus_clique needs (n-D-1)*D even");
    Rng rng(seed);
    auto edges = detail::random_regular_edges(big, d, rng);
    detail::append_clique(edges, static_cast<Vertex>(big), d + 1);
    return Graph::from_edges(n, edges);
}

/// Two random (D-1)-regular graphs on n vertices each (labels [0,n) and [n,2n)) joined by a
/// random perfect matching across the halves. The result is D-regular on 2n vertices.
inline Graph matched_expanders(std::size_t n, std::size_t d, std::uint64_t seed) {
    if (d < 2 || d - 1 >= n) throw InvalidArgument("matched_expanders needs 2 <= D <= n");
    if ((n * (d - 1)) % 2) throw InvalidArgument("matched_expanders needs n*(D-1) even");
    Rng rng(seed);
    auto edges = detail::random_regular_edges(n, d - 1, rng);
    for (auto [u, v] : detail::random_regular_edges(n, d - 1, rng))
        edges.emplace_back(static_cast<Vertex>(u + n), static_cast<Vertex>(v + n));
    std::vector<Vertex> partner(n);
    std::iota(partner.begin(), partner.end(), Vertex{0});
    rng.shuffle(std::span<Vertex>(partner));
    for (Vertex i = 0; i < n; ++i) edges.emplace_back(i, static_cast<Vertex>(n + partner[i]));
    return Graph::from_edges(2 * n, edges);
}

/// Two random D/2-regular graphs G1, G2 on n vertices whose first n/m vertices are
/// identified pairwise (vertex i of G1 with vertex i of G2), giving 2n - n/m vertices.
/// Labels: G1 keeps [0, n); the unmerged part of G2 becomes [n, 2n - n/m). Degree
/// deficits are then filled by a seeded random simple completion inside each side, so no
/// edge joins the unmerged parts of G1 and G2 and every degree becomes exactly D.
inline Graph merged_expanders(std::size_t n, std::size_t d, std::size_t m, std::uint64_t seed) {
    if (d < 2 || d % 2) throw InvalidArgument("merged_expanders needs an even D >= 2");
    if (m == 0 || n % m) throw InvalidArgument("merged_expanders needs m dividing n");
    const std::size_t merged = n / m;
    const std::size_t half = d / 2;
    if (half >= n) throw InvalidArgument("merged_expanders needs D/2 < n");
    if (((n - merged) * half) % 2) throw InvalidArgument("merged_expanders needs (n - n/m)*D/2 even");
    if (merged == n) throw InvalidArgument("merged_expanders needs m >= 2");
    Rng rng(seed);
    const std::size_t total = 2 * n - merged;
    auto relabel_second = [&](Vertex v) { return v < merged ? v : static_cast<Vertex>(n + (v - merged)); };

    std::vector<std::vector<Vertex>> adj(total);
    auto add = [&](Vertex a, Vertex b) {
        if (std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) return;
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (auto [u, v] : detail::random_regular_edges(n, half, rng)) add(u, v);
    for (auto [u, v] : detail::random_regular_edges(n, half, rng)) add(relabel_second(u), relabel_second(v));

    // Side one: unmerged G1 vertices plus any merged vertex that lost degree to a shared edge.
    std::vector<std::size_t> deficit_one(total, 0), deficit_two(total, 0);
    for (Vertex v = 0; v < total; ++v) {
        std::size_t missing = d - adj[v].size();
        (v >= n ? deficit_two : deficit_one)[v] = missing;
    }
    for (auto [u, v] : detail::random_with_degrees(deficit_one, adj, rng)) add(u, v);
    for (auto [u, v] : detail::random_with_degrees(deficit_two, adj, rng)) add(u, v);

    std::vector<Edge> edges;
    for (Vertex v = 0; v < total; ++v)
        for (Vertex w : adj[v])
            if (v < w) edges.emplace_back(v, w);
    return Graph::from_edges(total, edges);
}

inline Graph generate(const ConstructionSpec& spec) {
    auto seed = [&] { return spec.require("seed"); };
    switch (spec.kind) {
        case ConstructionKind::hypercube:
            return hypercube(spec.require("D"));
        case ConstructionKind::complete:
            return complete_graph(spec.require("n"));
        case ConstructionKind::cycle:
            return cycle_graph(spec.require("n"));
        case ConstructionKind::random_regular:
            return random_regular(spec.require("n"), spec.require("D"), seed());
        case ConstructionKind::expander_plus_clique:
            return expander_plus_clique(spec.require("n"), spec.require("D"), seed());
        case ConstructionKind::matched_expanders:
            return matched_expanders(spec.require("n"), spec.require("D"), seed());
        case ConstructionKind::merged_expanders:
            return merged_expanders(spec.require("n"), spec.require("D"), spec.require("m"), seed());
    }
    throw InvalidArgument("unknown construction");
}

inline Graph generate(std::string_view descriptor) { return generate(parse_construction(descriptor)); }

}  // namespace mixcert
