#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace mixcert {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable simple undirected graph in compressed sparse row form.
///
/// Neighbor lists are strictly increasing, adjacency is symmetric and there are no loops.
/// Vertices are 0..order()-1.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an undirected edge list. Throws ParseError naming the
    /// 1-based position of the first loop, duplicate or out-of-range edge.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
        std::vector<std::size_t> degree(n, 0);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            if (u >= n || v >= n)
                throw ParseError(i + 1, "edge " + std::to_string(u) + " " + std::to_string(v) +
                                            " has an endpoint outside [0, " + std::to_string(n) + ")");
            if (u == v) throw ParseError(i + 1, "self-loop at vertex " + std::to_string(u));
            ++degree[u];
            ++degree[v];
        }
        Graph g;
        g.offsets_.assign(n + 1, 0);
        for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + degree[v];
        g.targets_.resize(g.offsets_[n]);
        std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [u, v] : edges) {
            g.targets_[fill[u]++] = v;
            g.targets_[fill[v]++] = u;
        }
        for (std::size_t v = 0; v < n; ++v) {
            auto first = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
            auto last = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
            std::sort(first, last);
            if (auto dup = std::adjacent_find(first, last); dup != last) {
                Vertex w = *dup;
                std::size_t line = 0;
                std::size_t seen = 0;
                for (std::size_t i = 0; i < edges.size(); ++i) {
                    auto [a, b] = edges[i];
                    if ((a == v && b == w) || (a == w && b == v)) {
                        if (++seen == 2) {
                            line = i + 1;
                            break;
                        }
                    }
                }
                throw ParseError(line, "duplicate edge " + std::to_string(std::min<std::size_t>(v, w)) +
                                           " " + std::to_string(std::max<std::size_t>(v, w)));
            }
        }
        g.finish();
        return g;
    }

    std::size_t order() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::size_t min_degree() const noexcept { return min_degree_; }
    std::size_t max_degree() const noexcept { return max_degree_; }
    bool is_regular() const noexcept { return order() > 0 && min_degree_ == max_degree_; }

    /// Common degree D; throws GraphKindError on a non-regular graph.
    std::size_t regular_degree() const {
        if (!is_regular()) throw GraphKindError("graph is not regular");
        return max_degree_;
    }

    bool has_edge(Vertex u, Vertex v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// Every edge once, as (u, v) with u < v, in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count());
        for (Vertex u = 0; u < order(); ++u)
            for (Vertex v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    void finish() {
        min_degree_ = order() ? degree(0) : 0;
        max_degree_ = min_degree_;
        for (Vertex v = 0; v < order(); ++v) {
            min_degree_ = std::min(min_degree_, degree(v));
            max_degree_ = std::max(max_degree_, degree(v));
        }
    }

    std::vector<std::size_t> offsets_;
    std::vector<Vertex> targets_;
    std::size_t min_degree_ = 0;
    std::size_t max_degree_ = 0;
};

/// Subset of the vertex set [0, n) with cached cardinality.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t universe) : member_(universe, 0) {}

    static VertexSet full(std::size_t universe) {
        VertexSet s(universe);
        std::fill(s.member_.begin(), s.member_.end(), 1);
        s.size_ = universe;
        return s;
    }

    static VertexSet of(std::size_t universe, std::span<const Vertex> members) {
        VertexSet s(universe);
        for (Vertex v : members) s.insert(v);
        return s;
    }
    static VertexSet of(std::size_t universe, std::initializer_list<Vertex> members) {
        return of(universe, std::span<const Vertex>(members.begin(), members.size()));
    }

    /// Bit i of `mask` selects vertex i; universe must be at most 64.
    static VertexSet from_mask(std::size_t universe, std::uint64_t mask) {
        VertexSet s(universe);
        for (Vertex v = 0; v < universe; ++v)
            if (mask >> v & 1u) s.insert(v);
        return s;
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (Vertex v = 0; v < universe() && v < 64; ++v)
            if (member_[v]) m |= std::uint64_t{1} << v;
        return m;
    }

    std::size_t universe() const noexcept { return member_.size(); }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    bool contains(Vertex v) const { return v < member_.size() && member_[v]; }

    void insert(Vertex v) {
        if (v >= member_.size()) throw InvalidArgument("vertex " + std::to_string(v) + " outside the universe");
        if (!member_[v]) {
            member_[v] = 1;
            ++size_;
        }
    }
    void erase(Vertex v) {
        if (contains(v)) {
            member_[v] = 0;
            --size_;
        }
    }

    std::vector<Vertex> members() const {
        std::vector<Vertex> out;
        out.reserve(size_);
        for (Vertex v = 0; v < member_.size(); ++v)
            if (member_[v]) out.push_back(v);
        return out;
    }

    VertexSet complement() const {
        VertexSet c(universe());
        for (Vertex v = 0; v < universe(); ++v)
            if (!member_[v]) c.insert(v);
        return c;
    }

    VertexSet& operator|=(const VertexSet& other) {
        for (Vertex v = 0; v < std::min(universe(), other.universe()); ++v)
            if (other.member_[v]) insert(v);
        return *this;
    }

    bool is_subset_of(const VertexSet& other) const {
        for (Vertex v = 0; v < universe(); ++v)
            if (member_[v] && !other.contains(v)) return false;
        return true;
    }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    std::vector<char> member_;
    std::size_t size_ = 0;
};

struct ComponentDecomposition {
    std::vector<std::size_t> component_id;  ///< per-vertex label
    std::vector<std::size_t> sizes;         ///< per-component cardinality
    std::size_t giant = 0;                  ///< largest component, lowest id on ties

    std::size_t count() const noexcept { return sizes.size(); }

    VertexSet members(std::size_t id) const {
        VertexSet s(component_id.size());
        for (Vertex v = 0; v < component_id.size(); ++v)
            if (component_id[v] == id) s.insert(v);
        return s;
    }
};

/// Connected components; ids are assigned in order of each component's lowest vertex.
inline ComponentDecomposition components(const Graph& g) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    ComponentDecomposition cd;
    cd.component_id.assign(g.order(), unset);
    std::vector<Vertex> stack;
    for (Vertex root = 0; root < g.order(); ++root) {
        if (cd.component_id[root] != unset) continue;
        const std::size_t id = cd.sizes.size();
        cd.sizes.push_back(0);
        cd.component_id[root] = id;
        stack.push_back(root);
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            ++cd.sizes[id];
            for (Vertex w : g.neighbors(v)) {
                if (cd.component_id[w] == unset) {
                    cd.component_id[w] = id;
                    stack.push_back(w);
                }
            }
        }
    }
    for (std::size_t id = 1; id < cd.sizes.size(); ++id)
        if (cd.sizes[id] > cd.sizes[cd.giant]) cd.giant = id;
    return cd;
}

inline bool is_connected(const Graph& g) { return g.order() > 0 && components(g).count() == 1; }

inline bool is_bipartite(const Graph& g) {
    std::vector<int> side(g.order(), -1);
    std::queue<Vertex> queue;
    for (Vertex root = 0; root < g.order(); ++root) {
        if (side[root] >= 0) continue;
        side[root] = 0;
        queue.push(root);
        while (!queue.empty()) {
            Vertex v = queue.front();
            queue.pop();
            for (Vertex w : g.neighbors(v)) {
                if (side[w] < 0) {
                    side[w] = 1 - side[v];
                    queue.push(w);
                } else if (side[w] == side[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<Vertex> to_parent;  ///< new id -> original id, increasing
};

inline InducedSubgraph induced(const Graph& g, const VertexSet& keep) {
    if (keep.empty()) throw InvalidArgument("induced subgraph of an empty vertex set");
    InducedSubgraph out;
    out.to_parent = keep.members();
    std::vector<Vertex> to_child(g.order(), 0);
    for (Vertex i = 0; i < out.to_parent.size(); ++i) to_child[out.to_parent[i]] = i;
    std::vector<Edge> edges;
    for (Vertex i = 0; i < out.to_parent.size(); ++i)
        for (Vertex w : g.neighbors(out.to_parent[i]))
            if (keep.contains(w) && to_child[w] > i) edges.emplace_back(i, to_child[w]);
    out.graph = Graph::from_edges(out.to_parent.size(), edges);
    return out;
}

/// e(X, V \ X). X must be a nonempty proper subset.
inline std::size_t edge_boundary(const Graph& g, const VertexSet& x) {
    if (x.empty() || x.size() >= g.order()) throw InvalidArgument("edge boundary needs a nonempty proper subset");
    std::size_t count = 0;
    for (Vertex v = 0; v < g.order(); ++v) {
        if (!x.contains(v)) continue;
        for (Vertex w : g.neighbors(v))
            if (!x.contains(w)) ++count;
    }
    return count;
}

/// External neighborhood N(W) = { v not in W : v adjacent to W }.
inline VertexSet neighborhood(const Graph& g, const VertexSet& w) {
    if (w.empty()) throw InvalidArgument("neighborhood of an empty set");
    VertexSet out(g.order());
    for (Vertex v = 0; v < g.order(); ++v) {
        if (!w.contains(v)) continue;
        for (Vertex u : g.neighbors(v))
            if (!w.contains(u)) out.insert(u);
    }
    return out;
}

/// Vertices of `b` are shifted by a.order().
inline Graph disjoint_union(const Graph& a, const Graph& b) {
    std::vector<Edge> edges = a.edges();
    const auto shift = static_cast<Vertex>(a.order());
    for (auto [u, v] : b.edges()) edges.emplace_back(u + shift, v + shift);
    return Graph::from_edges(a.order() + b.order(), edges);
}

namespace detail {
inline std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

inline std::optional<std::uint64_t> parse_label(std::string_view token) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}
}  // namespace detail

/// Parses the edge-list text format: "# comment" lines, an optional "n=<count>" header,
/// and one whitespace-separated "u v" pair per line.
inline Graph parse_edge_list(std::string_view text) {
    std::vector<Edge> edges;
    std::vector<std::size_t> line_of;
    std::optional<std::uint64_t> declared_n;
    std::uint64_t max_label = 0;
    bool any = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (line.starts_with("n=")) {
            if (declared_n) throw ParseError(line_no, "repeated n= header");
            declared_n = detail::parse_label(detail::trim(line.substr(2)));
            if (!declared_n) throw ParseError(line_no, "malformed n= header");
            continue;
        }
        auto split = line.find_first_of(" \t");
        if (split == std::string_view::npos) throw ParseError(line_no, "expected two vertex labels");
        auto first = detail::parse_label(line.substr(0, split));
        auto second = detail::parse_label(detail::trim(line.substr(split)));
        if (!first || !second) throw ParseError(line_no, "expected two nonnegative integer labels");
        if (*first > 0xFFFFFFF0u || *second > 0xFFFFFFF0u) throw ParseError(line_no, "vertex label too large");
        if (*first == *second) throw ParseError(line_no, "self-loop at vertex " + std::to_string(*first));
        edges.emplace_back(static_cast<Vertex>(*first), static_cast<Vertex>(*second));
        line_of.push_back(line_no);
        max_label = std::max({max_label, *first, *second});
        any = true;
    }
    std::size_t n = declared_n ? static_cast<std::size_t>(*declared_n) : (any ? static_cast<std::size_t>(max_label) + 1 : 0);
    if (declared_n && any && max_label >= *declared_n)
        throw ParseError(0, "label " + std::to_string(max_label) + " exceeds n=" + std::to_string(*declared_n));
    try {
        return Graph::from_edges(n, edges);
    } catch (const ParseError& e) {
        // from_edges reports the position in the edge vector; map it back to a text line.
        std::string what = e.what();
        if (auto colon = what.find(": "); e.line() && colon != std::string::npos) what = what.substr(colon + 2);
        throw ParseError(e.line() ? line_of[e.line() - 1] : 0, what);
    }
}

/// Inverse of parse_edge_list. The n= header is written only when isolated trailing
/// vertices would otherwise be lost.
inline std::string write_edge_list(const Graph& g) {
    std::string out;
    auto edges = g.edges();
    std::size_t implied = 0;
    for (auto [u, v] : edges) implied = std::max<std::size_t>(implied, std::max(u, v) + 1);
    if (implied != g.order()) out += "n=" + std::to_string(g.order()) + "\n";
    for (auto [u, v] : edges) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

}  // namespace mixcert
