#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "expansion.hpp"
#include "graph.hpp"
#include "rational.hpp"
#include "walk.hpp"

namespace mixcert {

struct PeelStep {
    VertexSet removed;     ///< in original labels
    std::size_t boundary;  ///< e(P, rest) inside the graph it was peeled from
    Rational ratio;        ///< boundary / |P|
    SearchMode mode;
};

/// Outcome of removing a small vertex set so that what remains expands at a given constant.
struct ExtractionResult {
    VertexSet deleted;  ///< V': everything outside the giant component plus the peeled sets
    Graph kept_graph;   ///< G' = G - V'
    std::vector<Vertex> kept_to_parent;
    std::vector<PeelStep> peel_trace;
    ExpansionCertificate certificate;  ///< on kept_graph at `constant`
    Rational constant;                 ///< eps * D / (16 tau)
    std::size_t well_mixing_count = 0;
    std::size_t giant_size = 0;
    Rational budget;  ///< 5 * delta * n
    bool within_budget = false;
    Backend backend = Backend::exact;
};

struct ExtractionOptions {
    Backend backend = Backend::exact;
    SweepOptions sweep;
};

/// Expander extraction: starting from the giant component, repeatedly peel the
/// minimum-ratio set P (|P| at most half the current graph, ties by size then
/// lexicographic) while e(P, rest) < (eps D / 16 tau) |P|. Search is exhaustive when the
/// current graph has at most 26 vertices and a sweep otherwise. The remaining graph is
/// then certified at the same constant over all sizes up to half its order.
///
/// Throws HypothesisError when fewer than eps*n vertices have ||Q_v^tau - U|| < delta.
inline ExtractionResult extract_expander(const Graph& g, const Rational& eps, const Rational& delta, std::size_t tau,
                                         const ExtractionOptions& opt = {}) {
    if (eps <= 0 || eps >= 1 || delta <= 0 || delta >= 1 || tau < 1)
        throw InvalidArgument("need eps, delta in (0,1) and tau >= 1");
    const std::size_t n = g.order();
    const std::size_t degree = g.regular_degree();
    ExtractionResult out;
    out.backend = opt.backend;
    auto mixing = well_mixing_set(g, tau, delta, opt.backend);
    out.well_mixing_count = mixing.members.size();
    const Rational required = eps * static_cast<unsigned long>(n);
    if (Rational(static_cast<unsigned long>(out.well_mixing_count)) < required)
        throw HypothesisError("extraction hypothesis not met", out.well_mixing_count, required.get_d());

    out.constant = eps * static_cast<unsigned long>(degree) / static_cast<unsigned long>(16 * tau);
    out.constant.canonicalize();
    auto cd = components(g);
    VertexSet giant = cd.members(cd.giant);
    out.giant_size = giant.size();
    VertexSet kept = giant;

    for (;;) {
        auto sub = induced(g, kept);
        const std::size_t m = sub.graph.order();
        if (m < 2) break;
        const SearchMode mode = m <= kExactSubsetLimit ? SearchMode::exact : SearchMode::sweep;
        auto search = min_ratio_set(sub.graph, 1, m / 2, mode, opt.sweep);
        if (!search.best || !(search.best->ratio() < out.constant)) break;
        PeelStep step{VertexSet(n), search.best->boundary, search.best->ratio(), mode};
        for (Vertex v : search.best->set.members()) {
            step.removed.insert(sub.to_parent[v]);
            kept.erase(sub.to_parent[v]);
        }
        out.peel_trace.push_back(std::move(step));
        if (2 * kept.size() < giant.size()) throw Error("no expander core found at this constant");
    }

    out.deleted = kept.complement();
    auto core = induced(g, kept);
    out.kept_graph = core.graph;
    out.kept_to_parent = core.to_parent;
    const std::size_t m = out.kept_graph.order();
    if (m >= 2) {
        const SearchMode mode = m <= kExactSubsetLimit ? SearchMode::exact : SearchMode::sweep;
        out.certificate = check_edge_expansion(out.kept_graph, out.constant, 1, m / 2, mode, opt.sweep);
    } else {
        out.certificate.bound = out.constant;
        out.certificate.size_lo = 1;
        out.certificate.size_hi = 0;
        out.certificate.verdict = Verdict::certified;
    }
    out.budget = 5 * delta * static_cast<unsigned long>(n);
    out.within_budget = Rational(static_cast<unsigned long>(out.deleted.size())) <= out.budget;
    return out;
}

}  // namespace mixcert
