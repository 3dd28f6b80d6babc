#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "amplification.hpp"
#include "cycles.hpp"
#include "expansion.hpp"
#include "extraction.hpp"
#include "graph.hpp"
#include "rational.hpp"
#include "separator.hpp"
#include "walk.hpp"

namespace mixcert {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0.0";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::size_t kMembershipListLimit = 256;

/// One checked inequality. lhs and rhs are exact rationals ("p/q") when available, otherwise
/// decimal text with 17 significant digits.
struct Claim {
    std::string id;
    bool holds = false;
    std::string lhs, rhs;
};

inline std::string number_text(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string number_text(const Rational& q) { return to_string(q); }

inline std::string number_text(const Value& v) { return v.exact ? to_string(*v.exact) : number_text(v.approx); }

inline std::string number_text(std::size_t x) { return std::to_string(x); }

inline Json to_json(const Rational& q) { return to_string(q); }

inline Json to_json(const Value& v) {
    if (v.exact) return to_string(*v.exact);
    return v.approx;
}

inline Json to_json(double x) { return x; }

inline Json to_json(const VertexSet& s) {
    Json out = Json::array();
    for (Vertex v : s.members()) out.push_back(v);
    return out;
}

/// Full member list for small graphs, the size alone above 256 vertices.
inline Json membership_json(const VertexSet& s) {
    if (s.universe() <= kMembershipListLimit) return Json{{"size", s.size()}, {"members", to_json(s)}};
    return Json{{"size", s.size()}};
}

inline Json claims_json(const std::vector<Claim>& claims) {
    Json out = Json::array();
    for (const auto& c : claims) out.push_back(Json{{"claim", c.id}, {"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}});
    return out;
}

template <WalkArithmetic Arith>
Json profile_json(const MixingProfile<Arith>& p) {
    Json records = Json::array();
    for (const auto& r : p.records) {
        Json rec{{"vertex", r.vertex}, {"tv_at_tau", to_json(r.tv_at_tau)}, {"mixing_time", r.mixing_time},
                 {"capped", r.capped}};
        if (r.borderline) rec["borderline"] = true;
        records.push_back(std::move(rec));
    }
    return Json{{"tau", p.tau},
                {"threshold", to_json(p.threshold)},
                {"t_max", p.t_max},
                {"max_mixing_time", p.max_mixing_time()},
                {"any_capped", p.any_capped()},
                {"records", std::move(records)}};
}

template <WalkArithmetic Arith>
std::string profile_csv(const MixingProfile<Arith>& p) {
    std::ostringstream out;
    out << "vertex,tv_at_tau,mixing_time,capped\n";
    for (const auto& r : p.records) {
        std::string tv;
        if constexpr (Arith::backend == Backend::exact)
            tv = to_string(r.tv_at_tau);
        else
            tv = number_text(r.tv_at_tau);
        out << r.vertex << ',' << tv << ',' << r.mixing_time << ',' << (r.capped ? "true" : "false") << '\n';
    }
    return out.str();
}

inline Json conductance_json(const ConductanceResult& c) {
    return Json{{"value", to_json(c.value)},
                {"argmin", to_json(c.argmin)},
                {"mode", std::string(to_string(c.mode))},
                {"candidate_count", c.candidate_count}};
}

inline Json certificate_json(const ExpansionCertificate& c) {
    Json out{{"bound", to_json(c.bound)},
             {"size_lo", c.size_lo},
             {"size_hi", c.size_hi},
             {"mode", std::string(to_string(c.mode))},
             {"verdict", std::string(to_string(c.verdict))},
             {"enumerated", c.enumerated}};
    if (c.witness) out["witness"] = Json{{"set", to_json(*c.witness)}, {"boundary", *c.witness_boundary}};
    if (c.min_ratio_set)
        out["min_ratio_set"] = Json{{"set", to_json(c.min_ratio_set->set)},
                                    {"boundary", c.min_ratio_set->boundary},
                                    {"ratio", to_json(c.min_ratio_set->ratio())}};
    return out;
}

inline Json extraction_json(const ExtractionResult& r) {
    Json peel = Json::array();
    for (const auto& s : r.peel_trace)
        peel.push_back(Json{{"removed", to_json(s.removed)},
                            {"boundary", s.boundary},
                            {"ratio", to_json(s.ratio)},
                            {"mode", std::string(to_string(s.mode))}});
    Json kept = Json::array();
    for (Vertex v : r.kept_to_parent) kept.push_back(v);
    return Json{{"constant", to_json(r.constant)},
                {"well_mixing_count", r.well_mixing_count},
                {"giant_size", r.giant_size},
                {"deleted", to_json(r.deleted)},
                {"deleted_size", r.deleted.size()},
                {"budget", to_json(r.budget)},
                {"within_budget", r.within_budget},
                {"kept_order", r.kept_graph.order()},
                {"kept_vertices", std::move(kept)},
                {"peel_trace", std::move(peel)},
                {"certificate", certificate_json(r.certificate)}};
}

inline Json separator_json(const SeparatorResult& s) {
    return Json{{"separator", to_json(s.separator)},
                {"size", s.separator.size()},
                {"largest_remaining", s.largest_remaining},
                {"largest_remaining_fraction", s.largest_remaining_fraction},
                {"mode", s.mode == SearchMode::exact ? "exact" : "heuristic"},
                {"candidates", s.candidates}};
}

inline Json cycle_json(const CycleWitness& c) {
    Json out = Json::array();
    for (Vertex v : c.vertices) out.push_back(v);
    return out;
}

inline Json condition_json(const NeighborhoodCondition& c) {
    Json out{{"k", c.k},
             {"ell", c.ell},
             {"mode", std::string(to_string(c.mode))},
             {"holds", c.holds},
             {"checked", c.checked}};
    if (c.witness) out["witness"] = to_json(*c.witness);
    return out;
}

inline Json cycle_result_json(const CycleResult& r) {
    const auto& t = r.trace;
    Json trace{{"n", t.n},
               {"giant", t.giant},
               {"k", t.k},
               {"ell", t.ell},
               {"well_mixing", t.well_mixing},
               {"condition", std::string(to_string(t.source))},
               {"required", to_json(t.required)},
               {"exceeds_required", t.exceeds_required}};
    if (t.condition) trace["verification"] = condition_json(*t.condition);
    return Json{{"cycle", cycle_json(r.cycle)}, {"length", r.cycle.length()}, {"trace", std::move(trace)}};
}

inline Json sandwich_json(const SandwichReport& s) {
    Json out{{"applicable", s.applicable}, {"conductance", conductance_json(s.conductance)}};
    if (s.applicable) {
        out["phi"] = to_json(s.phi);
        out["mix"] = s.mix;
        out["lower"] = to_json(s.lower);
        out["upper"] = s.upper;
        out["holds"] = s.holds;
    }
    return out;
}

inline Json amplification_json(const AmplificationReport& r) {
    const auto& L = r.ladder;
    Json levels = Json::array();
    for (std::size_t i = 0; i < L.B.size(); ++i)
        levels.push_back(Json{{"level", i},
                              {"eta", L.schedule.values[i]},
                              {"B", membership_json(L.B[i])},
                              {"cumulative", membership_json(L.cumulative[i])}});
    Json bm = Json::array();
    for (const auto& c : r.claim_bm)
        bm.push_back(Json{{"level", c.level}, {"size", c.size}, {"bound", c.bound}, {"holds", c.holds}});
    auto vertex_list = [](const std::vector<VertexVerdict>& vs) {
        Json out = Json::array();
        for (const auto& v : vs) {
            Json e{{"vertex", v.vertex}, {"value", to_json(v.value)}, {"holds", v.holds}};
            if (v.borderline) e["borderline"] = true;
            out.push_back(std::move(e));
        }
        return out;
    };
    Json d0 = Json::object();
    if (r.delta0.value) d0["value"] = to_json(*r.delta0.value);
    d0["log10"] = r.delta0.log10;
    Json samples = Json::array();
    for (Vertex v : r.decomposition_samples) samples.push_back(v);
    Json comps = Json::array();
    for (auto s : r.component_sizes) comps.push_back(s);
    return Json{{"n", r.n},
                {"degree", r.degree},
                {"tau", r.tau},
                {"M", r.M},
                {"eps", to_json(r.eps)},
                {"delta", to_json(r.delta)},
                {"hypothesis", r.hypothesis},
                {"delta0", std::move(d0)},
                {"delta_feasible", r.delta_feasible},
                {"A", membership_json(L.A)},
                {"ladder", std::move(levels)},
                {"borderline", membership_json(L.borderline)},
                {"eta_recursion", r.eta_recursion},
                {"claim_b0", Json{{"size", L.B[0].size()}, {"bound", to_json(r.claim_b0_bound)}, {"holds", r.claim_b0}}},
                {"claim_bm", std::move(bm)},
                {"final_bound", Json{{"lo", to_json(r.final_bound.first)},
                                     {"hi", to_json(r.final_bound.second)},
                                     {"approx", r.final_bound_approx}}},
                {"final", vertex_list(r.final_tv)},
                {"final_violations", r.final_violations},
                {"no_visit_bound", Json{{"lo", to_json(r.no_visit_bound.first)}, {"hi", to_json(r.no_visit_bound.second)}}},
                {"no_visit", vertex_list(r.no_visit)},
                {"visit_complement", r.visit_complement},
                {"exceptional", r.exceptional},
                {"exceptional_bound", r.exceptional_bound},
                {"exceptional_holds", r.exceptional_holds},
                {"identity", Json{{"lhs", to_json(r.identity_lhs)}, {"rhs", to_json(r.identity_rhs)}, {"holds", r.identity_holds}}},
                {"decomposition", Json{{"samples", std::move(samples)}, {"max_error", r.decomposition_error},
                                       {"holds", r.decomposition_holds}}},
                {"newnotion", Json{{"passed", r.newnotion_passed}, {"of", L.A.size()}, {"holds", r.newnotion_holds}}},
                {"component_sizes", std::move(comps)}};
}

/// Flat verdict list for an amplification run.
inline std::vector<Claim> amplification_claims(const AmplificationReport& r) {
    std::vector<Claim> out;
    out.push_back({"eta_recursion", r.eta_recursion, "", ""});
    out.push_back({"claim_b0", r.claim_b0, std::to_string(r.ladder.B[0].size()), number_text(r.claim_b0_bound)});
    for (const auto& c : r.claim_bm)
        out.push_back({"claim_bm." + std::to_string(c.level), c.holds, std::to_string(c.size), number_text(c.bound)});
    out.push_back({"final", r.final_violations == 0, std::to_string(r.final_violations), "0"});
    out.push_back({"exceptional", r.exceptional_holds, std::to_string(r.exceptional), number_text(r.exceptional_bound)});
    std::size_t no_visit_fail = 0;
    for (const auto& v : r.no_visit) no_visit_fail += !v.holds;
    out.push_back({"no_visit", no_visit_fail == 0, std::to_string(no_visit_fail), "0"});
    out.push_back({"visit_complement", r.visit_complement, "", ""});
    out.push_back({"identity", r.identity_holds, number_text(r.identity_lhs), number_text(r.identity_rhs)});
    out.push_back({"decomposition", r.decomposition_holds, number_text(r.decomposition_error),
                   number_text(kDecompositionTolerance)});
    out.push_back({"newnotion", r.newnotion_holds, std::to_string(r.newnotion_passed), std::to_string(r.ladder.A.size())});
    return out;
}

}  // namespace mixcert
