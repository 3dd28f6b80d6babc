#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amplification.hpp"
#include "config.hpp"
#include "cycles.hpp"
#include "expansion.hpp"
#include "extraction.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "separator.hpp"
#include "walk.hpp"

namespace mixcert::cli {

/// Raw command-line values; empty strings mean "not given".
struct Options {
    std::string command;
    std::string input, output, config_path;
    std::string mode, backend, tau, delta, eps, c, range, threshold;
    std::string M, k, ell, seed, threads, t_max;
    bool csv = false;
    bool no_timing = false;
};

class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::size_t parse_count(const std::string& text, const char* name) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos);
    } catch (const std::exception&) {
        throw UsageError(std::string("--") + name + " expects a non-negative integer, got '" + text + "'");
    }
    if (pos != text.size() || text.front() == '-')
        throw UsageError(std::string("--") + name + " expects a non-negative integer, got '" + text + "'");
    return static_cast<std::size_t>(value);
}

inline Rational parse_number(const std::string& text, const char* name) {
    try {
        return parse_rational(text);
    } catch (const Error&) {
        throw UsageError(std::string("--") + name + " expects a number, got '" + text + "'");
    }
}

struct Loaded {
    Graph graph;
    Json descriptor;
};

inline Loaded load_input(const std::string& input) {
    if (input.empty()) throw UsageError("missing input (edge-list file or construction descriptor)");
    if (std::filesystem::exists(input)) {
        std::ifstream in(input);
        if (!in) throw UsageError("cannot read " + input);
        std::ostringstream buf;
        buf << in.rdbuf();
        return {parse_edge_list(buf.str()), Json{{"file", input}}};
    }
    if (input.find(':') == std::string::npos && input.find('=') == std::string::npos) {
        bool kind = false;
        for (const auto& [k, name] : kConstructionNames) kind |= input == name;
        if (!kind) throw UsageError("no such file: " + input);
    }
    auto spec = parse_construction(input);
    return {generate(spec), Json{{"construction", spec.descriptor()}}};
}

/// Effective settings after merging flags, configuration file and defaults.
struct Settings {
    Rational threshold = make_rational(1, 4);
    std::optional<std::size_t> t_max;
    std::optional<Backend> backend;
    std::optional<SearchMode> mode;
    unsigned threads = 0;
    SweepOptions sweep;
    double tolerance = 1e-10;
};

inline Settings resolve(const Options& o) {
    Config cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    auto pick = [&](const std::string& flag, const char* key) -> std::optional<std::string> {
        if (!flag.empty()) return flag;
        return cfg.get(key);
    };
    Settings s;
    if (auto v = pick(o.threshold, "threshold")) s.threshold = parse_number(*v, "threshold");
    if (s.threshold <= 0 || s.threshold >= 1) throw UsageError("threshold must lie in (0,1)");
    if (auto v = pick(o.t_max, "t_max")) s.t_max = parse_count(*v, "t-max");
    try {
        if (auto v = pick(o.backend, "backend")) s.backend = parse_backend(*v);
        if (auto v = pick(o.mode, "mode")) s.mode = parse_search_mode(*v);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (auto v = pick(o.threads, "threads")) {
        s.threads = static_cast<unsigned>(parse_count(*v, "threads"));
    } else if (const char* env = std::getenv("MIXCERT_THREADS"); env && *env) {
        s.threads = static_cast<unsigned>(parse_count(env, "threads"));
    }
    if (auto v = pick(o.seed, "seed")) s.sweep.seed = parse_count(*v, "seed");
    if (auto v = cfg.get("tolerance")) s.tolerance = parse_number(*v, "tolerance").get_d();
    if (auto v = cfg.get("eig_tolerance")) s.sweep.eigen_tolerance = parse_number(*v, "eig_tolerance").get_d();
    if (auto v = cfg.get("restarts")) s.sweep.random_orders = parse_count(*v, "restarts");
    if (auto v = cfg.get("samples")) s.sweep.random_sets = parse_count(*v, "samples");
    return s;
}

inline std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--range expects lo:hi");
    return {parse_count(text.substr(0, colon), "range"), parse_count(text.substr(colon + 1), "range")};
}

/// tau from a flag: a number, or "auto" for the largest per-vertex mixing time at the threshold.
inline std::size_t resolve_tau(const std::string& text, const Graph& g, const Settings& s, Backend backend,
                               Json& params) {
    if (text.empty()) throw UsageError("--tau is required");
    if (text != "auto") return parse_count(text, "tau");
    const std::size_t t_max = s.t_max.value_or(default_t_max(g.order()));
    std::size_t tau = 0;
    bool capped = false;
    with_backend(backend, [&]<typename A>(A) {
        auto p = mixing_profile<A>(g, 0, s.threshold, t_max);
        tau = p.max_mixing_time();
        capped = p.any_capped();
    });
    params["tau_source"] = capped ? "auto (capped at t_max)" : "auto";
    return std::max<std::size_t>(tau, 1);
}

inline Claim make_claim(std::string id, bool holds, std::string lhs, std::string rhs) {
    return {std::move(id), holds, std::move(lhs), std::move(rhs)};
}

}  // namespace detail

/// Parses argv, runs one subcommand, writes the report. Returns the process exit code:
/// 0 when every verdict holds, 1 when some verdict fails, 2 on usage or input errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixing, expansion and long-cycle certificates for regular graphs", "mixcert"};
    app.require_subcommand(1);
    Options o;
    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {{"gen", "generate a construction as an edge list"},
                          {"profile", "per-vertex total variation and mixing times"},
                          {"conductance", "conductance of the graph"},
                          {"certify", "check edge expansion over a size range"},
                          {"extract", "remove a small set so the rest expands"},
                          {"separator", "smallest balanced vertex separator"},
                          {"cycle", "long cycle by depth-first search"},
                          {"amplify", "bad-set ladder and the amplification claims"},
                          {"sandwich", "compare mixing time with conductance bounds"}};
    for (const auto& sp : specs) {
        auto* sub = app.add_subcommand(sp.name, sp.help);
        sub->add_option("input", o.input, "edge-list file or construction descriptor (kind:k=v,...)");
        sub->add_option("-o,--output", o.output, "output file");
        sub->add_option("--config", o.config_path, "key=value configuration file");
        sub->add_option("--mode", o.mode, "exact|sweep|sampled");
        sub->add_option("--backend", o.backend, "exact|float");
        sub->add_option("--tau", o.tau, "walk length, or auto");
        sub->add_option("--delta", o.delta, "well-mixing threshold");
        sub->add_option("--eps", o.eps, "fraction of well-mixing vertices");
        sub->add_option("--M", o.M, "ladder depth");
        sub->add_option("--seed", o.seed, "seed for sampled searches");
        sub->add_option("--threads", o.threads, "worker threads (0 = all)");
        sub->add_option("--t-max", o.t_max, "cap for mixing-time scans");
        sub->add_option("--threshold", o.threshold, "mixing threshold (default 1/4)");
        sub->add_option("--c", o.c, "expansion constant");
        sub->add_option("--range", o.range, "size range lo:hi");
        sub->add_option("--k", o.k, "neighborhood condition size");
        sub->add_option("--ell", o.ell, "neighborhood condition bound");
        sub->add_flag("--csv", o.csv, "profile as CSV instead of JSON");
        sub->add_flag("--no-timing", o.no_timing, "omit wall_time_ms from the report");
        sub->callback([&o, sub] { o.command = sub->get_name(); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    Json report;
    std::vector<Claim> claims;
    std::string csv;
    try {
        auto s = detail::resolve(o);
        set_thread_count(s.threads);
        set_float_guard(s.tolerance);
        auto loaded = detail::load_input(o.input);
        const Graph& g = loaded.graph;
        const std::size_t n = g.order();
        Json params = Json::object();
        Json result;
        auto backend_for = [&](std::size_t horizon) { return s.backend.value_or(default_backend(n, horizon)); };
        auto need = [&](const std::string& v, const char* flag) -> const std::string& {
            if (v.empty()) throw UsageError(std::string("--") + flag + " is required");
            return v;
        };
        Backend backend = backend_for(0);

        if (o.command == "gen") {
            auto text = write_edge_list(g);
            if (o.output.empty()) {
                out << text;
                return 0;
            }
            std::ofstream f(o.output);
            if (!f) throw UsageError("cannot write " + o.output);
            f << text;
            result = Json{{"output", o.output}, {"order", n}, {"edges", g.edge_count()}};
        } else if (o.command == "profile") {
            const std::size_t t_max = s.t_max.value_or(default_t_max(n));
            backend = backend_for(t_max);
            std::size_t tau = 0;
            if (o.tau.empty() || o.tau == "auto") {
                tau = detail::resolve_tau("auto", g, s, backend, params);
            } else {
                tau = detail::parse_count(o.tau, "tau");
            }
            params["tau"] = tau;
            params["threshold"] = to_json(s.threshold);
            params["t_max"] = t_max;
            with_backend(backend, [&]<typename A>(A) {
                auto p = mixing_profile<A>(g, tau, s.threshold, t_max);
                if (!o.delta.empty()) {
                    const Rational delta = detail::parse_number(o.delta, "delta");
                    params["delta"] = to_json(delta);
                    std::vector<typename A::value_type> tv;
                    for (const auto& r : p.records) tv.push_back(r.tv_at_tau);
                    auto wm = well_mixing_set_from<A>(tv, delta);
                    for (auto& r : p.records) r.borderline = wm.borderline.contains(r.vertex);
                    result = profile_json(p);
                    result["well_mixing"] = membership_json(wm.members);
                } else {
                    result = profile_json(p);
                }
                if (o.csv) csv = profile_csv(p);
            });
        } else if (o.command == "conductance") {
            const SearchMode mode = s.mode.value_or(n <= kExactSubsetLimit ? SearchMode::exact : SearchMode::sweep);
            params["mode"] = std::string(to_string(mode));
            auto c = conductance(g, mode, s.sweep);
            result = conductance_json(c);
            const Rational again = c.argmin.size() == 0 ? Rational(0) : conductance_of(g, c.argmin);
            claims.push_back(detail::make_claim("recomputed", again == c.value, to_string(c.value), to_string(again)));
        } else if (o.command == "certify") {
            const Rational c = detail::parse_number(need(o.c, "c"), "c");
            auto [lo, hi] = detail::parse_range(need(o.range, "range"));
            const SearchMode mode = s.mode.value_or(n <= kExactSubsetLimit ? SearchMode::exact : SearchMode::sweep);
            params["c"] = to_json(c);
            params["range"] = Json::array({lo, hi});
            params["mode"] = std::string(to_string(mode));
            auto cert = check_edge_expansion(g, c, lo, hi, mode, s.sweep);
            result = certificate_json(cert);
            claims.push_back(detail::make_claim(
                "edge_expansion", cert.holds(),
                cert.min_ratio_set ? to_string(cert.min_ratio_set->ratio()) : std::string(), to_string(c)));
        } else if (o.command == "extract") {
            const Rational eps = detail::parse_number(need(o.eps, "eps"), "eps");
            const Rational delta = detail::parse_number(need(o.delta, "delta"), "delta");
            backend = backend_for(s.t_max.value_or(default_t_max(n)));
            const std::size_t tau = detail::resolve_tau(o.tau, g, s, backend, params);
            backend = backend_for(tau);
            params["eps"] = to_json(eps);
            params["delta"] = to_json(delta);
            params["tau"] = tau;
            auto r = extract_expander(g, eps, delta, tau, {backend, s.sweep});
            result = extraction_json(r);
            claims.push_back(detail::make_claim("budget", r.within_budget, std::to_string(r.deleted.size()),
                                                to_string(r.budget)));
            claims.push_back(detail::make_claim("certificate", r.certificate.holds(),
                                                std::string(to_string(r.certificate.verdict)), to_string(r.constant)));
        } else if (o.command == "separator") {
            const SearchMode mode = s.mode.value_or(n <= kExactSeparatorLimit ? SearchMode::exact : SearchMode::sweep);
            params["mode"] = std::string(to_string(mode));
            auto r = find_separator(g, mode, s.sweep);
            result = separator_json(r);
            claims.push_back(detail::make_claim("balanced", 3 * r.largest_remaining <= 2 * n,
                                                std::to_string(3 * r.largest_remaining), std::to_string(2 * n)));
            if (!o.eps.empty() && !o.tau.empty()) {
                const Rational eps = detail::parse_number(o.eps, "eps");
                backend = backend_for(s.t_max.value_or(default_t_max(n)));
                const std::size_t tau = detail::resolve_tau(o.tau, g, s, backend, params);
                Rational bound = eps * static_cast<unsigned long>(n) / static_cast<unsigned long>(48 * tau);
                bound.canonicalize();
                params["eps"] = to_json(eps);
                params["tau"] = tau;
                result["lower_bound"] = to_json(bound);
                claims.push_back(detail::make_claim("separator_lower_bound",
                                                    Rational(static_cast<unsigned long>(r.separator.size())) >= bound,
                                                    std::to_string(r.separator.size()), to_string(bound)));
            }
        } else if (o.command == "cycle") {
            if (!o.k.empty() || !o.ell.empty()) {
                const std::size_t k = detail::parse_count(need(o.k, "k"), "k");
                const std::size_t ell = detail::parse_count(need(o.ell, "ell"), "ell");
                params["k"] = k;
                params["ell"] = ell;
                if (s.mode) {
                    const auto cm = *s.mode == SearchMode::exact ? ConditionMode::exact : ConditionMode::sampled;
                    params["condition_mode"] = std::string(to_string(cm));
                    auto cond = verify_neighborhood_condition(g, k, ell, cm, s.sweep.seed);
                    result["condition"] = condition_json(cond);
                    claims.push_back(detail::make_claim("neighborhood_condition", cond.holds,
                                                        std::to_string(cond.checked), std::to_string(ell)));
                }
                try {
                    auto c = find_long_cycle(g, k, ell);
                    result["cycle"] = cycle_json(c);
                    result["length"] = c.length();
                    claims.push_back(
                        detail::make_claim("length", c.length() >= ell + 1, std::to_string(c.length()), std::to_string(ell + 1)));
                } catch (const LongCycleNotFound& e) {
                    if (e.best()) result["best"] = cycle_json(*e.best());
                    if (e.witness()) result["witness"] = to_json(*e.witness());
                    result["precondition_violated"] = e.precondition_violated();
                    claims.push_back(detail::make_claim("length", false,
                                                        e.best() ? std::to_string(e.best()->length()) : "0",
                                                        std::to_string(ell + 1)));
                }
            } else {
                const Rational eps = detail::parse_number(need(o.eps, "eps"), "eps");
                backend = backend_for(s.t_max.value_or(default_t_max(n)));
                const std::size_t tau = detail::resolve_tau(o.tau, g, s, backend, params);
                backend = backend_for(tau);
                params["eps"] = to_json(eps);
                params["tau"] = tau;
                auto r = mixing_to_cycle(g, eps, tau, backend);
                result = cycle_result_json(r);
                claims.push_back(detail::make_claim("length", r.trace.exceeds_required, std::to_string(r.cycle.length()),
                                                    to_string(r.trace.required)));
            }
        } else if (o.command == "amplify") {
            const Rational eps = detail::parse_number(need(o.eps, "eps"), "eps");
            const Rational delta = detail::parse_number(need(o.delta, "delta"), "delta");
            const std::size_t M = detail::parse_count(need(o.M, "M"), "M");
            backend = backend_for(s.t_max.value_or(default_t_max(n)));
            const std::size_t tau = detail::resolve_tau(o.tau, g, s, backend, params);
            backend = backend_for((M + 1) * tau);
            params["eps"] = to_json(eps);
            params["delta"] = to_json(delta);
            params["tau"] = tau;
            params["M"] = M;
            auto r = verify_amplification(g, tau, delta, eps, M, backend);
            result = amplification_json(r);
            claims = amplification_claims(r);
        } else if (o.command == "sandwich") {
            const std::size_t t_max = s.t_max.value_or(default_t_max(n));
            backend = backend_for(t_max);
            params["t_max"] = t_max;
            params["threshold"] = to_json(s.threshold);
            auto r = sandwich_check(g, t_max, backend, s.threshold);
            result = sandwich_json(r);
            if (r.applicable) {
                claims.push_back(detail::make_claim("lower", r.lower < static_cast<unsigned long>(r.mix),
                                                    to_string(r.lower), std::to_string(r.mix)));
                claims.push_back(detail::make_claim("upper", static_cast<double>(r.mix) < r.upper,
                                                    std::to_string(r.mix), number_text(r.upper)));
            }
        }

        report["schema_version"] = kSchemaVersion;
        report["tool_version"] = kToolVersion;
        report["command"] = o.command;
        report["input"] = loaded.descriptor;
        report["order"] = n;
        report["parameters"] = params;
        report["backend"] = std::string(to_string(backend));
        report["threads"] = thread_count();
        if (!o.no_timing)
            report["wall_time_ms"] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report["result"] = result;
        report["verdicts"] = claims_json(claims);
    } catch (const ConfigError& e) {
        err << "mixcert: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "mixcert: " << e.what() << '\n';
        return 2;
    }

    const std::string text = csv.empty() ? report.dump(2) + "\n" : csv;
    if (!o.output.empty() && o.command != "gen") {
        std::ofstream f(o.output);
        if (!f) {
            err << "mixcert: cannot write " << o.output << '\n';
            return 2;
        }
        f << text;
    } else {
        out << text;
    }
    for (const auto& c : claims)
        if (!c.holds) return 1;
    return 0;
}

}  // namespace mixcert::cli
