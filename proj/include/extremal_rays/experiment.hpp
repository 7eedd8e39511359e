#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "io.hpp"
#include "svg.hpp"

namespace extremal_rays {

// ---------------------------------------------------------------------------
// Experiment configuration. Everything that determines a run is in here;
// reruns at a fixed thread count reproduce outputs byte for byte (timestamps
// go to the run_meta.json sidecar only).

enum class ExperimentKind { modulus, trace, lamination, ray, comb_certify, liouville_gap };

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::modulus;
    std::map<std::string, std::string> params;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int samples = 256;
    int threads = 1;

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    bool has(const std::string& key) const { return params.count(key) > 0; }
};

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "modulus") return ExperimentKind::modulus;
    if (s == "trace") return ExperimentKind::trace;
    if (s == "lamination") return ExperimentKind::lamination;
    if (s == "ray") return ExperimentKind::ray;
    if (s == "comb-certify") return ExperimentKind::comb_certify;
    if (s == "liouville-gap") return ExperimentKind::liouville_gap;
    throw invalid_parameter("unknown experiment kind '" + s + "'");
}

// TOML-style key = value file; '#' comments, optional quotes, dyadic
// rationals as strings like "3/2^5".
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r\"");
            size_t b = s.find_last_not_of(" \t\r\"");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

// "2^-1..2^-8" or comma list "1/2,1/4,1/8"
inline std::vector<Dyadic> parse_eps_schedule(const std::string& s) {
    std::vector<Dyadic> out;
    size_t dots = s.find("..");
    if (dots != std::string::npos) {
        Dyadic from = Dyadic::parse(s.substr(0, dots));
        Dyadic to = Dyadic::parse(s.substr(dots + 2));
        if (!(to < from)) throw invalid_parameter("eps schedule must decrease");
        Dyadic cur = from;
        while (!(cur < to)) {
            out.push_back(cur);
            cur = cur * Dyadic(1, 1);
        }
        return out;
    }
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(Dyadic::parse(tok));
    return out;
}

// ---------------------------------------------------------------------------
// Builtin domains and named boundary sets

struct NamedDomain {
    SlitDomain dom;
    std::string builtin;
};

inline NamedDomain builtin_domain(const ExperimentConfig& cfg) {
    std::string name = cfg.get("builtin");
    if (name.empty() && cfg.has("domain-file")) {
        json j = json::parse(read_file(cfg.get("domain-file")));
        return {domain_from_json(j), "file"};
    }
    if (name == "square") return {build_rectangle(Dyadic(1), Dyadic(1)), name};
    if (name == "rect2") return {build_rectangle(Dyadic(2), Dyadic(1)), name};
    if (name == "lshape") {
        return {SlitDomain({{Dyadic(0), Dyadic(0)},
                            {Dyadic(1), Dyadic(0)},
                            {Dyadic(1), Dyadic(1, 1)},
                            {Dyadic(1, 1), Dyadic(1, 1)},
                            {Dyadic(1, 1), Dyadic(1)},
                            {Dyadic(0), Dyadic(1)}},
                           {}),
                name};
    }
    if (name == "dn") {
        Dyadic a = Dyadic::parse(cfg.get("a", "1"));
        Dyadic b = Dyadic::parse(cfg.get("b", "1"));
        Dyadic c = Dyadic::parse(cfg.get("c", "1/2"));
        int N = std::stoi(cfg.get("N", "4"));
        return {build_slit_rectangle(a, b, c, N), name};
    }
    if (name == "comb") {
        int kmax = std::stoi(cfg.get("kmax", "3"));
        return {build_comb(kmax), name};
    }
    throw invalid_parameter("unknown builtin domain '" + name + "'");
}

// named sets: left/right/top/bottom edges; "bottom:x0:x1" pieces;
// comb families "F:k", "E:k", "Fp:k", "Ep:k"
inline BoundarySet named_set(const NamedDomain& nd, const std::string& name) {
    const SlitDomain& dom = nd.dom;
    auto edge_pieces = [&](bool horizontal, Side interior, Dyadic lo, Dyadic hi,
                           bool clip) {
        std::vector<BoundaryPiece> pieces;
        for (int e = 0; e < dom.edge_count(); ++e) {
            if (dom.edge_horizontal(e) != horizontal) continue;
            if (dom.edge_interior_side(e) != interior) continue;
            DyPoint a = dom.edge_start(e), b = dom.edge_end(e);
            Dyadic t0 = horizontal ? std::min(a.x, b.x) : std::min(a.y, b.y);
            Dyadic t1 = horizontal ? std::max(a.x, b.x) : std::max(a.y, b.y);
            if (clip) {
                t0 = std::max(t0, lo);
                t1 = std::min(t1, hi);
                if (!(t0 < t1)) continue;
            }
            pieces.push_back(BoundaryPiece{FeatureKind::outer_edge, e, interior, 0, t0, t1});
        }
        if (pieces.empty()) throw invalid_parameter("set '" + name + "' matches no edge");
        return BoundarySet(&dom, std::move(pieces));
    };
    std::string base = name;
    Dyadic lo(0), hi(0);
    bool clip = false;
    size_t colon = name.find(':');
    if (colon != std::string::npos && (name.rfind("F", 0) != 0 && name.rfind("E", 0) != 0)) {
        base = name.substr(0, colon);
        std::string rest = name.substr(colon + 1);
        size_t colon2 = rest.find(':');
        if (colon2 == std::string::npos) throw invalid_parameter("set range needs two bounds");
        lo = Dyadic::parse(rest.substr(0, colon2));
        hi = Dyadic::parse(rest.substr(colon2 + 1));
        clip = true;
    }
    if (base == "bottom") return edge_pieces(true, Side::pos, lo, hi, clip);
    if (base == "top") return edge_pieces(true, Side::neg, lo, hi, clip);
    if (base == "left") return edge_pieces(false, Side::pos, lo, hi, clip);
    if (base == "right") return edge_pieces(false, Side::neg, lo, hi, clip);
    if (nd.builtin == "comb" && colon != std::string::npos) {
        int k = std::stoi(name.substr(colon + 1));
        CombSets sets = comb_sets(dom, k);
        std::string fam = name.substr(0, colon);
        if (fam == "F") return sets.F;
        if (fam == "E") return sets.E;
        if (fam == "Fp") return sets.Fp;
        if (fam == "Ep") return sets.Ep;
        if (fam == "F1") return sets.F1;
        if (fam == "F2") return sets.F2;
        if (fam == "E1") return sets.E1;
        if (fam == "E2") return sets.E2;
    }
    if (nd.builtin == "dn" && (base == "glow" || base == "grow")) {
        // the low vertical edge pieces of the slit rectangle (Gamma_N ends)
        Dyadic c = dom.slits().empty() ? dom.max_y() : dom.slits()[0].lo();
        int edge = base == "glow" ? 3 : 1;
        return BoundarySet(&dom, {BoundaryPiece{FeatureKind::outer_edge, edge,
                                                dom.edge_interior_side(edge), 0, Dyadic(0), c}});
    }
    throw invalid_parameter("unknown boundary set '" + name + "'");
}

inline PolynomialQD qd_from_config(const ExperimentConfig& cfg) {
    std::string spec = cfg.get("qd", "1");
    if (spec == "1" || spec == "one") return PolynomialQD({Complex(1, 0)});
    if (spec == "z") return PolynomialQD({Complex(0, 0), Complex(1, 0)});
    if (spec == "z2-c") return PolynomialQD({Complex(-0.25, 0), Complex(0, 0), Complex(1, 0)});
    if (!spec.empty() && spec[0] == '[') return qd_from_json(json::parse(spec));
    if (cfg.has("qd-file")) return qd_from_json(json::parse(read_file(cfg.get("qd-file"))));
    throw invalid_parameter("unknown differential '" + spec + "'");
}

inline TransversalSpec transversal_from_config(const ExperimentConfig& cfg,
                                               const PolynomialQD& qd) {
    std::string name = cfg.get("transversal", "diameter");
    TransversalSpec spec;
    if (name == "diameter") {
        spec.arcs = {{{-0.99999, 0.0}, {0.99999, 0.0}}};
        return spec;
    }
    if (name == "tripod") {
        // three radial legs for differentials with a single 3-pronged zero at
        // the origin (phi = z): legs at the horizontal directions
        for (int j = 0; j < 3; ++j) {
            double th = 2.0 * std::numbers::pi * j / 3.0;
            spec.arcs.push_back(
                {Complex(1e-4, 0) * std::polar(1.0, th), std::polar(0.99999, th)});
        }
        return spec;
    }
    if (name == "traced") {
        // horizontal trajectory through the given seed
        double x = std::stod(cfg.get("seed-re", "0.1"));
        double y = std::stod(cfg.get("seed-im", "0.2"));
        spec.arcs = {trace_horizontal(qd, {x, y}).points};
        return spec;
    }
    throw invalid_parameter("unknown transversal '" + name + "'");
}

// ---------------------------------------------------------------------------
// Worker pool: independent sub-experiments fan out, results assemble in
// deterministic index order regardless of scheduling.

template <typename Task, typename Result>
std::vector<Result> parallel_map(const std::vector<Task>& tasks,
                                 const std::function<Result(const Task&)>& fn, int threads) {
    std::vector<Result> results(tasks.size());
    if (threads <= 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) results[i] = fn(tasks[i]);
        return results;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int n = std::min<int>(threads, (int)tasks.size());
    std::vector<std::exception_ptr> errors(n);
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&, t] {
            try {
                for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    results[i] = fn(tasks[i]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// ---------------------------------------------------------------------------
// Runners. Exit status: 0 ok; 1 solver/resolution errors or a failed
// certification; 2 usage errors (thrown as invalid_parameter before work
// starts).

namespace detail {
inline void write_meta(const ExperimentConfig& cfg) {
    json meta;
    meta["timestamp_unix"] = (long)std::time(nullptr);
    meta["threads"] = cfg.threads;
    write_file(cfg.out_dir + "/run_meta.json", meta.dump(2) + "\n");
}

inline json config_echo(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["samples"] = cfg.samples;
    json p = json::object();
    for (const auto& [k, v] : cfg.params) p[k] = v;
    j["params"] = p;
    return j;
}
}  // namespace detail

inline int run_modulus(const ExperimentConfig& cfg) {
    NamedDomain nd = builtin_domain(cfg);
    BoundarySet e = named_set(nd, cfg.get("e", "left"));
    BoundarySet f = named_set(nd, cfg.get("f", "right"));
    Dyadic h = Dyadic::parse(cfg.get("h", "1/128"));
    ModulusResult m = grid_modulus(nd.dom, e, f, h);
    json out;
    out["config"] = detail::config_echo(cfg);
    out["result"] = to_json(m);
    write_file(cfg.out_dir + "/result.json", out.dump(2) + "\n");
    write_file(cfg.out_dir + "/domain.json", to_json(nd.dom).dump(2) + "\n");
    write_file(cfg.out_dir + "/domain.svg", render_domain(nd.dom, &e, &f));
    return 0;
}

inline int run_trace(const ExperimentConfig& cfg) {
    PolynomialQD qd = qd_from_config(cfg);
    double x = std::stod(cfg.get("seed-re", "0.2"));
    double y = std::stod(cfg.get("seed-im", "0.0"));
    double budget = std::stod(cfg.get("budget", "1000"));
    Trajectory t = trace_vertical(qd, {x, y}, budget);
    write_file(cfg.out_dir + "/trajectory.csv", trajectory_csv(t));
    json side = trajectory_sidecar(t);
    side["config"] = detail::config_echo(cfg);
    write_file(cfg.out_dir + "/trajectory.json", side.dump(2) + "\n");
    write_file(cfg.out_dir + "/disk.svg", render_disk_trajectories({t}));
    return 0;
}

inline int run_lamination(const ExperimentConfig& cfg) {
    PolynomialQD qd = qd_from_config(cfg);
    int n = std::stoi(cfg.get("n", "1000"));
    std::string kind = cfg.get("lam-kind", "both");
    json out;
    out["config"] = detail::config_echo(cfg);
    std::optional<SampledLamination> mu, nu;
    if (cfg.get("builtin").empty()) {
        TransversalSpec spec = transversal_from_config(cfg, qd);
        if (kind == "mu" || kind == "both") mu = sample_mu(qd, spec, n);
        if (kind == "nu" || kind == "both") nu = sample_nu(qd, spec, n);
    } else {
        NamedDomain nd = builtin_domain(cfg);
        if (kind == "mu" || kind == "both") mu = sample_mu(nd.dom, n);
        if (kind == "nu" || kind == "both") nu = sample_nu(nd.dom, n);
    }
    if (mu) {
        write_file(cfg.out_dir + "/mu.csv", lamination_csv(*mu));
        out["mu_total_mass"] = mu->total_mass();
        if (cfg.samples > 0) {
            ThurstonSample ts = thurston_norm_detailed(*mu, cfg.samples, cfg.seed);
            out["mu_thurston_norm"] = ts.value;
            json tr = json::array();
            for (const auto& g : ts.transports)
                tr.push_back({g.theta, g.w.real(), g.w.imag()});
            out["transports"] = tr;
        }
    }
    if (nu) {
        write_file(cfg.out_dir + "/nu.csv", lamination_csv(*nu));
        out["nu_total_mass"] = nu->total_mass();
    }
    if (mu && nu) out["reconstructed_l1"] = reconstruct_l1(*mu, *nu);
    write_file(cfg.out_dir + "/lamination.json", out.dump(2) + "\n");
    return 0;
}

inline int run_ray(const ExperimentConfig& cfg) {
    NamedDomain nd = builtin_domain(cfg);
    SqueezeExperiment exp;
    exp.domain = &nd.dom;
    exp.e = named_set(nd, cfg.get("e", "bottom"));
    exp.f = named_set(nd, cfg.get("f", "top"));
    exp.epsilons = parse_eps_schedule(cfg.get("eps", "2^-1..2^-6"));
    if (cfg.has("h")) exp.grid_h = Dyadic::parse(cfg.get("h"));
    exp.grid.conjugate = false;

    // fan the per-epsilon solves out to the worker pool, then assemble
    std::vector<Dyadic> eps = exp.epsilons;
    std::function<RayPoint(const Dyadic&)> solve = [&](const Dyadic& ep) {
        Dyadic h = exp.grid_h ? *exp.grid_h : auto_grid_step(squeeze(nd.dom, ep));
        return ray_modulus(nd.dom, exp.e, exp.f, ep, h, exp.grid);
    };
    std::vector<RayPoint> points = parallel_map(eps, solve, cfg.threads);
    ConvergenceReport rep;
    rep.target = exp.target();
    rep.points = std::move(points);
    for (size_t i = 0; i + 1 < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        const auto& q = rep.points[i + 1];
        if (q.eps_mod > p.eps_mod + p.error_bar + q.error_bar + 1e-9) rep.monotone_band = false;
    }
    for (const auto& p : rep.points)
        if (p.eps_mod < rep.target - p.error_bar - 1e-9) rep.lower_bound_ok = false;
    rep.final_gap = std::abs(rep.points.back().eps_mod - rep.target);

    write_file(cfg.out_dir + "/convergence.csv", convergence_csv(rep));
    json out;
    out["config"] = detail::config_echo(cfg);
    out["target"] = rep.target;
    out["final_gap"] = rep.final_gap;
    out["monotone_band"] = rep.monotone_band;
    out["lower_bound_ok"] = rep.lower_bound_ok;
    write_file(cfg.out_dir + "/report.json", out.dump(2) + "\n");
    write_file(cfg.out_dir + "/convergence.svg", render_convergence(rep));
    write_file(cfg.out_dir + "/domain.svg", render_domain(nd.dom, &exp.e, &exp.f));
    return 0;
}

inline int run_comb_certify(const ExperimentConfig& cfg) {
    int kmax = std::stoi(cfg.get("kmax", "3"));
    Dyadic h = Dyadic::parse(cfg.get("h", "1/512"));
    GridOptions opt;
    opt.conjugate = cfg.get("conjugate", "off") == "on";
    UniformWeakStarCertificate cert =
        certify_counterexample(kmax, h, opt, cfg.get("direct-b", "off") == "on");
    json out = to_json(cert);
    out["config"] = detail::config_echo(cfg);
    write_file(cfg.out_dir + "/certificate.json", out.dump(2) + "\n");
    SlitDomain comb = build_comb(kmax);
    CombSets s1 = comb_sets(comb, std::min(3, kmax));
    write_file(cfg.out_dir + "/comb.svg", render_domain(comb, &s1.E, &s1.F));
    return cert.all_pass ? 0 : 1;
}

inline int run_liouville_gap(const ExperimentConfig& cfg) {
    json out;
    out["config"] = detail::config_echo(cfg);
    if (cfg.has("box")) {
        // four angles in turns of 2 pi, comma separated
        std::istringstream in(cfg.get("box"));
        std::string tok;
        std::vector<double> turns;
        while (std::getline(in, tok, ',')) turns.push_back(std::stod(tok));
        if (turns.size() != 4) throw invalid_parameter("--box needs four angles in turns");
        const double tau = 2 * std::numbers::pi;
        GeodesicBox box(turns[0] * tau, turns[1] * tau, turns[2] * tau, turns[3] * tau);
        out["liouville"] = box.liouville();
        out["modulus"] = disk_box_modulus(box);
        out["gap"] = mod_liouville_gap(box);
        write_file(cfg.out_dir + "/gap.json", out.dump(2) + "\n");
        return 0;
    }
    int mod_max = std::stoi(cfg.get("mod-max", "8"));
    std::ostringstream csv;
    csv << "mod,cross_ratio,liouville,gap\n";
    json rows = json::array();
    for (int m = 2; m <= mod_max; ++m) {
        double cr = detail::cr_from_box_modulus((double)m);
        double gap = mod_liouville_gap_from_cr(cr);
        csv << m << ',' << detail::fmt_double(cr) << ',' << detail::fmt_double(std::log(cr))
            << ',' << detail::fmt_double(gap) << '\n';
        rows.push_back({{"mod", m}, {"cross_ratio", cr}, {"gap", gap}});
    }
    out["rows"] = rows;
    write_file(cfg.out_dir + "/gaps.csv", csv.str());
    write_file(cfg.out_dir + "/gaps.json", out.dump(2) + "\n");
    return 0;
}

inline int run(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    int status = 0;
    switch (cfg.kind) {
        case ExperimentKind::modulus: status = run_modulus(cfg); break;
        case ExperimentKind::trace: status = run_trace(cfg); break;
        case ExperimentKind::lamination: status = run_lamination(cfg); break;
        case ExperimentKind::ray: status = run_ray(cfg); break;
        case ExperimentKind::comb_certify: status = run_comb_certify(cfg); break;
        case ExperimentKind::liouville_gap: status = run_liouville_gap(cfg); break;
    }
    detail::write_meta(cfg);
    return status;
}

}  // namespace extremal_rays
