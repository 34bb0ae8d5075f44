// Command-line front end: parameter checks, solves, support analysis, region
// scans, inequality suites, stability runs and calibration.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snls/snls.hpp"

namespace fs = std::filesystem;
using namespace snls;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_hypothesis = 2;
constexpr int exit_not_converged = 3;

struct Common {
    std::string out = "out";
    std::uint64_t seed = 1;
    std::vector<std::string> configs;
};

// Echo of everything that determined a run; written next to its outputs.
void write_manifest(const Common& c, const std::string& command, Json settings, const std::vector<std::string>& outputs) {
    Json j;
    j["command"] = command;
    j["seed"] = c.seed;
    Json cfgs = Json::array();
    for (const auto& path : c.configs) cfgs.push_back(path);
    j["config_files"] = cfgs;
    j["settings"] = std::move(settings);
    j["outputs"] = outputs;
    atomic_write(fs::path(c.out) / "manifest.json", dump_json(j));
}

RunConfig load_config(const std::string& path) { return parse_run_config(read_file(path)); }

std::string single_config(const Common& c) {
    require(c.configs.size() == 1, "usage", "this command needs exactly one --config");
    return c.configs.front();
}

Json optional_number(const std::optional<double>& x) { return x ? json_number(*x) : Json(); }

Json support_summary(const GridField& u, double threshold_rel) {
    return Json{{"threshold_rel", json_number(threshold_rel)},
                {"support_radius", json_number(numeric_support_radius(u, threshold_rel))},
                {"zero_ball_radius", json_number(zero_ball_radius(u, threshold_rel))}};
}

Json solve_json(const RadialProblem& p, const SolveResult& res) {
    Json j;
    j["status"] = res.converged ? "converged" : "not_converged";
    j["converged"] = res.converged;
    j["method"] = res.method;
    j["initial"] = res.initial_kind;
    j["iterations"] = res.iterations;
    j["residual"] = json_number(res.residual_l2);
    j["truncation_level"] = json_number(res.truncation_level);
    j["max_abs_u"] = json_number(max_abs(res.u));
    j["support"] = support_summary(res.u, 1e-8);
    if (p.params.exists_ok) {
        const auto pack = constants(p);
        j["constants"] = to_json(pack);
        j["bounds"] = to_json(check_apriori_bounds(res.u, p, pack));
    } else {
        j["constants"] = Json();
        j["bounds"] = Json();
        j["note"] = "linear case a = 0: constant pack undefined";
    }
    Json hist = Json::array();
    for (const auto& h : res.history)
        hist.push_back(Json{{"iteration", h.iteration},
                            {"update", json_number(h.update_norm)},
                            {"residual", json_number(h.residual)},
                            {"step", h.step}});
    j["history"] = hist;
    return j;
}

// First radius at which the source is nonzero; r_outer when it vanishes.
double source_inner_radius(const GridField& f) {
    for (std::size_t j = 0; j < f.size(); ++j)
        if (f.values[j] != Complex{}) return f.mesh.nodes[j];
    return f.mesh.domain.r_outer;
}

int cmd_check_params(const Common& c, const std::string& a_text, const std::string& b_text, double delta, double m,
                     int dim) {
    const Complex a = parse_complex(a_text), b = parse_complex(b_text);
    const auto p = make_params(a, b, delta);
    Json j;
    j["a"] = json_complex(a);
    j["b"] = json_complex(b);
    j["delta"] = json_number(delta);
    j["m"] = json_number(m);
    j["dim_N"] = dim;
    j["a_in_A"] = in_set_A(a);
    j["a_in_B"] = in_set_B(a);
    j["b_in_A"] = in_set_A(b);
    j["b_in_B"] = in_set_B(b);
    j["exists"] = p.exists_ok;
    j["unique"] = p.unique_ok;
    const Complex ab = a * std::conj(b);
    j["re_a_conj_b"] = json_number(ab.real());
    j["im_a_conj_b"] = json_number(ab.imag());
    if (p.exists_ok) {
        j["combination_case"] = combination_case(a, b);
        j["constants"] = to_json(constants(p, m, dim));
    } else {
        j["constants"] = Json();
    }
    const auto forms = uniqueness_existence_forms(a, b);
    j["uniqueness_and_existence"] = forms.both;
    atomic_write(fs::path(c.out) / "check_params.json", dump_json(j));
    write_manifest(c, "check-params",
                   Json{{"a", complex_text(a)}, {"b", complex_text(b)}, {"delta", json_number(delta)},
                        {"m", json_number(m)}, {"dim_N", dim}},
                   {"check_params.json"});
    std::cout << "exists=" << p.exists_ok << " unique=" << p.unique_ok << "\n";
    return exit_ok;
}

int cmd_solve(const Common& c) {
    const auto cfg = load_config(single_config(c));
    const auto p = cfg.spec.build();
    const auto res = solve(p, cfg.solver, cfg.opts);
    atomic_write(fs::path(c.out) / "solution.csv", field_csv(res.u));
    atomic_write(fs::path(c.out) / "source.csv", field_csv(p.source));
    atomic_write(fs::path(c.out) / "solve.json", dump_json(solve_json(p, res)));
    write_manifest(c, "solve", config_json(cfg), {"solution.csv", "source.csv", "solve.json"});
    std::cout << (res.converged ? "converged" : "not converged") << " after " << res.iterations
              << " iterations, residual " << format_double(res.residual_l2) << "\n";
    return res.converged ? exit_ok : exit_not_converged;
}

struct AnalyzeOptions {
    std::string solution;
    std::optional<double> rho0;
    double c_cal = 1.0;
    double threshold_rel = 1e-8;
    int tau_grid = 200;
    double s = 0.1;
    double eps = 0.25;
};

int cmd_analyze(const Common& c, const AnalyzeOptions& o) {
    const auto cfg = load_config(single_config(c));
    const auto p = cfg.spec.build();
    const GridField u = parse_field_csv(read_file(o.solution), cfg.spec.domain.dim);
    require(u.mesh == p.mesh() && std::abs(u.mesh.h - p.mesh().h) <= 1e-12 * p.mesh().h, "mesh_mismatch",
            "solution CSV does not match the configured mesh");
    const auto prof = energy_profiles(u, p.source, p.m);
    const auto ex = exponent_pack(p.m, p.domain().dim);
    Json rep;
    rep["calibration_C"] = json_number(o.c_cal);
    rep["threshold_rel"] = json_number(o.threshold_rel);
    rep["observed_support_radius"] = json_number(numeric_support_radius(u, o.threshold_rel));
    rep["observed_zero_ball_radius"] = json_number(zero_ball_radius(u, o.threshold_rel));
    Json thresholds, verdicts;
    if (!p.params.exists_ok) {
        rep["status"] = "hypothesis_failed";
        rep["note"] = "constant pack undefined for this (a,b)";
    } else if (!p.domain().is_ball()) {
        rep["status"] = "unsupported";
        rep["note"] = "balls centred away from the origin are not supported; annulus domains have no central ball";
    } else {
        const auto pack = constants(p);
        const double rho0 = prof.rho[prof.index(o.rho0.value_or(source_inner_radius(p.source)))];
        rep["status"] = "ok";
        rep["rho0"] = json_number(rho0);
        if (rho0 > 0.0 && prof.source_vanishes_inside(rho0)) {
            const auto rm = rho_max(prof, pack, ex, rho0, o.c_cal, o.tau_grid);
            rep["rho_max_predicted"] = json_number(rm.rho_max);
            rep["tau_star"] = json_number(rm.tau_star);
            verdicts["prediction_inside_zero_set"] = rm.rho_max <= zero_ball_radius(u, o.threshold_rel) + 1e-12;
            const auto audit = audit_differential_inequality(prof, pack, ex, 1.0, rho0, o.c_cal);
            verdicts["differential_inequality"] = audit.ok();
            rep["audit_min_rel_slack"] = json_number(audit.min_rel_slack);
        } else {
            rep["rho_max_predicted"] = Json();
            rep["tau_star"] = Json();
            rep["note"] = "source does not vanish on a ball around the origin";
        }
        const double rho1 = std::min(2.0 * rho0, p.domain().r_outer);
        if (rho0 > 0.0 && rho1 > rho0) {
            const auto t = source_energy_thresholds(pack, ex, rho0, rho1, prof.b[prof.index(rho1)], o.c_cal);
            thresholds["E_star"] = json_number(t.E_star);
            thresholds["eps_star"] = json_number(t.eps_star);
            verdicts["energy_below_E_star"] = prof.E[prof.index(rho0)] <= t.E_star;
        } else {
            thresholds["E_star"] = Json();
            thresholds["eps_star"] = Json();
        }
        if (rho0 > 0.0) {
            const auto sm = smallness_checks(prof, pack, ex, 0.5 * rho0, o.s, o.c_cal);
            thresholds["smallness_rho0"] = json_number(0.5 * rho0);
            thresholds["smallness_first_rhs"] = json_number(sm.rhs1);
            thresholds["smallness_second_rhs"] = json_number(sm.rhs2);
            verdicts["smallness_hypotheses"] = sm.hypotheses_ok;
            verdicts["smallness_first"] = sm.hypotheses_ok && sm.hold1;
            verdicts["smallness_second"] = sm.hypotheses_ok && sm.hold2;
        }
        const auto small = small_source_check(u, p.source, pack, ex, o.eps, o.c_cal, o.threshold_rel);
        thresholds["delta0"] = json_number(small.delta0);
        thresholds["source_norm"] = json_number(small.source_norm);
        verdicts["small_source_applicable"] = small.applicable;
        verdicts["small_source_contained"] = small.applicable && small.contained;
        rep["thresholds"] = thresholds;
        rep["verdicts"] = verdicts;
    }
    atomic_write(fs::path(c.out) / "support_report.json", dump_json(rep));
    atomic_write(fs::path(c.out) / "profiles.csv", profiles_csv(prof));
    Json settings = config_json(cfg);
    settings["solution"] = o.solution;
    settings["rho0"] = o.rho0 ? Json(json_number(*o.rho0)) : Json("auto");
    settings["C_cal"] = json_number(o.c_cal);
    settings["threshold_rel"] = json_number(o.threshold_rel);
    settings["tau_grid"] = o.tau_grid;
    settings["s"] = json_number(o.s);
    settings["eps"] = json_number(o.eps);
    write_manifest(c, "analyze", settings, {"support_report.json", "profiles.csv"});
    return exit_ok;
}

int cmd_scan(const Common& c, int count, bool off_lines, bool full) {
    const Axis axis{-2.0, 2.0, count};
    auto slice = [&](Axis ra, Axis ia, Axis rb, Axis ib) { return GridSpec{ra, ia, rb, ib, off_lines}; };
    auto fixed = [](double v) { return Axis{v, v, 1}; };
    const std::vector<std::pair<std::string, GridSpec>> slices = {
        {"region_b_a1.csv", slice(fixed(1.0), fixed(0.0), axis, axis)},
        {"region_b_a1p1i.csv", slice(fixed(1.0), fixed(1.0), axis, axis)},
        {"region_b_am1m1i.csv", slice(fixed(-1.0), fixed(-1.0), axis, axis)},
        {"region_a_b1.csv", slice(axis, axis, fixed(1.0), fixed(0.0))},
        {"region_a_b0.csv", slice(axis, axis, fixed(0.0), fixed(0.0))},
    };
    std::vector<std::string> outputs;
    for (const auto& [name, grid] : slices) {
        atomic_write(fs::path(c.out) / name, region_csv(classify_region(grid)));
        outputs.push_back(name);
    }
    const auto pts = classify_region(slice(axis, axis, axis, axis));
    std::size_t exists = 0, unique = 0, mismatches = 0;
    for (const auto& pt : pts) {
        exists += pt.exists;
        unique += pt.unique;
        const auto f = uniqueness_existence_forms(pt.a, pt.b);
        mismatches += (f.both != f.via_sets) || (f.both != f.via_sign);
    }
    if (full) {
        atomic_write(fs::path(c.out) / "region_full.csv", region_csv(pts));
        outputs.push_back("region_full.csv");
    }
    Json j{{"points", pts.size()}, {"exists", exists}, {"unique", unique}, {"equivalence_mismatches", mismatches}};
    atomic_write(fs::path(c.out) / "scan.json", dump_json(j));
    outputs.push_back("scan.json");
    write_manifest(c, "scan-params", Json{{"count", count}, {"off_lines", off_lines}, {"full", full}}, outputs);
    return mismatches == 0 ? exit_ok : exit_usage;
}

int cmd_verify(const Common& c, const std::string& which, std::uint64_t samples, double m) {
    const std::vector<std::string> all = {"young", "mono", "holder", "gn", "trace"};
    require(which == "all" || std::find(all.begin(), all.end(), which) != all.end(), "usage",
            "--which must be one of young, gn, trace, mono, holder, all");
    Json reports = Json::array();
    bool pass = true;
    auto add = [&](const IneqReport& r) {
        pass = pass && r.pass;
        reports.push_back(to_json(r));
    };
    for (const auto& name : all) {
        if (which != "all" && which != name) continue;
        FieldSampler fsamp;
        fsamp.m = m;
        if (name == "young") add(young_suite(samples, c.seed));
        if (name == "mono") add(monotonicity_suite(samples, c.seed, m));
        if (name == "holder") add(holder_suite(samples, c.seed, {0.1, 0.3, 0.5, 0.7, 0.9}));
        if (name == "gn") {
            add(field_ratio_suite("gn", samples, c.seed, fsamp));
            add(field_ratio_suite("gn_mass", samples, c.seed, fsamp));
        }
        if (name == "trace") add(field_ratio_suite("trace", samples, c.seed, fsamp));
    }
    atomic_write(fs::path(c.out) / "inequalities.json", dump_json(Json{{"pass", pass}, {"reports", reports}}));
    write_manifest(c, "verify-inequalities",
                   Json{{"which", which}, {"samples", samples}, {"m", json_number(m)}}, {"inequalities.json"});
    return pass ? exit_ok : exit_not_converged;
}

int cmd_stability(const Common& c, int pairs, int starts, std::optional<double> c_degenerate) {
    const auto cfg = load_config(single_config(c));
    const auto p = cfg.spec.build();
    require(p.params.unique_ok, "hypothesis_failed", "stability checks need the uniqueness hypothesis");
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> amp(-0.05, 0.05), rad(0.2, 1.0);
    const auto base = solve(p, cfg.solver, cfg.opts);
    require(base.converged, "not_converged", "base solve did not converge");
    const double R = p.domain().r_outer;
    Json pair_reports = Json::array();
    bool pass = true;
    for (int k = 0; k < pairs; ++k) {
        const Complex bump_amp(amp(rng), amp(rng));
        const double radius = rad(rng) * R;
        GridField f2 = p.source;
        const auto extra = bump_source(p.mesh(), bump_amp, radius);
        for (std::size_t j = 0; j < f2.size(); ++j) f2.values[j] += extra.values[j];
        const auto p2 = make_problem(p.params, p.m, f2);
        const auto sol2 = solve(p2, cfg.solver, cfg.opts);
        Json r{{"bump_amplitude", json_complex(bump_amp)}, {"bump_radius", json_number(radius)},
               {"converged", sol2.converged}};
        if (sol2.converged) {
            try {
                const auto dep = dependence_check(base.u, sol2.u, p.source, f2, p.params, c_degenerate, p.m, 0.01,
                                                  p.mesh().h * field_l2(p.source - f2));
                r["case_id"] = dep.case_id;
                r["lhs"] = json_number(dep.lhs);
                r["rhs"] = json_number(dep.rhs);
                r["pass"] = dep.pass;
                r["constant"] = dep.case_id == "a_nonzero_degenerate" ? "calibrated" : "explicit";
                pass = pass && dep.pass;
            } catch (const Error& e) {
                r["error"] = e.reason();
                r["message"] = e.what();
            }
            const auto id = energy_identity_check(base.u, sol2.u, p.source, f2, p.params, p.m);
            r["identity_case"] = id.case_id;
            r["weighted_identity"] = optional_number(id.weighted_identity);
            r["real_identity"] = optional_number(id.real_identity);
            r["imag_identity"] = optional_number(id.imag_identity);
            r["identity_scale"] = json_number(id.scale);
        } else {
            pass = false;
        }
        pair_reports.push_back(r);
    }
    Json probe_json;
    if (starts >= 2) {
        const auto probe = uniqueness_probe(p, starts, c.seed, cfg.opts, cfg.solver);
        Json per = Json::array();
        for (const auto& s : probe.starts)
            per.push_back(Json{{"converged", s.converged}, {"iterations", s.iterations},
                               {"residual", json_number(s.residual)}});
        probe_json = Json{{"hypothesis_holds", probe.hypothesis_holds},
                          {"max_distance", json_number(probe.max_distance)},
                          {"tol", json_number(probe.tol)},
                          {"within_10_tol", probe.max_distance <= 10.0 * probe.tol},
                          {"starts", per}};
        pass = pass && probe.all_converged() && probe.max_distance <= 10.0 * probe.tol;
    }
    atomic_write(fs::path(c.out) / "stability.json",
                 dump_json(Json{{"pass", pass}, {"pairs", pair_reports}, {"probe", probe_json}}));
    Json settings = config_json(cfg);
    settings["pairs"] = pairs;
    settings["starts"] = starts;
    settings["c_degenerate"] = c_degenerate ? Json(json_number(*c_degenerate)) : Json("uncalibrated");
    write_manifest(c, "stability", settings, {"stability.json"});
    return pass ? exit_ok : exit_not_converged;
}

int cmd_calibrate(const Common& c, const std::vector<std::size_t>& levels, const std::vector<double>& taus,
                  const std::vector<double>& rho0s) {
    require(!c.configs.empty(), "usage", "calibrate needs at least one --config");
    require(rho0s.empty() || rho0s.size() == c.configs.size(), "usage", "--rho0 needs one value per --config");
    std::vector<CalibrationInstance> family;
    Json settings = Json::array();
    for (std::size_t i = 0; i < c.configs.size(); ++i) {
        const auto cfg = load_config(c.configs[i]);
        const auto p = cfg.spec.build();
        require(p.domain().is_ball(), "unsupported", "calibration instances must be balls");
        const double rho0 = rho0s.empty() ? source_inner_radius(p.source) : rho0s[i];
        family.push_back({cfg.spec, rho0, c.configs[i]});
        Json s = config_json(cfg);
        s["rho0"] = json_number(rho0);
        settings.push_back(s);
    }
    CalibrationOptions opts;
    opts.levels = levels;
    if (!taus.empty()) opts.taus = taus;
    const auto r = calibrate_C(family, opts);
    Json recs = Json::array();
    for (const auto& rec : r.records)
        recs.push_back(Json{{"label", rec.label},
                            {"nodes", rec.nodes},
                            {"converged", rec.converged},
                            {"rho0", json_number(rec.rho0)},
                            {"observed_zero_radius", json_number(rec.observed_zero_radius)},
                            {"need_rho_max", json_number(rec.need_rho_max)},
                            {"need_audit", json_number(rec.need_audit)}});
    atomic_write(fs::path(c.out) / "calibration.json",
                 dump_json(Json{{"C_cal", json_number(r.c_cal)},
                                {"required", json_number(r.required)},
                                {"floor_active", r.floor_active},
                                {"margin", json_number(opts.margin)},
                                {"records", recs}}));
    Json lv = Json::array();
    for (auto n : levels) lv.push_back(n);
    write_manifest(c, "calibrate", Json{{"instances", settings}, {"levels", lv}}, {"calibration.json"});
    std::cout << "C_cal=" << format_double(r.c_cal) << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solver and dead-core analysis for -i Lap u + a|u|^(m-1)u + b u = F"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub, bool config) {
        sub->add_option("--out", common.out, "output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "random seed")->capture_default_str();
        if (config) sub->add_option("--config", common.configs, "config file (key = value lines)");
    };

    std::string a_text, b_text;
    double delta = 1.0, m_check = 0.5;
    int dim_check = 1;
    auto* check = app.add_subcommand("check-params", "hypotheses and constants for (a, b)");
    add_common(check, false);
    check->add_option("--a", a_text, "a as re,im")->required();
    check->add_option("--b", b_text, "b as re,im")->required();
    check->add_option("--delta", delta)->capture_default_str();
    check->add_option("--m", m_check)->capture_default_str();
    check->add_option("--dim", dim_check)->capture_default_str();

    auto* solve_cmd = app.add_subcommand("solve", "solve one configured problem");
    add_common(solve_cmd, true);

    AnalyzeOptions ao;
    auto* analyze = app.add_subcommand("analyze", "support analysis of a solution");
    add_common(analyze, true);
    analyze->add_option("--solution", ao.solution, "solution CSV")->required();
    analyze->add_option("--rho0", ao.rho0, "radius of the source-free ball (default: inner edge of F)");
    analyze->add_option("--C-cal", ao.c_cal)->capture_default_str();
    analyze->add_option("--threshold-rel", ao.threshold_rel)->capture_default_str();
    analyze->add_option("--tau-grid", ao.tau_grid)->capture_default_str();
    analyze->add_option("--s", ao.s)->capture_default_str();
    analyze->add_option("--eps", ao.eps)->capture_default_str();

    int scan_count = 21;
    bool off_lines = false, full = false;
    auto* scan = app.add_subcommand("scan-params", "region maps over coefficient grids");
    add_common(scan, false);
    scan->add_option("--count", scan_count, "points per axis")->capture_default_str();
    scan->add_flag("--off-lines", off_lines, "place points at cell centres");
    scan->add_flag("--full", full, "also write the full four-dimensional grid");

    std::string which = "all";
    std::uint64_t samples = 100000;
    double m_verify = 0.5;
    auto* verify = app.add_subcommand("verify-inequalities", "randomized inequality suites");
    add_common(verify, false);
    verify->add_option("--which", which)->capture_default_str();
    verify->add_option("--samples", samples)->capture_default_str();
    verify->add_option("--m", m_verify)->capture_default_str();

    int pairs = 10, starts = 5;
    std::optional<double> c_degenerate;
    auto* stability = app.add_subcommand("stability", "continuous dependence and uniqueness probes");
    add_common(stability, true);
    stability->add_option("--pairs", pairs)->capture_default_str();
    stability->add_option("--starts", starts)->capture_default_str();
    stability->add_option("--c-degenerate", c_degenerate, "calibrated constant for Re(a conj b) = 0");

    std::vector<std::size_t> levels;
    std::vector<double> taus, rho0s;
    auto* calibrate = app.add_subcommand("calibrate", "calibrate the localization constant on a family");
    add_common(calibrate, true);
    calibrate->add_option("--levels", levels, "node counts")->delimiter(',');
    calibrate->add_option("--taus", taus, "tau values for the audit")->delimiter(',');
    calibrate->add_option("--rho0", rho0s, "one source-free radius per config")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*check) return cmd_check_params(common, a_text, b_text, delta, m_check, dim_check);
        if (*solve_cmd) return cmd_solve(common);
        if (*analyze) return cmd_analyze(common, ao);
        if (*scan) return cmd_scan(common, scan_count, off_lines, full);
        if (*verify) return cmd_verify(common, which, samples, m_verify);
        if (*stability) return cmd_stability(common, pairs, starts, c_degenerate);
        if (*calibrate) return cmd_calibrate(common, levels, taus, rho0s);
    } catch (const Error& e) {
        std::cerr << "error (" << e.reason() << "): " << e.what() << "\n";
        if (e.reason() == "hypothesis_failed") {
            try {
                atomic_write(fs::path(common.out) / "status.json",
                             dump_json(Json{{"status", "hypothesis_failed"}, {"message", e.what()}}));
            } catch (const std::exception&) {
            }
            return exit_hypothesis;
        }
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
