// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "snls/snls.hpp"

namespace fs = std::filesystem;
using namespace snls;

namespace {

const Complex I{0.0, 1.0};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

std::string fmt(double x) { return format_double(x); }

ProblemSpec spec_of(int dim, double R, std::size_t nodes, Complex a, Complex b, double m, const std::string& kind,
                    std::vector<double> params) {
    ProblemSpec s;
    s.domain = ball(dim, R);
    s.n_nodes = nodes;
    s.a = a;
    s.b = b;
    s.m = m;
    s.source_kind = kind;
    s.source_params = std::move(params);
    return s;
}

ProblemSpec dead_core(std::size_t nodes, Complex a = 1.0, Complex b = I) {
    return spec_of(1, 2.0, nodes, a, b, 0.5, "plateau", {0.1, 0.3});
}

// Criterion 1 ---------------------------------------------------------------

double draw_component(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), coin(0.0, 1.0);
    return coin(rng) < 0.3 ? 0.0 : u(rng);
}

bool tuple_admissible(Complex a, Complex b, double c0, double c1, double c2, double c3) {
    return std::abs(c1 + a.imag() * c2 + b.imag() * c3) <= c0 && std::abs(a.real() * c2 + b.real() * c3) <= c0;
}

void lemma_suite(Outcome& o) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::set<int> cases;
    int pairs = 0;
    long violations = 0, checked = 0;
    while (pairs < 1000) {
        const Complex a{draw_component(rng), draw_component(rng)}, b{draw_component(rng), draw_component(rng)};
        if (!check_existence(a, b)) continue;
        ++pairs;
        cases.insert(combination_case(a, b));
        const auto pack = constants(a, b, 0.5 + unit(rng));
        for (int accepted = 0; accepted < 100;) {
            const double c0 = 2.0 * unit(rng), c1 = 3.0 * unit(rng), c2 = 3.0 * unit(rng), c3 = 3.0 * unit(rng);
            if (!tuple_admissible(a, b, c0, c1, c2, c3)) continue;
            ++accepted;
            ++checked;
            violations += !combine_energy_bounds(pack, c0, c1, c2, c3);
        }
    }
    o.detail << "pairs=" << pairs << " tuples=" << checked << " violations=" << violations
             << " cases=" << cases.size();
    o.expect(violations == 0, "violations");
    o.expect(cases == std::set<int>{1, 2, 3, 4, 5, 6}, "not all six cases covered");
}

// Criterion 2 ---------------------------------------------------------------

// Direct transcription of the admissible regions, kept separate from the library.
bool oracle_in_A(Complex z) { return z.real() != 0.0 || z.imag() > 0.0; }

void geometry_suite(Outcome& o) {
    const Axis full{-2.0, 2.0, 21};
    std::size_t mismatches = 0, membership = 0, unique_without_exist = 0;
    const auto pts = classify_region(GridSpec{full, full, full, full, false});
    for (const auto& p : pts) {
        const auto f = uniqueness_existence_forms(p.a, p.b);
        mismatches += (f.both != f.via_sets) || (f.both != f.via_sign);
        membership += p.in_A != oracle_in_A(p.a) || p.in_B != (oracle_in_A(p.b) || p.b == Complex{});
        unique_without_exist += p.unique && !p.exists && p.in_A;
    }
    const auto off = classify_region(GridSpec{full, full, full, full, true});
    for (const auto& p : off) {
        const auto f = uniqueness_existence_forms(p.a, p.b);
        mismatches += (f.both != f.via_sets) || (f.both != f.via_sign);
    }
    const fs::path golden_dir(SNLS_GOLDEN_DIR);
    auto fixed = [](double v) { return Axis{v, v, 1}; };
    const std::vector<std::pair<const char*, GridSpec>> slices = {
        {"region_b_a1.csv", {fixed(1.0), fixed(0.0), full, full, false}},
        {"region_b_a1p1i.csv", {fixed(1.0), fixed(1.0), full, full, false}},
        {"region_b_am1m1i.csv", {fixed(-1.0), fixed(-1.0), full, full, false}},
        {"region_a_b1.csv", {full, full, fixed(1.0), fixed(0.0), false}},
        {"region_a_b0.csv", {full, full, fixed(0.0), fixed(0.0), false}},
    };
    int golden_bad = 0;
    for (const auto& [name, grid] : slices) golden_bad += region_csv(classify_region(grid)) != read_file(golden_dir / name);
    o.detail << "points=" << pts.size() + off.size() << " form_mismatches=" << mismatches
             << " membership_mismatches=" << membership << " golden_mismatches=" << golden_bad;
    o.expect(mismatches == 0, "equivalent forms disagree");
    o.expect(membership == 0, "set membership disagrees with oracle");
    o.expect(golden_bad == 0, "golden region files differ");
}

// Criterion 3 ---------------------------------------------------------------

void inequality_suite(Outcome& o) {
    const auto young = young_suite(1000000, 1);
    o.expect(young.pass && young.worst_slack >= 0.0, "young");
    const auto mono = monotonicity_suite(1000000, 2, 0.5);
    o.expect(mono.pass, "monotonicity");
    const auto holder = holder_suite(1000000, 3, {0.1, 0.3, 0.5, 0.7, 0.9});
    o.expect(holder.pass && *holder.extremal_ratio <= 5.0, "holder");
    o.detail << "young_worst=" << fmt(young.worst_slack) << " mono_worst=" << fmt(mono.worst_slack)
             << " holder_max=" << fmt(*holder.extremal_ratio);
    for (const char* which : {"gn", "gn_mass", "trace"})
        for (int dim : {1, 2, 3}) {
            FieldSampler coarse;
            coarse.domain = ball(dim, 1.0);
            coarse.nodes = 257;
            FieldSampler fine = coarse;
            fine.nodes = 513;
            const auto a = field_ratio_suite(which, 300, 9, coarse);
            const auto b = field_ratio_suite(which, 300, 9, fine);
            const double ratio = *b.empirical_constant / *a.empirical_constant;
            o.detail << " " << which << dim << "=" << fmt(ratio);
            o.expect(a.pass && b.pass, std::string(which) + " suite");
            o.expect(std::abs(ratio - 1.0) <= 0.2, std::string(which) + " mesh drift");
        }
}

// Criterion 4 ---------------------------------------------------------------

void solver_suite(Outcome& o) {
    for (int dim : {1, 2, 3}) {
        std::vector<double> err;
        for (std::size_t n : {65, 129, 257}) {
            const auto p = spec_of(dim, 1.0, n, 1.0, I, 0.5, "manufactured", {2.0, 1.0}).build();
            const auto res = solve(p, "picard");
            o.expect(res.converged, "manufactured solve");
            err.push_back(field_l2(res.u - profile_field(p.mesh(), PowerProfile{2.0, 1.0})));
        }
        const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
        o.detail << " order_N" << dim << "=" << fmt(std::min(o1, o2));
        o.expect(o1 >= 1.9 && o2 >= 1.9, "order");
    }
    SolveOptions opts;
    double worst_gap = 0.0;
    for (const auto& s : {spec_of(1, 1.0, 129, 1.0, I, 0.5, "manufactured", {2.0, 1.0}),
                          spec_of(3, 1.0, 129, 1.0, I, 0.5, "manufactured", {2.0, 1.0}), dead_core(257),
                          spec_of(1, 2.0, 129, 1.0, 1.0, 0.5, "bump", {0.5, 1.0})}) {
        const auto p = s.build();
        const auto a = solve(p, "picard", opts), b = solve(p, "newton", opts);
        o.expect(a.converged && b.converged, "picard/newton convergence");
        worst_gap = std::max(worst_gap, field_l2(a.u - b.u));
    }
    o.detail << " picard_newton_gap=" << fmt(worst_gap);
    o.expect(worst_gap <= 10.0 * opts.tol, "picard/newton gap");
    double worst_poisson = 0.0;
    for (int dim : {1, 2, 3})
        for (double R : {1.0, 2.0})
            for (std::size_t n : {33, 65, 129}) {
                const auto mesh = build_mesh(ball(dim, R), n);
                const auto u = solve_linear_poisson(assemble_laplacian(mesh), sample(mesh, [](double) { return Complex(1.0); }));
                double e = 0.0;
                for (std::size_t j = 0; j < mesh.size(); ++j) {
                    const double r = mesh.nodes[j];
                    e = std::max(e, std::abs(u.values[j] - (R * R - r * r) / (2.0 * dim)));
                }
                worst_poisson = std::max(worst_poisson, e / (mesh.h * mesh.h));
            }
    o.detail << " poisson_err_over_h2=" << fmt(worst_poisson);
    o.expect(worst_poisson <= 10.0, "poisson closed form");
}

// Criteria 5 and 6 ----------------------------------------------------------

std::vector<ProblemSpec> scenarios() {
    return {
        dead_core(257),
        spec_of(1, 2.0, 257, 1.0, 1.0, 0.5, "bump", {0.5, 1.0}),
        spec_of(2, 1.5, 257, I, I, 0.3, "bump", {0.4, 1.2}),
        spec_of(3, 2.0, 257, Complex(1.0, 1.0), 1.0, 0.7, "shell", {0.05, 0.5, 1.0}),
        spec_of(3, 1.0, 129, 1.0, I, 0.5, "manufactured", {2.0, 1.0}),
        spec_of(1, 1.0, 257, Complex(-1.0, -1.0), -1.0, 0.5, "plateau", {0.2, 0.5}),
        spec_of(1, 2.0, 257, 0.0, Complex(1.0, 1.0), 0.5, "plateau", {0.1, 0.3}),
    };
}

// Imaginary and real parts of the tested identity at the outer radius.
void identity_suite(Outcome& o) {
    double worst = 0.0;
    int n = 0;
    for (const auto& s : scenarios()) {
        const auto p = s.build();
        const auto res = solve(p, "picard");
        if (!res.converged) {
            o.expect(false, "solve did not converge");
            continue;
        }
        ++n;
        const auto prof = energy_profiles(res.u, p.source, p.m);
        const std::size_t k = prof.size() - 1;
        const Complex a = p.params.a, b = p.params.b;
        const Complex pair = inner_product(p.source, res.u);
        const double im = prof.E[k] + a.imag() * prof.b[k] + b.imag() * prof.m2[k] - pair.imag();
        const double re = a.real() * prof.b[k] + b.real() * prof.m2[k] - pair.real();
        const double h1 = prof.E[k] + prof.m2[k];
        const double slack = 10.0 * p.mesh().h * (h1 + field_l2(p.source) * field_l2(res.u));
        worst = std::max(worst, std::max(std::abs(im), std::abs(re)) / slack);
    }
    o.detail << "solutions=" << n << " worst_residual_over_slack=" << fmt(worst);
    o.expect(worst <= 1.0, "identity residual above slack");
}

void bound_suite(Outcome& o) {
    int passed = 0, total = 0;
    for (const auto& s : scenarios()) {
        const auto p = s.build();
        if (!p.params.exists_ok) continue;
        ++total;
        const auto res = solve(p, "picard");
        const auto rep = check_apriori_bounds(res.u, p, constants(p), 0.01);
        passed += res.converged && rep.pass1;
        o.detail << " " << fmt(rep.lhs1 / rep.rhs1);
        o.expect(res.converged && rep.pass1, "bound violated");
    }
    o.detail << " scenarios=" << total << " passed=" << passed;
    o.expect(passed >= 5, "fewer than five scenarios");
}

// Criteria 7 and 8 ----------------------------------------------------------

void dead_core_suite(Outcome& o) {
    std::vector<double> radii;
    for (std::size_t n : {257, 513}) {
        const auto res = solve(dead_core(n).build(), "picard");
        o.expect(res.converged, "solve");
        const double R = 2.0, h = res.u.mesh.h;
        const double supp = numeric_support_radius(res.u, 1e-8);
        double outside = 0.0;
        for (std::size_t j = 0; j < res.u.size(); ++j)
            if (res.u.mesh.nodes[j] > supp) outside = std::max(outside, std::abs(res.u.values[j]));
        o.expect(supp < R - 2.0 * h, "support reaches boundary");
        o.expect(outside <= 1e-8 * max_abs(res.u), "tail above threshold");
        radii.push_back(supp);
        o.detail << " n" << n << "_support=" << fmt(supp);
    }
    o.expect(std::abs(radii[1] - radii[0]) <= 0.05 * radii[0], "support radius unstable");
}

void linear_suite(Outcome& o) {
    const auto res = solve(dead_core(257, 0.0, Complex(1.0, 1.0)).build(), "picard");
    o.expect(res.converged, "solve");
    const double R = 2.0, h = res.u.mesh.h, mx = max_abs(res.u);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < res.u.size(); ++j) {
        const double r = res.u.mesh.nodes[j];
        if (r > 0.3 && r < R - 2.0 * h) worst = std::min(worst, std::abs(res.u.values[j]) / mx);
    }
    o.detail << "min_rel_modulus=" << fmt(worst);
    o.expect(worst > 1e-8, "solution vanishes");
}

// Criterion 9 ---------------------------------------------------------------

void localization_suite(Outcome& o) {
    std::vector<CalibrationInstance> family;
    for (int dim : {1, 2, 3})
        for (double amp : {0.01, 0.03})
            for (double lo : {0.8, 1.0})
                family.push_back({spec_of(dim, 2.0, 257, 1.0, I, 0.5, "shell", {amp, lo, lo + 0.3}), lo,
                                  "N" + std::to_string(dim)});
    CalibrationOptions opts;
    opts.levels = {257, 513};
    opts.taus = {1.0, 0.9, 0.8};
    const auto cal = calibrate_C(family, opts);
    int violations = 0, members = 0;
    for (const auto& inst : family)
        for (std::size_t n : opts.levels) {
            const auto p = inst.spec.build(n);
            const auto res = solve(p, "picard");
            o.expect(res.converged, "solve");
            const auto prof = energy_profiles(res.u, p.source, p.m);
            const auto rm = rho_max(prof, constants(p), exponent_pack(p.m, p.domain().dim), inst.rho0, cal.c_cal);
            ++members;
            violations += rm.rho_max > zero_ball_radius(res.u, opts.threshold_rel) + 1e-12;
        }
    o.detail << "C_cal=" << fmt(cal.c_cal) << " members=" << members << " containment_violations=" << violations;
    o.expect(violations == 0, "predicted ball leaves the zero set");
}

// Criterion 10 --------------------------------------------------------------

void dependence_suite(Outcome& o) {
    const auto base_spec = spec_of(1, 2.0, 257, 1.0, 1.0, 0.5, "bump", {0.5, 1.0});
    const auto p1 = base_spec.build();
    const auto s1 = solve(p1, "picard");
    o.expect(s1.converged, "base solve");
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> amp(-0.05, 0.05), rad(0.2, 1.8);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        GridField f2 = p1.source;
        const auto extra = bump_source(p1.mesh(), Complex(amp(rng), amp(rng)), rad(rng));
        for (std::size_t j = 0; j < f2.size(); ++j) f2.values[j] += extra.values[j];
        const auto p2 = make_problem(p1.params, p1.m, f2);
        const auto s2 = solve(p2, "picard");
        o.expect(s2.converged, "perturbed solve");
        const double df = field_l2(p1.source - f2);
        const auto rep = dependence_check(s1.u, s2.u, p1.source, f2, p1.params, std::nullopt, p1.m, 0.01,
                                          p1.mesh().h * df);
        o.expect(rep.pass, "dependence bound");
        worst = std::max(worst, rep.lhs / rep.rhs);
    }
    o.detail << "worst_lhs_over_rhs=" << fmt(worst);
    double spread = 0.0;
    for (const auto& [a, b] : std::vector<std::pair<Complex, Complex>>{{1.0, 1.0}, {1.0, I}, {I, I}}) {
        const auto probe = uniqueness_probe(spec_of(1, 2.0, 257, a, b, 0.5, "bump", {0.5, 1.0}).build(), 5, 77);
        o.expect(probe.hypothesis_holds && probe.all_converged(), "probe convergence");
        o.expect(probe.max_distance <= 10.0 * probe.tol, "probe spread");
        spread = std::max(spread, probe.max_distance / probe.tol);
    }
    o.detail << " probe_spread_over_tol=" << fmt(spread);
}

// Criterion 11 --------------------------------------------------------------

void standing_wave_suite(Outcome& o) {
    const auto mesh = build_mesh(ball(1, 2.0), 257);
    const StandingWaveProblem sw{-1.0, 1.0, plateau_source(mesh, 0.1, 0.3)};
    const double m = 0.5;
    const auto res = solve(to_radial_problem(sw, m), "picard");
    o.expect(res.converged, "solve");
    const auto s0 = standing_wave(res.u, sw, m, 0.0);
    // Drift relative to the size of the terms; the residual itself is rounding noise.
    const auto lu = assemble_laplacian(mesh).apply(res.u.values);
    double scale = 0.0;
    for (std::size_t j = 0; j < mesh.size(); ++j)
        scale = std::max(scale, std::abs(lu[j]) + std::abs(sw.lambda) * std::pow(std::abs(res.u.values[j]), m) +
                                    std::abs(sw.source.values[j]) + std::abs(sw.b) * std::abs(res.u.values[j]));
    double worst = 0.0;
    bool same_support = true;
    for (double t : {0.0, 0.5, 1.7, 10.0}) {
        const auto st = standing_wave(res.u, sw, m, t);
        for (std::size_t j = 0; j < mesh.size(); ++j) {
            const double r0 = std::abs(s0.residual.values[j]), rt = std::abs(st.residual.values[j]);
            worst = std::max(worst, std::abs(rt - r0) / scale);
            same_support = same_support && ((st.u.values[j] == Complex{}) == (res.u.values[j] == Complex{}));
        }
        same_support = same_support && numeric_support_radius(st.u) == numeric_support_radius(res.u);
    }
    o.detail << "max_rel_residual_drift=" << fmt(worst) << " support_radius=" << fmt(numeric_support_radius(res.u));
    o.expect(worst <= 1e-13, "residual depends on t");
    o.expect(same_support, "support changes");
}

// Criterion 12 --------------------------------------------------------------

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

void determinism_suite(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "snls_acceptance_determinism";
    fs::remove_all(root);
    const std::string cli = SNLS_CLI_PATH, cfg = SNLS_CONFIG_DIR;
    const std::vector<std::string> commands = {
        "solve --config " + cfg + "/dead_core.cfg",
        "verify-inequalities --which all --samples 3000 --seed 11",
        "stability --config " + cfg + "/dependence.cfg --pairs 3 --starts 3 --seed 4",
        "scan-params --count 9",
    };
    int compared = 0, differing = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<fs::path> dirs;
        for (int rep = 0; rep < 2; ++rep) {
            dirs.push_back(root / ("cmd" + std::to_string(c)) / ("run" + std::to_string(rep)));
            const int rc = run(cli + " " + commands[c] + " --out " + dirs.back().string());
            o.expect(rc == 0, "command failed: " + commands[c]);
        }
        if (c == 0) {
            // Same arguments for both analyses, including the solution path.
            for (int rep = 0; rep < 2; ++rep) {
                const int rc = run(cli + " analyze --config " + cfg + "/dead_core.cfg --solution " +
                                   (dirs[0] / "solution.csv").string() + " --out " + (dirs[rep] / "analysis").string());
                o.expect(rc == 0, "analyze failed");
            }
        }
        for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
            if (!entry.is_regular_file()) continue;
            const auto rel = fs::relative(entry.path(), dirs[0]);
            ++compared;
            const auto other = dirs[1] / rel;
            if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
                ++differing;
                o.expect(false, "differs: " + rel.string());
            }
        }
    }
    o.detail << "files_compared=" << compared << " differing=" << differing;
    o.expect(compared >= 10, "too few outputs compared");
    fs::remove_all(root);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"lemma combination over sampled pairs and tuples", lemma_suite},
        {"hypothesis geometry and golden region maps", geometry_suite},
        {"inequality suites and mesh-stable field constants", inequality_suite},
        {"solver convergence order, Picard/Newton agreement, Poisson closed form", solver_suite},
        {"discrete energy identities at the outer radius", identity_suite},
        {"a-priori energy bound on distinct scenarios", bound_suite},
        {"dead core for a=1, b=i, plateau source", dead_core_suite},
        {"no dead core in the linear case a=0, b=1+i", linear_suite},
        {"calibrated localization balls lie in the zero set", localization_suite},
        {"continuous dependence and uniqueness probes", dependence_suite},
        {"standing wave residual and support are time independent", standing_wave_suite},
        {"byte-identical CLI reports across repeated runs", determinism_suite},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failures += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << " " << criteria[i].first << ": "
                  << o.detail.str() << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
