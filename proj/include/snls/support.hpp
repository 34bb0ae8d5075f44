#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "snls/mesh.hpp"
#include "snls/params.hpp"
#include "snls/solver.hpp"
#include "snls/sources.hpp"

namespace snls {

// Exponents shared by the localization estimates; all depend on (m, N) only.
struct ExponentPack {
    double m = 0.5;
    int dim = 1;
    double k = 0.0;
    double nu = 0.0;
    double theta = 0.0;
    double ell_gn = 0.0;
    double delta_it = 0.0;
    double p = 0.0;

    double gamma(double tau) const { return (2.0 * tau - (1.0 + m)) / k; }
    double mu(double tau) const { return 2.0 * (1.0 - tau) / k; }
    double eta(double tau) const { return (1.0 - m) / (1.0 + m) - gamma(tau); }
    double tau_lo() const { return 0.5 * (m + 1.0); }
};

inline ExponentPack exponent_pack(double m, int dim) {
    require(m > 0.0 && m < 1.0, "invalid_m", "m must lie in (0,1)");
    require(dim >= 1, "invalid_dim", "dimension must be at least 1");
    ExponentPack e;
    e.m = m;
    e.dim = dim;
    e.k = 2.0 * (1.0 + m) + dim * (1.0 - m);
    e.nu = e.k / (m + 1.0);
    e.theta = ((1.0 + m) + dim * (1.0 - m)) / e.k;
    e.ell_gn = 1.0 / (e.theta * (1.0 + m));
    e.delta_it = e.k / (2.0 * (1.0 + m));
    e.p = e.k / (1.0 - m);
    return e;
}

// Node-indexed ball functionals. fpow is |F|_{(m+1)/m}^{(m+1)/m} and fsup the
// running maximum of |F|, both over B(0, rho).
struct EnergyProfiles {
    double m = 0.5;
    double h = 0.0;
    std::vector<double> rho, E, b, m2, I, J, fpow, fsup;

    std::size_t size() const { return rho.size(); }
    std::size_t index(double r) const {
        require(!rho.empty(), "empty_profiles", "profiles are empty");
        require(r >= rho.front() - 1e-12 && r <= rho.back() * (1.0 + 1e-12), "rho_out_of_domain",
                "radius lies outside the profiles");
        const auto k = static_cast<long>(std::llround((r - rho.front()) / h));
        return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(rho.size()) - 1));
    }
    // True when F vanishes at every node strictly inside B(0, r).
    bool source_vanishes_inside(double r) const {
        const std::size_t k = index(r);
        return k == 0 || fsup[k - 1] == 0.0;
    }
};

inline EnergyProfiles energy_profiles(const GridField& u, const GridField& source, double m) {
    require_same_mesh(u, source);
    const auto& mesh = u.mesh;
    const std::size_t n = u.size();
    const auto du = radial_derivative(u);
    std::vector<double> grad(n), mass(n), sq(n), fu(n), fp(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double au = std::abs(u.values[j]), af = std::abs(source.values[j]);
        grad[j] = std::norm(du[j]);
        mass[j] = std::pow(au, m + 1.0);
        sq[j] = au * au;
        fu[j] = af * au;
        fp[j] = std::pow(af, (m + 1.0) / m);
    }
    EnergyProfiles prof;
    prof.m = m;
    prof.h = mesh.h;
    prof.rho = mesh.nodes;
    prof.E = cumulative_ball_integral(mesh, grad);
    prof.b = cumulative_ball_integral(mesh, mass);
    prof.m2 = cumulative_ball_integral(mesh, sq);
    prof.J = cumulative_ball_integral(mesh, fu);
    prof.fpow = cumulative_ball_integral(mesh, fp);
    prof.I.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) prof.I[j] = boundary_flux_at(u, du, j);
    if (!mesh.domain.is_ball()) prof.I[0] = boundary_flux_at(u, du, 0);
    prof.fsup.resize(n);
    double run = 0.0;
    for (std::size_t j = 0; j < n; ++j) prof.fsup[j] = run = std::max(run, std::abs(source.values[j]));
    return prof;
}

// Positive powers of b(rho), with the zero-solution limit mapped to 0.
inline double b_factor(double b, double mu, double eta) {
    if (b <= 0.0) return 0.0;
    return std::max(std::pow(b, mu), std::pow(b, eta));
}

// Quantity minimised over tau in the dead-core radius estimate.
inline double rho_max_objective(double E, double b, const ExponentPack& ex, double tau) {
    if (E <= 0.0) return 0.0;
    const double g = ex.gamma(tau);
    return std::pow(E, g) * std::max(std::pow(b, ex.mu(tau)), std::pow(b, ex.eta(tau))) /
           (2.0 * tau - (1.0 + ex.m));
}

struct TauMinimum {
    double tau;
    double value;
};

// Grid search on the open tau interval, then golden-section polish.
inline TauMinimum minimize_over_tau(double E, double b, const ExponentPack& ex, int grid_points = 200) {
    require(grid_points >= 2, "invalid_grid", "tau grid needs at least two points");
    const double lo = ex.tau_lo() + 1e-6, hi = 1.0;
    auto obj = [&](double t) { return rho_max_objective(E, b, ex, t); };
    std::vector<double> taus(grid_points);
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_points; ++i) {
        taus[i] = lo + (hi - lo) * i / (grid_points - 1.0);
        const double v = obj(taus[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double x0 = taus[std::max(best - 1, 0)], x3 = taus[std::min(best + 1, grid_points - 1)];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = x3 - ratio * (x3 - x0), x2 = x0 + ratio * (x3 - x0);
    double f1 = obj(x1), f2 = obj(x2);
    for (int it = 0; it < 100 && x3 - x0 > 1e-14; ++it) {
        if (f1 < f2) {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - ratio * (x3 - x0);
            f1 = obj(x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + ratio * (x3 - x0);
            f2 = obj(x2);
        }
    }
    TauMinimum out{taus[best], best_val};
    for (auto [t, v] : {std::pair{x1, f1}, std::pair{x2, f2}})
        if (v < out.value) out = {t, v};
    return out;
}

struct RhoMaxResult {
    double rho_max;
    double tau_star;
};

inline RhoMaxResult rho_max_from_values(double E, double b, double L, double M, const ExponentPack& ex, double rho0,
                                        double c_cal, int tau_grid = 200) {
    require(rho0 > 0.0, "invalid_radius", "rho0 must be positive");
    require(c_cal > 0.0, "invalid_constant", "calibration constant must be positive");
    const auto tm = minimize_over_tau(E, b, ex, tau_grid);
    const double lead = c_cal * M * M * std::max(1.0, 1.0 / (L * L)) * std::max(std::pow(rho0, ex.nu - 1.0), 1.0);
    const double value = std::max(std::pow(rho0, ex.nu) - lead * tm.value, 0.0);
    return {std::pow(value, 1.0 / ex.nu), tm.tau};
}

// Predicted radius of a central dead core when F vanishes on B(0, rho0).
inline RhoMaxResult rho_max(const EnergyProfiles& prof, const ConstantPack& pack, const ExponentPack& ex,
                            double rho0, double c_cal, int tau_grid = 200) {
    require(prof.source_vanishes_inside(rho0), "hypothesis_not_met", "source does not vanish on B(0, rho0)");
    const std::size_t k = prof.index(rho0);
    return rho_max_from_values(prof.E[k], prof.b[k], pack.L, pack.M, ex, prof.rho[k], c_cal, tau_grid);
}

inline double k1_coefficient(const ConstantPack& pack, const ExponentPack& ex, double tau, double rho2,
                             double b_at_rho2, double c_cal) {
    return c_cal * pack.L1 * pack.L1 * pack.M * pack.M * std::max(std::pow(rho2, ex.nu - 1.0), 1.0) *
           b_factor(b_at_rho2, ex.mu(tau), ex.eta(tau));
}

struct SourceEnergyThresholds {
    double K1 = 0.0;
    double K = 0.0;
    double E_star = 0.0;
    double eps_star = 0.0;
};

// Energy and source thresholds of the localization result for general F.
inline SourceEnergyThresholds source_energy_thresholds(const ConstantPack& pack, const ExponentPack& ex, double rho0, double rho1,
                                   double b_at_rho1, double c_cal) {
    require(rho0 > 0.0 && rho1 > rho0, "degenerate_radii", "need 0 < rho0 < rho1");
    SourceEnergyThresholds t;
    const double gamma = ex.gamma(1.0);
    t.K1 = k1_coefficient(pack, ex, 1.0, rho1, b_at_rho1, c_cal);
    t.K = t.K1 * std::pow(rho0, -(ex.nu - 1.0));
    if (t.K == 0.0) {
        t.E_star = t.eps_star = std::numeric_limits<double>::infinity();
        return t;
    }
    const double base = gamma / (2.0 * t.K);
    const double p = ex.p, p_conj = p / (p - 1.0), m = ex.m;
    t.E_star = std::pow(base * (rho1 - rho0), 1.0 / gamma);
    t.eps_star = std::pow(base, p) / (std::pow(2.0, p_conj) * std::pow(4.0 * pack.L1 * pack.M, (m + 1.0) / m));
    return t;
}

struct SmallnessVerdict {
    bool hypotheses_ok = false;
    std::string hypothesis_note;
    double lhs1 = 0.0, rhs1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0;
    bool grad_below_one = false;
    bool hold1 = false, hold2 = false;
    bool any() const { return hypotheses_ok && (hold1 || hold2); }
};

inline double smallness_common_factor(const ConstantPack& pack, const ExponentPack& ex, double rho0) {
    return (std::pow(2.0, ex.nu) - 1.0) / (pack.M * pack.M) * std::min(1.0, pack.L * pack.L) *
           std::pow(std::min(0.5, rho0), ex.nu - 1.0) * rho0;
}

// Two alternative smallness conditions on B(0, 2 rho0), each implying u = 0 on B(0, rho0).
inline SmallnessVerdict smallness_checks(const EnergyProfiles& prof, const ConstantPack& pack, const ExponentPack& ex,
                                         double rho0, double s, double c_cal) {
    require(rho0 > 0.0, "invalid_radius", "rho0 must be positive");
    require(s > 0.0 && s < 0.5 * (1.0 - ex.m), "invalid_s", "s must lie in (0, (1-m)/2)");
    require(c_cal > 0.0, "invalid_constant", "calibration constant must be positive");
    SmallnessVerdict v;
    const double r2 = 2.0 * rho0;
    if (r2 > prof.rho.back() * (1.0 + 1e-12)) {
        v.hypothesis_note = "B(0, 2 rho0) exceeds the domain";
        return v;
    }
    const std::size_t k = prof.index(r2);
    const double mass = prof.b[k];
    const bool source_ok = prof.source_vanishes_inside(r2);
    const bool mass_ok = mass <= 1.0;
    v.hypotheses_ok = source_ok && mass_ok;
    if (!source_ok) v.hypothesis_note = "source does not vanish on B(0, 2 rho0)";
    else if (!mass_ok) v.hypothesis_note = "L^{m+1} norm on B(0, 2 rho0) exceeds 1";
    const double c = 1.0 / c_cal;
    const double common = c * smallness_common_factor(pack, ex, rho0);
    const double E = prof.E[k];
    v.lhs1 = std::pow(E, (1.0 - ex.m) / ex.k);
    v.rhs1 = common * (1.0 - ex.m);
    v.lhs2 = std::pow(mass, 2.0 * s / ex.k);
    v.rhs2 = common * (1.0 - ex.m - 2.0 * s);
    v.grad_below_one = E <= 1.0;
    v.hold1 = v.lhs1 <= v.rhs1;
    v.hold2 = v.grad_below_one && v.lhs2 <= v.rhs2;
    return v;
}

// Largest source size delta0 such that every solution with |F|_{(m+1)/m} <= delta0
// satisfies the smallness condition on the eps-neighbourhood of supp F.
inline double compute_delta0(double eps, const ConstantPack& pack, const ExponentPack& ex, double c_cal) {
    require(eps > 0.0, "invalid_epsilon", "epsilon must be positive");
    require(c_cal > 0.0, "invalid_constant", "calibration constant must be positive");
    const double m = ex.m;
    const double target = (1.0 / c_cal) * std::pow(2.0, -2.0 * ex.nu) * (std::pow(2.0, ex.nu) - 1.0) * (1.0 - m) /
                          (pack.M * pack.M) * std::min(1.0, pack.L * pack.L) *
                          std::pow(std::min(2.0, eps), ex.nu - 1.0) * eps;
    auto ok = [&](double d) {
        const double energy = pack.M0 * std::pow(d, (m + 1.0) / m);
        return energy <= 1.0 && std::pow(energy, (1.0 - m) / ex.k) <= target;
    };
    double lo = 0.0, hi = 1.0;
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    while (!ok(hi * 0.5) && hi > 1e-300) hi *= 0.5;
    lo = hi * 0.5;
    if (!ok(lo)) return 0.0;
    while (hi - lo > 1e-7 * hi) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

// Smallest node radius beyond which |u| stays below threshold_rel * max|u|.
inline double numeric_support_radius(const GridField& u, double threshold_rel = 1e-8) {
    require(threshold_rel > 0.0 && threshold_rel < 1.0, "invalid_threshold", "threshold must lie in (0,1)");
    const double cut = threshold_rel * max_abs(u);
    if (max_abs(u) == 0.0) return u.mesh.domain.r_inner;
    std::size_t last = 0;
    for (std::size_t j = 0; j < u.size(); ++j)
        if (std::abs(u.values[j]) > cut) last = j;
    return last + 1 < u.size() ? u.mesh.nodes[last + 1] : u.mesh.domain.r_outer;
}

// Largest node radius rho with |u| <= threshold_rel * max|u| on B(0, rho).
inline double zero_ball_radius(const GridField& u, double threshold_rel = 1e-8) {
    require(threshold_rel > 0.0 && threshold_rel < 1.0, "invalid_threshold", "threshold must lie in (0,1)");
    const double mx = max_abs(u);
    if (mx == 0.0) return u.mesh.domain.r_outer;
    std::size_t j = 0;
    while (std::abs(u.values[j]) <= threshold_rel * mx) ++j;
    return j == 0 ? u.mesh.domain.r_inner : u.mesh.nodes[j - 1];
}

// Outer edge of the source support (r_inner when F = 0).
inline double source_support_radius(const GridField& source) {
    double r = source.mesh.domain.r_inner;
    for (std::size_t j = 0; j < source.size(); ++j)
        if (source.values[j] != Complex{}) r = source.mesh.nodes[j];
    return r;
}

struct SmallSourceVerdict {
    double delta0 = 0.0;
    double source_norm = 0.0;
    bool applicable = false;
    double predicted_radius = 0.0;
    double observed_radius = 0.0;
    bool contained = false;
};

// For a concentric source supported in B(0, r_F): a small enough source keeps
// the solution supported in B(0, r_F + eps).
inline SmallSourceVerdict small_source_check(const GridField& u, const GridField& source, const ConstantPack& pack,
                                             const ExponentPack& ex, double eps, double c_cal,
                                             double threshold_rel = 1e-8) {
    SmallSourceVerdict v;
    v.delta0 = compute_delta0(eps, pack, ex, c_cal);
    v.source_norm = lp_norm(source, (ex.m + 1.0) / ex.m);
    v.applicable = v.source_norm <= v.delta0;
    v.predicted_radius = source_support_radius(source) + eps;
    v.observed_radius = numeric_support_radius(u, threshold_rel);
    v.contained = v.observed_radius <= v.predicted_radius + u.mesh.h;
    return v;
}

struct AuditReport {
    double tau = 1.0;
    double rho2 = 0.0;
    double c_cal = 1.0;
    std::vector<double> rho;
    std::vector<double> slack;      // rhs - lhs
    std::vector<double> rel_slack;  // slack / max(lhs, rhs), 0 when both vanish
    std::vector<std::size_t> violations;
    double min_rel_slack = 0.0;
    bool ok() const { return violations.empty(); }
};

// Node-wise check of  E^{1-g} <= K1 rho^{-(nu-1)} E' + (4 L1 M)^{(m+1)(1-g)/m} |F|^{(m+1)(1-g)/m}
// on (0, rho2], with E' from forward differences.
inline AuditReport audit_differential_inequality(const EnergyProfiles& prof, const ConstantPack& pack,
                                                 const ExponentPack& ex, double tau, double rho2, double c_cal,
                                                 double noise = 0.0) {
    require(tau > ex.tau_lo() && tau <= 1.0, "invalid_tau", "tau must lie in ((m+1)/2, 1]");
    AuditReport rep;
    rep.tau = tau;
    rep.c_cal = c_cal;
    const std::size_t k2 = prof.index(rho2);
    rep.rho2 = prof.rho[k2];
    const double g = ex.gamma(tau), m = ex.m;
    const double k1 = k1_coefficient(pack, ex, tau, prof.rho[k2], prof.b[k2], c_cal);
    const double src = std::pow(4.0 * pack.L1 * pack.M, (m + 1.0) * (1.0 - g) / m);
    for (std::size_t j = 0; j < k2 && j + 1 < prof.size(); ++j) {
        const double r = prof.rho[j];
        if (r <= 0.0) continue;
        const double dE = std::max(prof.E[j + 1] - prof.E[j], 0.0) / prof.h;
        const double lhs = std::pow(prof.E[j], 1.0 - g);
        const double rhs = k1 * std::pow(r, -(ex.nu - 1.0)) * dE + src * std::pow(prof.fpow[j], 1.0 - g);
        const double scale = std::max(lhs, rhs);
        const double rel = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
        rep.rho.push_back(r);
        rep.slack.push_back(rhs - lhs);
        rep.rel_slack.push_back(rel);
        if (rel < -noise) rep.violations.push_back(j);
    }
    rep.min_rel_slack = rep.rel_slack.empty() ? 0.0 : *std::min_element(rep.rel_slack.begin(), rep.rel_slack.end());
    return rep;
}

// Constant needed to make the audit pass at every checked node (0 if none binds).
inline double audit_required_constant(const EnergyProfiles& prof, const ConstantPack& pack, const ExponentPack& ex,
                                      double tau, double rho2) {
    const std::size_t k2 = prof.index(rho2);
    const double g = ex.gamma(tau), m = ex.m;
    const double k1_unit = k1_coefficient(pack, ex, tau, prof.rho[k2], prof.b[k2], 1.0);
    const double src = std::pow(4.0 * pack.L1 * pack.M, (m + 1.0) * (1.0 - g) / m);
    double need = 0.0;
    for (std::size_t j = 0; j < k2 && j + 1 < prof.size(); ++j) {
        const double r = prof.rho[j];
        if (r <= 0.0) continue;
        const double lhs = std::pow(prof.E[j], 1.0 - g) - src * std::pow(prof.fpow[j], 1.0 - g);
        if (lhs <= 0.0) continue;
        const double dE = std::max(prof.E[j + 1] - prof.E[j], 0.0) / prof.h;
        const double unit = k1_unit * std::pow(r, -(ex.nu - 1.0)) * dE;
        need = std::max(need, unit > 0.0 ? lhs / unit : std::numeric_limits<double>::infinity());
    }
    return need;
}

// Smallest C for which the predicted dead-core radius does not exceed the observed one.
inline double rho_max_required_constant(const EnergyProfiles& prof, const ConstantPack& pack, const ExponentPack& ex,
                                        double rho0, double observed_zero_radius, int tau_grid = 200) {
    const std::size_t k = prof.index(rho0);
    const double r0 = prof.rho[k];
    if (observed_zero_radius >= r0) return 0.0;
    const auto tm = minimize_over_tau(prof.E[k], prof.b[k], ex, tau_grid);
    const double unit = pack.M * pack.M * std::max(1.0, 1.0 / (pack.L * pack.L)) *
                        std::max(std::pow(r0, ex.nu - 1.0), 1.0) * tm.value;
    if (unit <= 0.0) return std::numeric_limits<double>::infinity();
    return (std::pow(r0, ex.nu) - std::pow(observed_zero_radius, ex.nu)) / unit;
}

struct CalibrationInstance {
    ProblemSpec spec;
    double rho0 = 0.0;
    std::string label;
};

struct CalibrationOptions {
    std::vector<std::size_t> levels;  // node counts; empty keeps each spec's own
    std::vector<double> taus{1.0};
    double threshold_rel = 1e-8;
    double margin = 1.1;
    double floor = 1.0;
    SolveOptions solve;
    std::string method = "picard";
};

struct CalibrationRecord {
    std::string label;
    std::size_t nodes = 0;
    bool converged = false;
    double rho0 = 0.0;
    double observed_zero_radius = 0.0;
    double need_rho_max = 0.0;
    double need_audit = 0.0;
};

struct CalibrationResult {
    double c_cal = 1.0;
    double required = 0.0;
    bool floor_active = true;
    std::vector<CalibrationRecord> records;
};

// Solves every family member at every level and returns the smallest constant
// compatible with all of them, times the safety margin, never below the floor.
inline CalibrationResult calibrate_C(const std::vector<CalibrationInstance>& family, const CalibrationOptions& opts) {
    require(!family.empty(), "empty_family", "calibration needs at least one instance");
    CalibrationResult out;
    for (const auto& inst : family) {
        std::vector<std::size_t> levels = opts.levels;
        if (levels.empty()) levels.push_back(inst.spec.n_nodes);
        for (std::size_t nodes : levels) {
            const RadialProblem problem = inst.spec.build(nodes);
            CalibrationRecord rec;
            rec.label = inst.label;
            rec.nodes = nodes;
            rec.rho0 = inst.rho0;
            const auto sol = solve(problem, opts.method, opts.solve);
            rec.converged = sol.converged;
            if (sol.converged) {
                const auto pack = constants(problem);
                const auto ex = exponent_pack(problem.m, problem.domain().dim);
                const auto prof = energy_profiles(sol.u, problem.source, problem.m);
                require(prof.source_vanishes_inside(inst.rho0), "hypothesis_not_met",
                        "calibration instance '" + inst.label + "' has a source inside B(0, rho0)");
                rec.observed_zero_radius = zero_ball_radius(sol.u, opts.threshold_rel);
                rec.need_rho_max = rho_max_required_constant(prof, pack, ex, inst.rho0, rec.observed_zero_radius);
                for (double tau : opts.taus)
                    rec.need_audit = std::max(rec.need_audit, audit_required_constant(prof, pack, ex, tau, inst.rho0));
                out.required = std::max({out.required, rec.need_rho_max, rec.need_audit});
            }
            out.records.push_back(rec);
        }
    }
    out.c_cal = std::max(opts.floor, opts.margin * out.required);
    out.floor_active = opts.margin * out.required <= opts.floor;
    return out;
}

}  // namespace snls
