#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snls/mesh.hpp"
#include "snls/support.hpp"

namespace snls {

// Young: xy <= (1/p') (eps x)^{p'} + (1/p) (y/eps)^p. Returns rhs - lhs.
inline double check_young(double x, double y, double eps, double p) {
    require(x >= 0.0 && y >= 0.0 && eps > 0.0 && p > 1.0, "invalid_arguments",
            "young needs x, y >= 0, eps > 0, p > 1");
    const double q = p / (p - 1.0);
    return std::pow(eps, q) * std::pow(x, q) / q + std::pow(eps, -p) * std::pow(y, p) / p - x * y;
}

inline double young_rhs(double x, double y, double eps, double p) { return check_young(x, y, eps, p) + x * y; }

struct GnSides {
    double lhs = 0.0;
    double rhs = 0.0;
    std::optional<double> ratio;
};

struct GnResult {
    GnSides l2_form;    // |u|_2 against |grad u|_2 and |u|_{p+1}
    GnSides mass_form;  // |u|_{p+1}^{p+1} against |grad u|_2 and |u|_1
};

inline GnSides make_sides(double lhs, double rhs) {
    GnSides s{lhs, rhs, std::nullopt};
    if (rhs > 0.0) s.ratio = lhs / rhs;
    return s;
}

// Both Gagliardo-Nirenberg forms without their constant.
inline GnResult check_gn(const GridField& u, double p) {
    require(p >= 0.0 && p <= 1.0, "invalid_exponent", "GN exponent must lie in [0,1]");
    const double N = u.mesh.dim();
    const double grad = std::sqrt(grad_l2_ball(u, u.mesh.domain.r_outer));
    const double lp1 = lp_norm(u, p + 1.0);
    const double denom = (N + 2.0) - p * (N - 2.0);
    GnResult r;
    r.l2_form = make_sides(lp_norm(u, 2.0), std::pow(grad, N * (1.0 - p) / denom) *
                                                std::pow(lp1, 2.0 * (1.0 + p) / denom));
    r.mass_form = make_sides(std::pow(lp1, p + 1.0), std::pow(grad, 2.0 * p * N / (N + 2.0)) *
                                                         std::pow(lp_norm(u, 1.0), denom / (N + 2.0)));
    return r;
}

// Sphere L2 norm at rho against the interior gradient and L^{m+1} norms.
inline GnSides check_interp_trace(const GridField& u, double rho, const ExponentPack& ex) {
    const std::size_t k = snap_index(u.mesh, rho);
    require(k > 0 && k + 1 < u.size(), "rho_at_boundary", "trace check needs an interior node");
    const double r = u.mesh.nodes[k];
    const double lhs = std::sqrt(sphere_area(u.mesh.dim()) * std::pow(r, u.mesh.dim() - 1)) * std::abs(u.values[k]);
    const double grad = std::sqrt(grad_l2_ball(u, r));
    const double lm = lp_ball_norm(u, ex.m + 1.0, r);
    const double rhs = std::pow(grad + std::pow(r, -ex.delta_it) * lm, ex.theta) * std::pow(lm, 1.0 - ex.theta);
    return make_sides(lhs, rhs);
}

struct MonotonicityGap {
    double lhs;
    double rhs_core;
};

inline MonotonicityGap monotonicity_gap(Complex z1, Complex z2, double m) {
    const double s = std::abs(z1) + std::abs(z2);
    require(s > 0.0, "invalid_arguments", "monotonicity gap needs |z1| + |z2| > 0");
    const Complex diff = z1 - z2;
    const double lhs = ((singular_power(z1, m) - singular_power(z2, m)) * std::conj(diff)).real();
    return {lhs, std::norm(diff) / std::pow(s, 1.0 - m)};
}

inline double holder_nonlinearity_ratio(Complex z1, Complex z2, double m) {
    require(z1 != z2, "invalid_arguments", "Hoelder ratio needs z1 != z2");
    return std::abs(singular_power(z1, m) - singular_power(z2, m)) / std::pow(std::abs(z1 - z2), m);
}

// Complex number with log-uniform modulus in [1e-6, 1e6] and uniform phase.
inline Complex sample_complex(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> expo(-6.0, 6.0), phase(0.0, 2.0 * std::numbers::pi);
    return std::polar(std::pow(10.0, expo(rng)), phase(rng));
}

// Pairs alternate between independent draws and close neighbours.
inline std::pair<Complex, Complex> sample_pair(std::mt19937_64& rng, std::uint64_t i) {
    const Complex z1 = sample_complex(rng);
    if (i % 2 == 0) return {z1, sample_complex(rng)};
    std::uniform_real_distribution<double> expo(-12.0, 0.0), phase(0.0, 2.0 * std::numbers::pi);
    return {z1, z1 + std::polar(std::abs(z1) * std::pow(10.0, expo(rng)), phase(rng))};
}

// Smooth radial field vanishing on the Dirichlet boundary, built from a few
// decaying modes with random complex weights.
inline GridField random_smooth_field(const RadialMesh& mesh, std::mt19937_64& rng, int modes = 6) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> coef(modes);
    for (int k = 0; k < modes; ++k) coef[k] = Complex(gauss(rng), gauss(rng)) / std::pow(1.0 + k, 2.0);
    const auto& d = mesh.domain;
    const double span = d.r_outer - d.r_inner;
    return sample(mesh, [&](double r) {
        Complex v{};
        for (int k = 0; k < modes; ++k) {
            const double arg = d.is_ball() ? (k + 0.5) * std::numbers::pi * r / d.r_outer
                                           : (k + 1.0) * std::numbers::pi * (r - d.r_inner) / span;
            v += coef[k] * (d.is_ball() ? std::cos(arg) : std::sin(arg));
        }
        return v;
    });
}

struct IneqReport {
    std::string name;
    std::uint64_t samples = 0;
    double worst_slack = std::numeric_limits<double>::infinity();
    std::string worst_case;
    std::optional<double> empirical_constant;
    std::optional<double> extremal_ratio;
    double tolerance = 0.0;
    bool pass = false;
};

inline std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : items) {
        os << (first ? "" : ", ") << k << "=" << v;
        first = false;
    }
    return os.str();
}

inline void finish(IneqReport& rep) { rep.pass = rep.worst_slack >= -rep.tolerance; }

// Worst relative Young slack over random (x, y, eps, p); p fixed when given.
inline IneqReport young_suite(std::uint64_t n, std::uint64_t seed, std::optional<double> fixed_p = std::nullopt) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xy(-3.0, 3.0), ep(-1.0, 1.0), pp(1.1, 10.0);
    IneqReport rep;
    rep.name = "young";
    rep.samples = n;
    rep.tolerance = 1e-15;
    double best_ratio = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = std::pow(10.0, xy(rng)), y = std::pow(10.0, xy(rng));
        const double eps = std::pow(10.0, ep(rng));
        const double p = fixed_p ? *fixed_p : pp(rng);
        const double rhs = young_rhs(x, y, eps, p);
        const double rel = (rhs - x * y) / std::max(rhs, x * y);
        best_ratio = std::max(best_ratio, x * y / rhs);
        if (rel < rep.worst_slack) {
            rep.worst_slack = rel;
            rep.worst_case = describe({{"x", x}, {"y", y}, {"eps", eps}, {"p", p}});
        }
    }
    rep.extremal_ratio = best_ratio;
    rep.empirical_constant = 1.1 * best_ratio;
    finish(rep);
    return rep;
}

// Nonnegativity of the monotonicity gap plus the smallest ratio lhs / rhs_core.
inline IneqReport monotonicity_suite(std::uint64_t n, std::uint64_t seed, double m) {
    std::mt19937_64 rng(seed);
    IneqReport rep;
    rep.name = "mono";
    rep.samples = n;
    rep.tolerance = 1e-12;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto [z1, z2] = sample_pair(rng, i);
        const auto gap = monotonicity_gap(z1, z2, m);
        const double scale = std::pow(std::abs(z1) + std::abs(z2), m + 1.0);
        const double rel = gap.lhs / scale;
        if (gap.rhs_core > 0.0) min_ratio = std::min(min_ratio, gap.lhs / gap.rhs_core);
        if (rel < rep.worst_slack) {
            rep.worst_slack = rel;
            rep.worst_case = describe({{"re_z1", z1.real()}, {"im_z1", z1.imag()}, {"re_z2", z2.real()},
                                       {"im_z2", z2.imag()}, {"m", m}});
        }
    }
    rep.extremal_ratio = min_ratio;
    rep.empirical_constant = min_ratio / 1.1;
    finish(rep);
    return rep;
}

// Largest Hoelder ratio of the nonlinearity over each m; slack is 5 - ratio.
inline IneqReport holder_suite(std::uint64_t n, std::uint64_t seed, const std::vector<double>& ms) {
    std::mt19937_64 rng(seed);
    IneqReport rep;
    rep.name = "holder";
    rep.samples = n * ms.size();
    double max_ratio = 0.0;
    for (double m : ms)
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto [z1, z2] = sample_pair(rng, i);
            if (z1 == z2) continue;
            const double ratio = holder_nonlinearity_ratio(z1, z2, m);
            if (ratio > max_ratio) {
                max_ratio = ratio;
                rep.worst_case = describe({{"re_z1", z1.real()}, {"im_z1", z1.imag()}, {"re_z2", z2.real()},
                                           {"im_z2", z2.imag()}, {"m", m}});
            }
        }
    rep.worst_slack = 5.0 - max_ratio;
    rep.extremal_ratio = max_ratio;
    rep.empirical_constant = 1.1 * max_ratio;
    finish(rep);
    return rep;
}

struct FieldSampler {
    RadialDomain domain{1, 0.0, 1.0};
    std::size_t nodes = 257;
    int modes = 6;
    double m = 0.5;   // trace exponent family
    double p = 0.5;   // GN exponent
};

// Largest lhs/rhs ratio over random smooth fields; the report's constant is
// that ratio with a 10% margin.
inline IneqReport field_ratio_suite(const std::string& which, std::uint64_t n, std::uint64_t seed,
                                    const FieldSampler& fs) {
    require(which == "gn" || which == "gn_mass" || which == "trace", "unknown_inequality",
            "field suites are 'gn', 'gn_mass' and 'trace'");
    std::mt19937_64 rng(seed);
    const auto mesh = build_mesh(fs.domain, fs.nodes);
    const auto ex = exponent_pack(fs.m, fs.domain.dim);
    std::uniform_int_distribution<std::size_t> node(1, fs.nodes - 2);
    IneqReport rep;
    rep.name = which;
    rep.samples = n;
    double max_ratio = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const GridField u = random_smooth_field(mesh, rng, fs.modes);
        GnSides s;
        double rho = 0.0;
        if (which == "trace") {
            rho = mesh.nodes[node(rng)];
            s = check_interp_trace(u, rho, ex);
        } else {
            const auto g = check_gn(u, fs.p);
            s = which == "gn" ? g.l2_form : g.mass_form;
        }
        if (s.ratio && *s.ratio > max_ratio) {
            max_ratio = *s.ratio;
            rep.worst_case = describe({{"sample", static_cast<double>(i)}, {"rho", rho}});
        }
    }
    rep.extremal_ratio = max_ratio;
    rep.empirical_constant = 1.1 * max_ratio;
    rep.worst_slack = 0.0;  // constants are estimated here, nothing to violate
    finish(rep);
    return rep;
}

struct SamplerSpec {
    std::uint64_t seed = 1;
    double m = 0.5;
    std::optional<double> young_p;
    FieldSampler fields;
};

// Extremal ratio over n samples, widened by 10% (upper constants grow, the
// lower monotonicity constant shrinks).
inline double estimate_constant(const std::string& id, const SamplerSpec& spec, std::uint64_t n) {
    require(n >= 100, "too_few_samples", "constant estimation needs at least 100 samples");
    IneqReport rep;
    if (id == "young")
        rep = young_suite(n, spec.seed, spec.young_p);
    else if (id == "holder")
        rep = holder_suite(n, spec.seed, {spec.m});
    else if (id == "mono")
        rep = monotonicity_suite(n, spec.seed, spec.m);
    else if (id == "gn" || id == "gn_mass" || id == "trace")
        rep = field_ratio_suite(id, n, spec.seed, spec.fields);
    else
        throw Error("unknown_inequality", "unknown inequality id '" + id + "'");
    return *rep.empirical_constant;
}

}  // namespace snls
