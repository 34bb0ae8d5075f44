#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "snls/inequalities.hpp"
#include "snls/solver.hpp"

namespace snls {

struct DependenceReport {
    std::string case_id;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    bool calibrated = true;
};

// Continuous dependence of the solution on the source, branch chosen from (a,b).
inline DependenceReport dependence_check(const GridField& u1, const GridField& u2, const GridField& f1,
                                         const GridField& f2, const ParamPair& params,
                                         std::optional<double> c_degenerate = std::nullopt, double m = 0.5,
                                         double slack = 0.01, double abs_slack = 0.0) {
    require_same_mesh(u1, u2);
    require_same_mesh(f1, f2);
    require_same_mesh(u1, f1);
    const Complex a = params.a, b = params.b;
    require(check_uniqueness(a, b), "hypothesis_failed", "uniqueness hypothesis does not hold for (a,b)");
    require(!(a == Complex{} && b == Complex{}), "hypothesis_failed", "(a,b) must not both vanish");
    DependenceReport rep;
    rep.lhs = field_l2(u1 - u2);
    const double df = field_l2(f1 - f2);
    const double re_ab = (a * std::conj(b)).real();
    if (a == Complex{}) {
        rep.case_id = "a_zero";
        const double b0 = b.real() != 0.0 ? std::abs(b.real()) : b.imag();
        rep.rhs = df / b0;
    } else if (re_ab > 0.0) {
        rep.case_id = "a_nonzero_positive";
        rep.rhs = std::abs(a) / re_ab * df;
    } else {
        rep.case_id = "a_nonzero_degenerate";
        require(c_degenerate.has_value(), "branch_undefined",
                "Re(a conj(b)) = 0 needs a calibrated constant for the degenerate bound");
        const double sup = max_abs(u1) + max_abs(u2);
        rep.rhs = *c_degenerate * std::pow(sup, 1.0 - m) / std::abs(a) * df;
    }
    rep.pass = rep.lhs <= rep.rhs * (1.0 + slack) + abs_slack;
    return rep;
}

// Residuals of the energy relations for the difference of two solutions.
struct EnergyIdentityReport {
    std::string case_id;  // "a_nonzero" or "a_zero"
    // a != 0: identity for the a-weighted pairing, and the one-sided bound
    // using the monotonicity constant.
    std::optional<double> weighted_identity;
    std::optional<double> one_sided;
    // a == 0: real and imaginary part identities.
    std::optional<double> real_identity;
    std::optional<double> imag_identity;
    double scale = 0.0;
};

inline EnergyIdentityReport energy_identity_check(const GridField& u1, const GridField& u2, const GridField& f1,
                                                  const GridField& f2, const ParamPair& params, double m,
                                                  double c_mono = 0.0) {
    require_same_mesh(u1, u2);
    require_same_mesh(f1, f2);
    require_same_mesh(u1, f1);
    const Complex a = params.a, b = params.b;
    const GridField w = u1 - u2, df = f1 - f2;
    const double grad = grad_l2_ball(w, w.mesh.domain.r_outer);
    const double l2sq = std::pow(field_l2(w), 2.0);
    const Complex pair = inner_product(df, w);
    EnergyIdentityReport rep;
    rep.scale = grad + l2sq + field_l2(df) * field_l2(w);
    if (a == Complex{}) {
        rep.case_id = "a_zero";
        rep.real_identity = b.real() * l2sq - pair.real();
        rep.imag_identity = grad + b.imag() * l2sq - pair.imag();
        return rep;
    }
    rep.case_id = "a_nonzero";
    GridField fdiff(w.mesh), weight(w.mesh);
    for (std::size_t j = 0; j < w.size(); ++j) {
        fdiff.values[j] = singular_power(u1.values[j], m) - singular_power(u2.values[j], m);
        const double s = std::abs(u1.values[j]) + std::abs(u2.values[j]);
        weight.values[j] = s > 0.0 ? std::norm(w.values[j]) / std::pow(s, 1.0 - m) : 0.0;
    }
    const double mono = inner_product(fdiff, w).real();
    const double weighted = domain_integral(weight).real();
    const double re_ab = (a * std::conj(b)).real();
    const double rhs = (std::conj(a) * pair).real();
    rep.weighted_identity = a.imag() * grad + std::norm(a) * mono + re_ab * l2sq - rhs;
    rep.one_sided = a.imag() * grad + c_mono * std::norm(a) * weighted + re_ab * l2sq - rhs;
    return rep;
}

struct ProbeStart {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

struct UniquenessProbe {
    bool hypothesis_holds = false;
    double max_distance = 0.0;
    double tol = 0.0;
    std::vector<ProbeStart> starts;
    bool all_converged() const {
        return std::all_of(starts.begin(), starts.end(), [](const ProbeStart& s) { return s.converged; });
    }
};

// Solves from several random initial iterates and measures their spread.
inline UniquenessProbe uniqueness_probe(const RadialProblem& problem, int n_starts, std::uint64_t seed,
                                        const SolveOptions& base = {}, const std::string& method = "picard",
                                        double amplitude = 1.0) {
    require(n_starts >= 2, "too_few_starts", "a uniqueness probe needs at least two starts");
    std::mt19937_64 rng(seed);
    UniquenessProbe out;
    out.hypothesis_holds = check_uniqueness(problem.params.a, problem.params.b);
    out.tol = base.tol;
    std::vector<GridField> sols;
    for (int s = 0; s < n_starts; ++s) {
        SolveOptions opts = base;
        GridField start = random_smooth_field(problem.mesh(), rng);
        for (auto& v : start.values) v *= amplitude;
        opts.initial = with_dirichlet(std::move(start));
        const auto res = solve(problem, method, opts);
        out.starts.push_back({res.converged, res.iterations, res.residual_l2});
        if (res.converged) sols.push_back(res.u);
    }
    for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j)
            out.max_distance = std::max(out.max_distance, field_l2(sols[i] - sols[j]));
    return out;
}

}  // namespace snls
