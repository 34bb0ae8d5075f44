#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "snls/mesh.hpp"
#include "snls/params.hpp"
#include "snls/tridiag.hpp"

namespace snls {

// Radial Laplacian u'' + (N-1)/r u' as three coefficient bands. Dirichlet rows
// are flagged and carry no stencil.
struct RadialLaplacian {
    RadialMesh mesh;
    std::vector<double> lower, diag, upper;
    std::vector<bool> dirichlet;

    std::vector<Complex> apply(const std::vector<Complex>& u) const {
        const std::size_t n = diag.size();
        std::vector<Complex> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (dirichlet[j]) continue;
            Complex s = diag[j] * u[j];
            if (j > 0) s += lower[j] * u[j - 1];
            if (j + 1 < n) s += upper[j] * u[j + 1];
            out[j] = s;
        }
        return out;
    }
};

inline RadialLaplacian assemble_laplacian(const RadialMesh& mesh) {
    const std::size_t n = mesh.size();
    const double h = mesh.h, h2 = h * h;
    const int dim = mesh.dim();
    RadialLaplacian op{mesh, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0), std::vector<bool>(n, false)};
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double drift = (dim - 1) / (2.0 * h * mesh.nodes[j]);
        op.lower[j] = 1.0 / h2 - drift;
        op.diag[j] = -2.0 / h2;
        op.upper[j] = 1.0 / h2 + drift;
    }
    if (mesh.domain.is_ball()) {
        // Symmetric limit at the centre: N u''(0) with u'(0) = 0.
        op.diag[0] = -2.0 * dim / h2;
        op.upper[0] = 2.0 * dim / h2;
    } else {
        op.dirichlet[0] = true;
    }
    op.dirichlet[n - 1] = true;
    return op;
}

// Solves -Δu = g with homogeneous Dirichlet data.
inline GridField solve_linear_poisson(const RadialLaplacian& op, const GridField& g) {
    require(g.mesh == op.mesh, "mesh_mismatch", "source and operator meshes differ");
    const std::size_t n = op.diag.size();
    BlockTridiagonal sys(n);
    std::vector<Complex> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (op.dirichlet[j]) {
            sys.diag[j] = Block2::identity();
            continue;
        }
        sys.lower[j] = Block2::identity(-op.lower[j]);
        sys.diag[j] = Block2::identity(-op.diag[j]);
        sys.upper[j] = Block2::identity(-op.upper[j]);
        rhs[j] = g.values[j];
    }
    return GridField(op.mesh, solve_block_tridiagonal(sys, rhs));
}

struct RadialProblem {
    ParamPair params;
    double m = 0.5;
    GridField source;

    const RadialMesh& mesh() const { return source.mesh; }
    const RadialDomain& domain() const { return source.mesh.domain; }
};

inline RadialProblem make_problem(const ParamPair& params, double m, GridField source) {
    require(m > 0.0 && m < 1.0, "invalid_m", "m must lie in (0,1)");
    for (const auto& z : source.values) checked(z, "source value");
    return {params, m, std::move(source)};
}

inline ConstantPack constants(const RadialProblem& p) { return constants(p.params, p.m, p.domain().dim); }

// Pointwise truncated map g_l: exact below the level, radially clamped above it.
inline Complex truncated_value(Complex v, double level, Complex a, Complex b, double m) {
    const double r = std::abs(v);
    if (r == 0.0) return {0.0, 0.0};
    const Complex i{0.0, 1.0};
    if (r <= level) return i * a * std::pow(r, m - 1.0) * v + i * b * v;
    const Complex dir = v / r;
    return i * a * std::pow(level, m) * dir + i * b * level * dir;
}

inline GridField truncated_nonlinearity(const GridField& v, double level, Complex a, Complex b, double m) {
    require(level > 0.0, "invalid_level", "truncation level must be positive");
    GridField out(v.mesh);
    for (std::size_t j = 0; j < v.size(); ++j) out.values[j] = truncated_value(v.values[j], level, a, b, m);
    return out;
}

// Level from L*l^m - M*|F|_inf >= 1.
inline double truncation_level(const RadialProblem& problem, const ConstantPack& pack) {
    return std::pow((1.0 + pack.M * max_abs(problem.source)) / pack.L, 1.0 / problem.m);
}

inline bool is_dirichlet_node(const RadialMesh& mesh, std::size_t j) {
    return j + 1 == mesh.size() || (j == 0 && !mesh.domain.is_ball());
}

inline GridField with_dirichlet(GridField u) {
    for (std::size_t j = 0; j < u.size(); ++j)
        if (is_dirichlet_node(u.mesh, j)) u.values[j] = {};
    return u;
}

// Pointwise -iΔ_h u + a f(u) + b u - F, zero on Dirichlet nodes.
inline GridField residual_field(const RadialProblem& problem, const RadialLaplacian& lap, const GridField& u) {
    require_same_mesh(u, problem.source);
    const Complex i{0.0, 1.0};
    const auto lu = lap.apply(u.values);
    GridField out(u.mesh);
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (lap.dirichlet[j]) continue;
        out.values[j] = -i * lu[j] + problem.params.a * singular_power(u.values[j], problem.m) +
                        problem.params.b * u.values[j] - problem.source.values[j];
    }
    return out;
}

inline double residual(const RadialProblem& problem, const GridField& u) {
    return lp_norm(residual_field(problem, assemble_laplacian(u.mesh), u), 2.0);
}

// One application of the literal fixed-point map u -> (-Δ)^{-1}(g_l(u) - iF).
inline GridField picard_map(const RadialProblem& problem, const RadialLaplacian& lap, const GridField& u,
                            double level) {
    GridField rhs = truncated_nonlinearity(u, level, problem.params.a, problem.params.b, problem.m);
    const Complex i{0.0, 1.0};
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs.values[j] -= i * problem.source.values[j];
    return solve_linear_poisson(lap, rhs);
}

struct IterationRecord {
    int iteration;
    double update_norm;
    double residual;
    std::string step;  // "picard", "newton" or "fallback"
};

struct SolveOptions {
    double damping = 0.5;
    double tol = 1e-9;
    int max_iter = 10000;
    std::optional<GridField> initial;
    double coefficient_floor = 1e-30;  // |u| floor inside the frozen singular coefficient
    double eps_reg = 1e-12;            // |u| floor inside the Newton Jacobian
};

struct SolveResult {
    GridField u;
    int iterations = 0;
    double residual_l2 = 0.0;
    double truncation_level = 0.0;
    bool converged = false;
    std::string method;
    std::string initial_kind;
    std::vector<IterationRecord> history;
};

inline bool is_linear(const RadialProblem& problem) { return problem.params.a == Complex{}; }

// Solvable pairs: the existence hypothesis, or the linear case a = 0 with b in B.
inline void require_existence(const RadialProblem& problem) {
    const Complex a = problem.params.a, b = problem.params.b;
    require(check_existence(a, b) || (a == Complex{} && in_set_B(b)), "hypothesis_failed",
            "existence hypothesis does not hold for (a,b)");
}

// No truncation is needed in the linear case.
inline double solver_truncation_level(const RadialProblem& problem) {
    if (is_linear(problem)) return std::numeric_limits<double>::infinity();
    return truncation_level(problem, constants(problem));
}

// Solves -iΔw + c(x) w = rhs with a pointwise complex coefficient c.
inline GridField solve_shifted(const RadialLaplacian& lap, const std::vector<Complex>& coef,
                               const GridField& rhs) {
    const std::size_t n = lap.diag.size();
    const Complex minus_i{0.0, -1.0};
    BlockTridiagonal sys(n);
    std::vector<Complex> b(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (lap.dirichlet[j]) {
            sys.diag[j] = Block2::identity();
            continue;
        }
        sys.lower[j] = Block2::complex(minus_i * lap.lower[j]);
        sys.upper[j] = Block2::complex(minus_i * lap.upper[j]);
        sys.diag[j] = Block2::complex(minus_i * lap.diag[j] + coef[j]);
        b[j] = rhs.values[j];
    }
    return GridField(lap.mesh, solve_block_tridiagonal(sys, b));
}

// Initial iterate: the problem with the singular term dropped.
inline GridField linear_initial_guess(const RadialProblem& problem, const RadialLaplacian& lap) {
    std::vector<Complex> coef(problem.source.size(), problem.params.b);
    return solve_shifted(lap, coef, problem.source);
}

// One lagged-coefficient step: freeze |u| inside the truncated nonlinearity
// and solve the resulting linear problem. Fixed points coincide with those of
// the truncated equation.
inline GridField lagged_step(const RadialProblem& problem, const RadialLaplacian& lap, const GridField& u,
                             double level, double floor) {
    const Complex a = problem.params.a, b = problem.params.b;
    std::vector<Complex> coef(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double r = std::abs(u.values[j]);
        if (r <= level)
            coef[j] = a * std::pow(std::max(r, floor), problem.m - 1.0) + b;
        else
            coef[j] = a * std::pow(level, problem.m) / r + b * (level / r);
    }
    return solve_shifted(lap, coef, problem.source);
}

inline double field_l2(const GridField& u) { return lp_norm(u, 2.0); }

inline GridField combine(double wx, const GridField& x, double wy, const GridField& y) {
    GridField out(x.mesh);
    for (std::size_t j = 0; j < x.size(); ++j) out.values[j] = wx * x.values[j] + wy * y.values[j];
    return out;
}

inline SolveResult fixed_point_solve(const RadialProblem& problem, const SolveOptions& opts = {}) {
    require_existence(problem);
    require(opts.damping > 0.0 && opts.damping <= 1.0, "invalid_damping", "damping must lie in (0,1]");
    const auto lap = assemble_laplacian(problem.mesh());
    SolveResult res;
    res.method = "picard";
    res.truncation_level = solver_truncation_level(problem);
    res.initial_kind = opts.initial ? "supplied" : "linear";
    GridField u = opts.initial ? with_dirichlet(*opts.initial) : linear_initial_guess(problem, lap);
    require_same_mesh(u, problem.source);

    double update = 0.0;
    for (int it = 0;; ++it) {
        res.residual_l2 = lp_norm(residual_field(problem, lap, u), 2.0);
        res.history.push_back({it, update, res.residual_l2, "picard"});
        res.iterations = it;
        if (res.residual_l2 <= opts.tol) {
            res.converged = true;
            break;
        }
        if (it >= opts.max_iter) break;
        const GridField w = lagged_step(problem, lap, u, res.truncation_level, opts.coefficient_floor);
        GridField next = combine(1.0 - opts.damping, u, opts.damping, w);
        update = field_l2(next - u);
        u = std::move(next);
    }
    res.u = std::move(u);
    return res;
}

// Real 2x2 derivative of z -> |z|^{m-1} z with |z| floored at eps.
inline Block2 singular_jacobian(Complex z, double m, double eps) {
    const double r = std::abs(z);
    const double s = std::max(r, eps);
    const double scale = std::pow(s, m - 1.0);
    if (r == 0.0) return Block2::identity(scale);
    const double x = z.real() / r, y = z.imag() / r;
    const double c = m - 1.0;
    return Block2{{scale * (1.0 + c * x * x), scale * c * x * y, scale * c * x * y, scale * (1.0 + c * y * y)}};
}

// Damped Newton on the real 2n system with Armijo backtracking; when the line
// search fails a lagged-coefficient step is taken instead.
inline SolveResult newton_solve(const RadialProblem& problem, const SolveOptions& opts = {}) {
    require_existence(problem);
    const auto lap = assemble_laplacian(problem.mesh());
    const std::size_t n = problem.source.size();
    const Complex a = problem.params.a, b = problem.params.b;
    const Complex minus_i{0.0, -1.0};
    SolveResult res;
    res.method = "newton";
    res.truncation_level = solver_truncation_level(problem);
    res.initial_kind = opts.initial ? "supplied" : "linear";
    GridField u = opts.initial ? with_dirichlet(*opts.initial) : linear_initial_guess(problem, lap);
    require_same_mesh(u, problem.source);

    GridField r = residual_field(problem, lap, u);
    double rnorm = lp_norm(r, 2.0);
    double update = 0.0;
    std::string step = "newton";
    for (int it = 0;; ++it) {
        res.history.push_back({it, update, rnorm, step});
        res.iterations = it;
        res.residual_l2 = rnorm;
        if (rnorm <= opts.tol) {
            res.converged = true;
            break;
        }
        if (it >= opts.max_iter) break;

        BlockTridiagonal jac(n);
        std::vector<Complex> rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (lap.dirichlet[j]) {
                jac.diag[j] = Block2::identity();
                continue;
            }
            jac.lower[j] = Block2::complex(minus_i * lap.lower[j]);
            jac.upper[j] = Block2::complex(minus_i * lap.upper[j]);
            jac.diag[j] = Block2::complex(minus_i * lap.diag[j] + b) +
                          Block2::complex(a) * singular_jacobian(u.values[j], problem.m, opts.eps_reg);
            rhs[j] = -r.values[j];
        }
        GridField candidate;
        double cand_norm = rnorm;
        bool accepted = false;
        try {
            const GridField dir(u.mesh, solve_block_tridiagonal(jac, rhs));
            for (double lambda = 1.0; lambda >= 1.0 / 64.0; lambda *= 0.5) {
                GridField trial = combine(1.0, u, lambda, dir);
                const double tn = lp_norm(residual_field(problem, lap, trial), 2.0);
                if (tn <= (1.0 - 1e-4 * lambda) * rnorm) {
                    candidate = std::move(trial);
                    cand_norm = tn;
                    accepted = true;
                    break;
                }
            }
        } catch (const Error& e) {
            if (e.reason() != "singular_system") throw;
        }
        step = "newton";
        if (accepted && cand_norm > 0.5 * rnorm) {
            // Weak Newton progress, typically near the free boundary: keep
            // whichever of the two steps reduces the residual more.
            const GridField w = lagged_step(problem, lap, u, res.truncation_level, opts.coefficient_floor);
            GridField alt = combine(1.0 - opts.damping, u, opts.damping, w);
            const double alt_norm = lp_norm(residual_field(problem, lap, alt), 2.0);
            if (alt_norm < cand_norm) {
                candidate = std::move(alt);
                cand_norm = alt_norm;
                step = "fallback";
            }
        }
        if (!accepted) {
            const GridField w = lagged_step(problem, lap, u, res.truncation_level, opts.coefficient_floor);
            candidate = combine(1.0 - opts.damping, u, opts.damping, w);
            cand_norm = lp_norm(residual_field(problem, lap, candidate), 2.0);
            step = "fallback";
        }
        update = field_l2(candidate - u);
        u = std::move(candidate);
        r = residual_field(problem, lap, u);
        rnorm = cand_norm;
    }
    res.u = std::move(u);
    return res;
}

inline SolveResult solve(const RadialProblem& problem, const std::string& method, const SolveOptions& opts = {}) {
    if (method == "picard") return fixed_point_solve(problem, opts);
    if (method == "newton") return newton_solve(problem, opts);
    throw Error("unknown_solver", "solver must be 'picard' or 'newton', got '" + method + "'");
}

struct BoundReport {
    double lhs1 = 0.0, rhs1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0;
    bool pass1 = false, pass2 = false;
    double c_bound = 1.0;
    bool c_bound_calibrated = false;
};

// Energy bounds in terms of the source. The second bound carries an
// unspecified constant, passed in as c_bound.
inline BoundReport check_apriori_bounds(const GridField& u, const RadialProblem& problem, const ConstantPack& pack,
                                        double slack = 0.01, std::optional<double> c_bound = std::nullopt) {
    const double m = problem.m;
    const double grad2 = grad_l2_ball(u, problem.domain().r_outer);
    const double mass = std::pow(lp_norm(u, m + 1.0), m + 1.0);
    const double l2 = lp_norm(u, 2.0);
    const double fnorm = lp_norm(problem.source, (m + 1.0) / m);
    const double fpow = std::pow(fnorm, (m + 1.0) / m);
    BoundReport rep;
    rep.c_bound = c_bound.value_or(1.0);
    rep.c_bound_calibrated = c_bound.has_value();
    rep.lhs1 = grad2 + mass;
    rep.rhs1 = pack.M0 * fpow;
    rep.lhs2 = grad2 + l2 * l2 + mass;
    rep.rhs2 = rep.c_bound * pack.M0_tilde *
               (1.0 + std::pow(fnorm, pack.delta_bound_exponent * (m + 1.0) / m)) * fpow;
    rep.pass1 = rep.lhs1 <= rep.rhs1 * (1.0 + slack);
    rep.pass2 = rep.lhs2 <= rep.rhs2 * (1.0 + slack);
    return rep;
}

// Stationary equation behind standing waves:
//   -Δφ - λ f(φ) + b φ = -F,  with λ complex and b >= 0 real.
struct StandingWaveProblem {
    Complex lambda;
    double b = 0.0;
    GridField source;
};

inline bool standing_wave_admissible(Complex lambda, double b) {
    if (lambda == Complex{0.0, 0.0} || b < 0.0) return false;
    if (lambda.imag() == 0.0 && lambda.real() > 0.0) return false;
    return true;
}

// Multiplying the stationary equation by i gives the form solved here.
inline RadialProblem to_radial_problem(const StandingWaveProblem& sw, double m, double delta = 1.0) {
    require(standing_wave_admissible(sw.lambda, sw.b), "hypothesis_failed",
            "standing waves need lambda != 0, b >= 0, and Re(lambda) <= 0 when lambda is real");
    const Complex i{0.0, 1.0};
    GridField g(sw.source.mesh);
    for (std::size_t j = 0; j < g.size(); ++j) g.values[j] = -i * sw.source.values[j];
    return make_problem(make_params(-i * sw.lambda, i * sw.b, delta), m, std::move(g));
}

struct StandingWaveSnapshot {
    GridField u;
    GridField residual;
};

// u(t) = φ e^{ibt} and the discrete residual of  i u_t + Δu + λ f(u) - F e^{ibt}.
inline StandingWaveSnapshot standing_wave(const GridField& phi, const StandingWaveProblem& sw, double m, double t) {
    require_same_mesh(phi, sw.source);
    const auto lap = assemble_laplacian(phi.mesh);
    const Complex i{0.0, 1.0};
    const Complex phase = std::exp(i * (sw.b * t));
    GridField u(phi.mesh);
    for (std::size_t j = 0; j < u.size(); ++j) u.values[j] = phi.values[j] * phase;
    const auto lu = lap.apply(u.values);
    GridField res(phi.mesh);
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (lap.dirichlet[j]) continue;
        const Complex dudt = i * sw.b * u.values[j];
        res.values[j] = i * dudt + lu[j] + sw.lambda * singular_power(u.values[j], m) - sw.source.values[j] * phase;
    }
    return {std::move(u), std::move(res)};
}

}  // namespace snls
