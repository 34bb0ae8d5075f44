#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "snls/mesh.hpp"
#include "snls/params.hpp"
#include "snls/solver.hpp"

namespace snls {

inline bool within(double r, double lo, double hi) {
    const double pad = 1e-12 * std::max(1.0, hi);
    return r >= lo - pad && r <= hi + pad;
}

inline GridField plateau_source(const RadialMesh& mesh, Complex amplitude, double radius) {
    return sample(mesh, [&](double r) { return within(r, 0.0, radius) ? amplitude : Complex{}; });
}

inline GridField shell_source(const RadialMesh& mesh, Complex amplitude, double lo, double hi) {
    return sample(mesh, [&](double r) { return within(r, lo, hi) ? amplitude : Complex{}; });
}

// amplitude * (1 - (r/radius)^2)_+^2, continuously differentiable.
inline GridField bump_source(const RadialMesh& mesh, Complex amplitude, double radius) {
    return sample(mesh, [&](double r) {
        const double s = 1.0 - (r / radius) * (r / radius);
        return s > 0.0 ? amplitude * (s * s) : Complex{};
    });
}

// Profile (1 - r^2/R0^2)_+^k with its exact radial Laplacian in dimension N.
struct PowerProfile {
    double power = 2.0;
    double radius = 1.0;

    double value(double r) const {
        const double s = 1.0 - (r * r) / (radius * radius);
        return s > 0.0 ? std::pow(s, power) : 0.0;
    }
    double laplacian(double r, int dim) const {
        const double s = 1.0 - (r * r) / (radius * radius);
        if (s <= 0.0) return 0.0;
        const double k = power, R2 = radius * radius;
        return 4.0 * k * (k - 1.0) * std::pow(s, k - 2.0) * r * r / (R2 * R2) -
               2.0 * k * dim * std::pow(s, k - 1.0) / R2;
    }
};

// Source making the profile an exact solution of the continuous equation.
inline GridField manufactured_source(const RadialMesh& mesh, const PowerProfile& profile, Complex a, Complex b,
                                     double m) {
    const Complex i{0.0, 1.0};
    return sample(mesh, [&](double r) {
        const double u = profile.value(r);
        const Complex f = u > 0.0 ? Complex(std::pow(u, m)) : Complex{};
        return -i * profile.laplacian(r, mesh.dim()) + a * f + b * u;
    });
}

inline GridField profile_field(const RadialMesh& mesh, const PowerProfile& profile) {
    return sample(mesh, [&](double r) { return profile.value(r); });
}

// Source builders addressed by name, with a flat parameter list:
//   zero        -
//   plateau     amplitude radius
//   shell       amplitude r_lo r_hi
//   bump        amplitude radius
//   manufactured power radius
inline GridField make_source(const std::string& kind, const std::vector<double>& params, const RadialMesh& mesh,
                             Complex a, Complex b, double m) {
    auto need = [&](std::size_t count) {
        require(params.size() == count, "bad_source_params",
                "source '" + kind + "' expects " + std::to_string(count) + " parameters, got " +
                    std::to_string(params.size()));
    };
    if (kind == "zero") {
        need(0);
        return GridField(mesh);
    }
    if (kind == "plateau") {
        need(2);
        return plateau_source(mesh, params[0], params[1]);
    }
    if (kind == "shell") {
        need(3);
        return shell_source(mesh, params[0], params[1], params[2]);
    }
    if (kind == "bump") {
        need(2);
        return bump_source(mesh, params[0], params[1]);
    }
    if (kind == "manufactured") {
        need(2);
        return manufactured_source(mesh, PowerProfile{params[0], params[1]}, a, b, m);
    }
    throw Error("unknown_source", "unknown source_kind '" + kind + "'");
}

// Everything needed to rebuild a problem at any resolution.
struct ProblemSpec {
    RadialDomain domain{1, 0.0, 1.0};
    std::size_t n_nodes = 257;
    double m = 0.5;
    Complex a{1.0, 0.0};
    Complex b{0.0, 1.0};
    double delta = 1.0;
    std::string source_kind = "zero";
    std::vector<double> source_params;

    RadialProblem build(std::size_t nodes = 0) const {
        const auto mesh = build_mesh(domain, nodes == 0 ? n_nodes : nodes);
        return make_problem(make_params(a, b, delta), m, make_source(source_kind, source_params, mesh, a, b, m));
    }
};

}  // namespace snls
