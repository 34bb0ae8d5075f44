#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "snls/complex.hpp"

namespace snls {

enum class DomainKind { ball, annulus };

struct RadialDomain {
    int dim = 1;
    double r_inner = 0.0;
    double r_outer = 1.0;

    DomainKind kind() const { return r_inner == 0.0 ? DomainKind::ball : DomainKind::annulus; }
    bool is_ball() const { return kind() == DomainKind::ball; }
    bool operator==(const RadialDomain&) const = default;
};

inline RadialDomain ball(int dim, double radius) { return {dim, 0.0, radius}; }
inline RadialDomain annulus(int dim, double r_inner, double r_outer) { return {dim, r_inner, r_outer}; }

// Area of the unit sphere in R^N; 2 for N = 1 (both ends of the interval).
inline double sphere_area(int dim) {
    const double half = 0.5 * dim;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

struct RadialMesh {
    RadialDomain domain;
    std::vector<double> nodes;
    double h = 0.0;

    std::size_t size() const { return nodes.size(); }
    int dim() const { return domain.dim; }
    bool operator==(const RadialMesh& other) const {
        return domain == other.domain && nodes.size() == other.nodes.size();
    }
};

inline constexpr std::size_t min_mesh_nodes = 16;

inline RadialMesh build_mesh(const RadialDomain& domain, std::size_t n_nodes) {
    require(domain.dim >= 1, "degenerate_domain", "dimension must be at least 1");
    require(domain.r_inner >= 0.0 && std::isfinite(domain.r_outer) && domain.r_outer > domain.r_inner,
            "degenerate_domain", "need 0 <= r_inner < r_outer < inf");
    require(n_nodes >= min_mesh_nodes, "degenerate_domain", "a mesh needs at least 16 nodes");
    RadialMesh mesh;
    mesh.domain = domain;
    mesh.h = (domain.r_outer - domain.r_inner) / static_cast<double>(n_nodes - 1);
    mesh.nodes.resize(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j)
        mesh.nodes[j] = domain.r_inner + (domain.r_outer - domain.r_inner) * static_cast<double>(j) /
                                             static_cast<double>(n_nodes - 1);
    mesh.nodes.back() = domain.r_outer;
    return mesh;
}

struct GridField {
    RadialMesh mesh;
    std::vector<Complex> values;

    GridField() = default;
    explicit GridField(RadialMesh m) : mesh(std::move(m)), values(mesh.size(), Complex{}) {}
    GridField(RadialMesh m, std::vector<Complex> v) : mesh(std::move(m)), values(std::move(v)) {
        require(values.size() == mesh.size(), "mesh_mismatch", "field length must match node count");
    }

    std::size_t size() const { return values.size(); }
    Complex& operator[](std::size_t j) { return values[j]; }
    Complex operator[](std::size_t j) const { return values[j]; }
};

template <class Fn>
GridField sample(const RadialMesh& mesh, Fn&& fn) {
    GridField out(mesh);
    for (std::size_t j = 0; j < mesh.size(); ++j) out.values[j] = Complex(fn(mesh.nodes[j]));
    return out;
}

inline void require_same_mesh(const GridField& x, const GridField& y) {
    require(x.mesh == y.mesh && x.size() == y.size(), "mesh_mismatch", "fields live on different meshes");
}

// Radial volume weights: trapezoid weight times the sphere factor.
inline std::vector<double> volume_weights(const RadialMesh& mesh) {
    const double area = sphere_area(mesh.dim());
    std::vector<double> w(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        const double r = mesh.nodes[j];
        w[j] = area * std::pow(r, mesh.dim() - 1) * mesh.h;
    }
    return w;
}

// Index of the node nearest to rho.
inline std::size_t snap_index(const RadialMesh& mesh, double rho) {
    const auto& d = mesh.domain;
    require(rho >= d.r_inner - 1e-12 * d.r_outer && rho <= d.r_outer * (1.0 + 1e-12), "rho_out_of_domain",
            "radius lies outside the mesh");
    const double s = (rho - d.r_inner) / mesh.h;
    const auto k = static_cast<long>(std::llround(s));
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(mesh.size()) - 1));
}

// Trapezoid integral of density[j] over the ball up to node k.
inline double ball_integral(const RadialMesh& mesh, const std::vector<double>& density, std::size_t k) {
    if (k == 0) return 0.0;
    const double area = sphere_area(mesh.dim());
    double sum = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
        const double w = (j == 0 || j == k) ? 0.5 : 1.0;
        sum += w * density[j] * std::pow(mesh.nodes[j], mesh.dim() - 1);
    }
    return area * mesh.h * sum;
}

// Cumulative version: out[k] equals ball_integral(mesh, density, k).
inline std::vector<double> cumulative_ball_integral(const RadialMesh& mesh, const std::vector<double>& density) {
    const double area = sphere_area(mesh.dim());
    std::vector<double> out(mesh.size(), 0.0);
    double sum = 0.0;
    for (std::size_t k = 1; k < mesh.size(); ++k) {
        const double left = density[k - 1] * std::pow(mesh.nodes[k - 1], mesh.dim() - 1);
        const double right = density[k] * std::pow(mesh.nodes[k], mesh.dim() - 1);
        sum += 0.5 * (left + right);
        out[k] = area * mesh.h * sum;
    }
    return out;
}

inline double lp_ball_norm(const GridField& u, double p, double rho) {
    require(p >= 1.0, "invalid_exponent", "p must be at least 1");
    const std::size_t k = snap_index(u.mesh, rho);
    if (std::isinf(p)) {
        double mx = 0.0;
        for (std::size_t j = 0; j <= k; ++j) mx = std::max(mx, std::abs(u.values[j]));
        return mx;
    }
    std::vector<double> dens(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) dens[j] = std::pow(std::abs(u.values[j]), p);
    return std::pow(ball_integral(u.mesh, dens, k), 1.0 / p);
}

inline double lp_norm(const GridField& u, double p) { return lp_ball_norm(u, p, u.mesh.domain.r_outer); }

// du/dr at every node: centered inside, u'(0) = 0 at a ball centre, and
// second-order one-sided at the remaining mesh ends.
inline std::vector<Complex> radial_derivative(const GridField& u) {
    const std::size_t n = u.size();
    const double h = u.mesh.h;
    const auto& v = u.values;
    std::vector<Complex> d(n);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
    d[0] = u.mesh.domain.is_ball() ? Complex{} : (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return d;
}

inline double grad_l2_ball(const GridField& u, double rho) {
    const auto d = radial_derivative(u);
    std::vector<double> dens(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) dens[j] = std::norm(d[j]);
    return ball_integral(u.mesh, dens, snap_index(u.mesh, rho));
}

inline double boundary_flux_at(const GridField& u, const std::vector<Complex>& du, std::size_t k) {
    const double r = u.mesh.nodes[k];
    return sphere_area(u.mesh.dim()) * std::pow(r, u.mesh.dim() - 1) * std::abs(std::conj(u.values[k]) * du[k]);
}

// |surface integral of conj(u) du/dr over the sphere of radius rho|.
inline double boundary_flux_I(const GridField& u, double rho) {
    const std::size_t k = snap_index(u.mesh, rho);
    const bool centre = k == 0 && u.mesh.domain.is_ball();
    require(centre || (k > 0 && k + 1 < u.size()), "rho_at_boundary",
            "flux needs an interior node; one-sided stencils are not used here");
    if (centre) return 0.0;
    return boundary_flux_at(u, radial_derivative(u), k);
}

inline double source_term_J(const GridField& u, const GridField& source, double rho) {
    require_same_mesh(u, source);
    std::vector<double> dens(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) dens[j] = std::abs(source.values[j]) * std::abs(u.values[j]);
    return ball_integral(u.mesh, dens, snap_index(u.mesh, rho));
}

inline Complex domain_integral(const GridField& u) {
    const auto w = volume_weights(u.mesh);
    Complex sum{};
    for (std::size_t j = 0; j < u.size(); ++j) sum += ((j == 0 || j + 1 == u.size()) ? 0.5 : 1.0) * w[j] * u.values[j];
    return sum;
}

// L2 pairing: integral of x * conj(y) over the whole domain.
inline Complex inner_product(const GridField& x, const GridField& y) {
    require_same_mesh(x, y);
    GridField prod(x.mesh);
    for (std::size_t j = 0; j < x.size(); ++j) prod.values[j] = x.values[j] * std::conj(y.values[j]);
    return domain_integral(prod);
}

inline GridField operator-(const GridField& x, const GridField& y) {
    require_same_mesh(x, y);
    GridField out(x.mesh);
    for (std::size_t j = 0; j < x.size(); ++j) out.values[j] = x.values[j] - y.values[j];
    return out;
}

inline double max_abs(const GridField& u) {
    double mx = 0.0;
    for (const auto& z : u.values) mx = std::max(mx, std::abs(z));
    return mx;
}

}  // namespace snls
