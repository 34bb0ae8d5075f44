#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "snls/complex.hpp"

namespace snls {

// C minus the closed lower imaginary half-axis.
inline bool in_set_A(Complex z) {
    checked(z);
    return !(z.real() == 0.0 && z.imag() <= 0.0);
}

inline bool in_set_B(Complex z) { return in_set_A(z) || z == Complex{0.0, 0.0}; }

// Existence hypothesis on the coefficient pair.
inline bool check_existence(Complex a, Complex b) {
    if (!in_set_A(a) || !in_set_B(b)) return false;
    const double rr = a.real() * b.real();
    if (rr >= 0.0) return true;
    return b.imag() > (b.real() / a.real()) * a.imag();
}

// Uniqueness hypothesis on the coefficient pair.
inline bool check_uniqueness(Complex a, Complex b) {
    checked(a);
    checked(b);
    if (a.imag() < 0.0) return false;
    if (a != Complex{0.0, 0.0}) return (a * std::conj(b)).real() >= 0.0;
    return in_set_B(b);
}

struct ParamPair {
    Complex a;
    Complex b;
    double delta = 1.0;
    bool exists_ok = false;
    bool unique_ok = false;
};

inline ParamPair make_params(Complex a, Complex b, double delta = 1.0) {
    require(delta > 0.0 && std::isfinite(delta), "invalid_delta", "delta must be positive and finite");
    return {checked(a, "a"), checked(b, "b"), delta, check_existence(a, b), check_uniqueness(a, b)};
}

struct ConstantPack {
    Complex a;
    Complex b;
    double delta = 1.0;
    double m = 0.5;
    int dim = 1;
    std::optional<double> A_delta;
    std::optional<double> B;
    double L = 0.0;
    double M = 0.0;
    double L1 = 0.0;
    double M0 = 0.0;
    double M0_tilde = 0.0;
    double delta_bound_exponent = 0.0;
};

// Builds the constant pack from the literal case tables; m and N only enter
// the a-priori bound constants.
inline ConstantPack constants(Complex a, Complex b, double delta, double m = 0.5, int dim = 1) {
    require(delta > 0.0, "invalid_delta", "delta must be positive");
    require(m > 0.0 && m < 1.0, "invalid_m", "m must lie in (0,1)");
    require(dim >= 1, "invalid_dim", "dimension must be at least 1");
    require(check_existence(a, b), "hypothesis_failed", "existence hypothesis does not hold for (a,b)");

    const double ra = a.real(), ia = a.imag(), rb = b.real(), ib = b.imag();
    const double rr = ra * rb;
    ConstantPack pack;
    pack.a = a;
    pack.b = b;
    pack.delta = delta;
    pack.m = m;
    pack.dim = dim;
    if (ra != 0.0) pack.A_delta = (std::abs(ra) + std::abs(ia) + delta) / std::abs(ra);
    if (rb != 0.0) pack.B = (std::abs(rb) + std::abs(ib)) / std::abs(rb);

    if (ia < 0.0 && rr >= 0.0)
        pack.L = delta;
    else if (ia == 0.0 && ib >= 0.0 && rr >= 0.0)
        pack.L = std::abs(ra);
    else if (ia > 0.0 && ib >= 0.0)
        pack.L = ia;
    else
        pack.L = ia - (ra / rb) * ib;

    if (ia < 0.0 && ib < 0.0 && rr >= 0.0)
        pack.M = std::max(*pack.A_delta, *pack.B);
    else if (ia < 0.0 && ib >= 0.0 && rr >= 0.0)
        pack.M = *pack.A_delta;
    else if (ia >= 0.0 && ib >= 0.0 && (ia > 0.0 || rr >= 0.0))
        pack.M = 2.0;
    else
        pack.M = *pack.B;

    pack.L1 = std::max(1.0, 1.0 / pack.L);
    pack.M0 = pack.M * std::pow(2.0 * pack.M / pack.L, 1.0 / m) * std::max(1.0, 2.0 / pack.L);
    pack.delta_bound_exponent = 2.0 * (1.0 - m) / ((dim + 2.0) - m * (dim - 2.0));
    pack.M0_tilde = pack.M0 * (1.0 + std::pow(pack.M0, pack.delta_bound_exponent));
    return pack;
}

inline ConstantPack constants(const ParamPair& p, double m = 0.5, int dim = 1) {
    return constants(p.a, p.b, p.delta, m, dim);
}

// Which of the six branches of the combination argument applies to (a,b).
inline int combination_case(Complex a, Complex b) {
    const double ra = a.real(), ia = a.imag(), rb = b.real(), ib = b.imag();
    const double rr = ra * rb;
    if (rr < 0.0 && ib != 0.0) return 4;
    if (ia > 0.0 && ib >= 0.0) return 1;
    if (ia == 0.0 && ib >= 0.0 && rr >= 0.0) return 2;
    if (ia >= 0.0 && ib < 0.0 && rr >= 0.0) return 3;
    if (ia < 0.0 && ib >= 0.0 && rr >= 0.0) return 5;
    if (ia < 0.0 && ib < 0.0 && rr > 0.0) return 6;
    return 4;
}

inline bool energy_tuple_admissible(const ConstantPack& pack, double c0, double c1, double c2, double c3,
                             double rel_tol = 1e-12) {
    if (c0 < 0.0 || c1 < 0.0 || c2 < 0.0 || c3 < 0.0) return false;
    const double im_part = c1 + pack.a.imag() * c2 + pack.b.imag() * c3;
    const double re_part = pack.a.real() * c2 + pack.b.real() * c3;
    const double slack = rel_tol * (1.0 + c0);
    return std::abs(im_part) <= c0 + slack && std::abs(re_part) <= c0 + slack;
}

// Checks 0 <= C1 + L*C2 <= M*C0 for a tuple satisfying both energy bounds.
inline bool combine_energy_bounds(const ConstantPack& pack, double c0, double c1, double c2, double c3) {
    require(energy_tuple_admissible(pack, c0, c1, c2, c3), "precondition_violated",
            "tuple (C0..C3) does not satisfy the imaginary/real part bounds");
    const double value = c1 + pack.L * c2;
    const double tol = 1e-12 * (1.0 + pack.M * c0);
    return value >= -tol && value <= pack.M * c0 + tol;
}

struct DeltaScanRow {
    double delta;
    double L;
    double M;
};

// L and M as functions of the auxiliary parameter; the choice stays with the caller.
inline std::vector<DeltaScanRow> scan_delta(Complex a, Complex b, const std::vector<double>& deltas) {
    std::vector<DeltaScanRow> rows;
    rows.reserve(deltas.size());
    for (double d : deltas) {
        const auto pack = constants(a, b, d);
        rows.push_back({d, pack.L, pack.M});
    }
    return rows;
}

struct Axis {
    double lo = -2.0;
    double hi = 2.0;
    int count = 21;

    double at(int i) const {
        if (count == 1) return lo;
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

// Rectangular grid over (Re a, Im a, Re b, Im b). With off_lines set, points
// sit at cell centres so that none lands on a boundary line such as Re z = 0.
struct GridSpec {
    Axis re_a, im_a, re_b, im_b;
    bool off_lines = false;
};

struct RegionPoint {
    Complex a;
    Complex b;
    bool in_A;
    bool in_B;
    bool exists;
    bool unique;
};

inline double axis_value(const Axis& axis, int i, bool off_lines) {
    if (!off_lines) return axis.at(i);
    return axis.lo + (axis.hi - axis.lo) * (i + 0.5) / static_cast<double>(axis.count);
}

// Flags per point; the membership columns refer to a in A and b in B.
inline std::vector<RegionPoint> classify_region(const GridSpec& grid) {
    for (const Axis* ax : {&grid.re_a, &grid.im_a, &grid.re_b, &grid.im_b})
        require(ax->count >= 1, "empty_grid", "every grid axis needs at least one point");
    std::vector<RegionPoint> out;
    out.reserve(static_cast<std::size_t>(grid.re_a.count) * grid.im_a.count * grid.re_b.count *
                grid.im_b.count);
    for (int i = 0; i < grid.re_a.count; ++i)
        for (int j = 0; j < grid.im_a.count; ++j)
            for (int k = 0; k < grid.re_b.count; ++k)
                for (int l = 0; l < grid.im_b.count; ++l) {
                    const Complex a{axis_value(grid.re_a, i, grid.off_lines),
                                    axis_value(grid.im_a, j, grid.off_lines)};
                    const Complex b{axis_value(grid.re_b, k, grid.off_lines),
                                    axis_value(grid.im_b, l, grid.off_lines)};
                    out.push_back({a, b, in_set_A(a), in_set_B(b), check_existence(a, b),
                                   check_uniqueness(a, b)});
                }
    return out;
}

// The three equivalent formulations of "uniqueness and existence together".
struct UniquenessExistenceForms {
    bool both;
    bool via_sets;
    bool via_sign;
};

inline UniquenessExistenceForms uniqueness_existence_forms(Complex a, Complex b) {
    const bool uni = check_uniqueness(a, b);
    const bool via_sign_extra =
        a != Complex{0.0, 0.0} && (!(a.imag() == 0.0 && b.real() == 0.0) || b.imag() >= 0.0);
    return {uni && check_existence(a, b), uni && in_set_A(a) && in_set_B(b), uni && via_sign_extra};
}

}  // namespace snls
