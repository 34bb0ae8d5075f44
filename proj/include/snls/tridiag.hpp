#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "snls/complex.hpp"

namespace snls {

// Real 2x2 block acting on (Re z, Im z).
struct Block2 {
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};  // row-major

    static Block2 identity(double s = 1.0) { return {{s, 0.0, 0.0, s}}; }
    // Multiplication by the complex number c.
    static Block2 complex(Complex c) { return {{c.real(), -c.imag(), c.imag(), c.real()}}; }

    Block2 operator+(const Block2& o) const {
        return {{m[0] + o.m[0], m[1] + o.m[1], m[2] + o.m[2], m[3] + o.m[3]}};
    }
    Block2 operator-(const Block2& o) const {
        return {{m[0] - o.m[0], m[1] - o.m[1], m[2] - o.m[2], m[3] - o.m[3]}};
    }
    Block2 operator*(const Block2& o) const {
        return {{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
                 m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
    }
    Block2 operator*(double s) const { return {{m[0] * s, m[1] * s, m[2] * s, m[3] * s}}; }
    Complex operator*(Complex z) const {
        return {m[0] * z.real() + m[1] * z.imag(), m[2] * z.real() + m[3] * z.imag()};
    }
    double det() const { return m[0] * m[3] - m[1] * m[2]; }
    double norm_inf() const {
        return std::max(std::abs(m[0]) + std::abs(m[1]), std::abs(m[2]) + std::abs(m[3]));
    }
    Block2 inverse() const {
        const double d = det();
        return {{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d}};
    }
};

// Block tridiagonal system: lower[j] u[j-1] + diag[j] u[j] + upper[j] u[j+1] = rhs[j].
struct BlockTridiagonal {
    std::vector<Block2> lower, diag, upper;

    explicit BlockTridiagonal(std::size_t n = 0) : lower(n), diag(n), upper(n) {}
    std::size_t size() const { return diag.size(); }

    std::vector<Complex> apply(const std::vector<Complex>& u) const {
        const std::size_t n = size();
        std::vector<Complex> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            Complex s = diag[j] * u[j];
            if (j > 0) s += lower[j] * u[j - 1];
            if (j + 1 < n) s += upper[j] * u[j + 1];
            out[j] = s;
        }
        return out;
    }
};

// Block Thomas elimination. Throws when a pivot block is numerically singular.
inline std::vector<Complex> solve_block_tridiagonal(const BlockTridiagonal& sys, const std::vector<Complex>& rhs) {
    const std::size_t n = sys.size();
    require(rhs.size() == n && n > 0, "size_mismatch", "right-hand side length differs from system size");
    std::vector<Block2> c(n);
    std::vector<Complex> d(n);
    Block2 pivot = sys.diag[0];
    for (std::size_t j = 0;; ++j) {
        const double scale = std::max(pivot.norm_inf(), 1e-300);
        require(std::abs(pivot.det()) > 1e-14 * scale * scale, "singular_system",
                "zero pivot at row " + std::to_string(j));
        const Block2 inv = pivot.inverse();
        const Complex prev = j > 0 ? d[j - 1] : Complex{};
        const Complex r = j > 0 ? rhs[j] - sys.lower[j] * prev : rhs[j];
        d[j] = inv * r;
        if (j + 1 == n) break;
        c[j] = inv * sys.upper[j];
        pivot = sys.diag[j + 1] - sys.lower[j + 1] * c[j];
    }
    std::vector<Complex> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) x[j] = d[j] - c[j] * x[j + 1];
    return x;
}

}  // namespace snls
