#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <complex>
#include <string>

#include "snls/error.hpp"

namespace snls {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline Complex checked(Complex z, const char* what = "complex value") {
    require(is_finite(z), "non_finite", std::string(what) + " must have finite components");
    return z;
}

// z|z|^{m-1} with the convention that it vanishes at z = 0.
inline Complex singular_power(Complex z, double m) {
    const double r = std::abs(z);
    if (r == 0.0) return {0.0, 0.0};
    return z * std::pow(r, m - 1.0);
}

// Parses "re,im" (or a lone real). Errors report the offending character offset.
inline Complex parse_complex(const std::string& text) {
    auto parse_part = [&](std::size_t begin, std::size_t end) {
        const std::string part = text.substr(begin, end - begin);
        const char* first = part.c_str();
        char* stop = nullptr;
        const double value = std::strtod(first, &stop);
        std::size_t pos = static_cast<std::size_t>(stop - first);
        const bool read_something = stop != first;
        while (pos < part.size() && std::isspace(static_cast<unsigned char>(part[pos]))) ++pos;
        if (!read_something || pos != part.size())
            throw Error("parse_error", "cannot parse complex '" + text + "' at position " +
                                           std::to_string(begin + (read_something ? pos : 0)));
        return value;
    };
    const auto comma = text.find(',');
    if (comma == std::string::npos) return checked({parse_part(0, text.size()), 0.0});
    return checked({parse_part(0, comma), parse_part(comma + 1, text.size())});
}

}  // namespace snls
