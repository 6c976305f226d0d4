#pragma once

#include <cmath>

#include "complex_matrix.hpp"

namespace qbessel {

// exp(M) by scaling-and-squaring around a truncated Taylor core. With the
// scaled norm held below 1/2 the 24-term series is already far below
// double roundoff, and squaring climbs back up.
inline CMatrix mat_exp(const CMatrix& m, double norm_bound = 50.0) {
    if (!m.finite()) throw NumericError(errc::nonfinite, "mat_exp: non-finite input");
    const double nrm = two_norm(m);
    if (nrm > norm_bound)
        throw NumericError(errc::overflow, "mat_exp: ||M|| above configured bound");

    int s = 0;
    double scaled = nrm;
    while (scaled > 0.5) { scaled *= 0.5; ++s; }

    CMatrix x = m * Complex(std::ldexp(1.0, -s));
    const int n = m.dim();
    CMatrix sum = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = term * x;
        term *= Complex(1.0 / k);
        sum += term;
        if (term.max_abs() < 1e-18 * (1.0 + sum.max_abs())) break;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

// c^E = exp(E log c) for real c > 0. Covers q^A, z^{A+(nu-1)I}, (1-q)^{I-F}.
inline CMatrix scalar_power(double c, const CMatrix& e) {
    if (!(c > 0.0))
        throw NumericError(errc::domain, "scalar_power: base must be positive");
    return mat_exp(e * Complex(std::log(c)), 1e6);
}

} // namespace qbessel
