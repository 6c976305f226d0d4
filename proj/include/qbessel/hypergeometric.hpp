#pragma once

#include <optional>
#include <vector>

#include "q_calculus.hpp"

namespace qbessel {

// ---- low-level series engine --------------------------------------------
//
// sum_k  prod_i (U_i;q)_k [prod_j (V_j;q)_k]^{-1} [(-1)^k q^C(k,2)]^e Z^k / (q;q)_k
//
// U_i / V_j are the Pochhammer argument matrices themselves (q^A-form, or the
// literal zero matrix, whose Pochhammer is I). Terms are built incrementally:
// one multiply per parameter per step. Z may be a commuting matrix.

struct BasicSeries {
    std::vector<CMatrix> upper_args;
    std::vector<CMatrix> lower_args;
    int balancing_exponent = 0; // e = 1 + s - r in the r-phi-s convention
    std::optional<int> terminating_order;
};

namespace detail {

template <class Arg>
CMatrix evaluate_basic_series(const BasicSeries& s, const Arg& z, const QContext& ctx) {
    int dim = 0;
    if (!s.upper_args.empty()) dim = s.upper_args.front().dim();
    else if (!s.lower_args.empty()) dim = s.lower_args.front().dim();
    else if constexpr (std::is_same_v<Arg, CMatrix>) dim = z.dim();
    if (dim == 0)
        throw NumericError(errc::config, "series: cannot infer dimension");
    const CMatrix I = CMatrix::identity(dim);
    const double q = ctx.q;

    CMatrix term = I;
    CMatrix sum(dim);
    int run = 0;
    const bool finite = s.terminating_order.has_value();
    const int kmax = finite ? *s.terminating_order : ctx.max_terms;
    double qk = 1.0; // q^k
    for (int k = 0;; ++k) {
        sum += term;
        if (finite && k >= kmax) break;
        if (!finite && k >= kmax)
            throw NumericError(errc::truncation, "series: max_terms reached");
        // t_{k+1} from t_k
        for (const CMatrix& u : s.upper_args) term = term * (I - u * Complex(qk));
        for (const CMatrix& v : s.lower_args) {
            if (v.max_abs() == 0.0) continue; // (0;q)_k = I
            term = term * mat_inv(I - v * Complex(qk), ctx.inv_cond_limit);
        }
        if (s.balancing_exponent != 0) {
            Complex f = Complex(-1.0) * qk; // (-1) q^k
            if (s.balancing_exponent == 1) term = term * f;
            else if (s.balancing_exponent == -1) term = term * (Complex(1.0) / f);
            else term = term * std::pow(f, s.balancing_exponent);
        }
        if constexpr (std::is_same_v<Arg, CMatrix>) term = term * z;
        else term = term * z;
        term = term * Complex(1.0 / (1.0 - q * qk));
        qk *= q;
        if (!finite) {
            if (term.max_abs() == 0.0) { sum += term; break; } // structural termination
            if (term.max_abs() < ctx.series_tol * (1.0 + sum.max_abs())) {
                if (++run >= ctx.consecutive_small) { sum += term; break; }
            } else {
                run = 0;
            }
        }
    }
    return sum;
}

} // namespace detail

inline CMatrix evaluate_series(const BasicSeries& s, Complex z, const QContext& ctx) {
    return detail::evaluate_basic_series(s, z, ctx);
}
inline CMatrix evaluate_series(const BasicSeries& s, const CMatrix& z, const QContext& ctx) {
    return detail::evaluate_basic_series(s, z, ctx);
}

// ---- r-phi-s over exponent matrices --------------------------------------
//
// Parameters are specified as the exponent matrices A_tau / B_v (the series
// uses q^{A_tau}, q^{B_v}). One convention quirk, adopted deliberately: a
// zero-matrix *lower* parameter means the literal Pochhammer (0;q)_k = I, so
// zero lowers never need inversion; a zero-matrix *upper* means q^0 = I and
// the series collapses to its k=0 term.

struct HypergeometricSpec {
    std::vector<CMatrix> uppers;
    std::vector<CMatrix> lowers;
    std::optional<int> terminating_order;
    bool near_miss_flagged = false;

    static HypergeometricSpec make(std::vector<CMatrix> uppers,
                                   std::vector<CMatrix> lowers) {
        HypergeometricSpec s;
        s.uppers = std::move(uppers);
        s.lowers = std::move(lowers);
        for (const CMatrix& a : s.uppers) {
            auto order = negative_integer_scalar(a, 1e-12);
            if (order) {
                if (!s.terminating_order || *order < *s.terminating_order)
                    s.terminating_order = order;
            } else if (negative_integer_scalar(a, 1e-6)) {
                s.near_miss_flagged = true; // close to -nI but not within 1e-12
            }
        }
        return s;
    }

    // detects A == -n I entrywise within tol, n >= 0
    static std::optional<int> negative_integer_scalar(const CMatrix& a, double tol) {
        const Complex d = a.at(0, 0);
        if (std::abs(d.imag()) > tol) return std::nullopt;
        double n = -d.real();
        double nr = std::round(n);
        if (nr < 0.0 || std::abs(n - nr) > tol) return std::nullopt;
        CMatrix ref = CMatrix::scalar(a.dim(), Complex(-nr, 0.0));
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j)
                if (std::abs(a.at(i, j) - ref.at(i, j)) > tol) return std::nullopt;
        return static_cast<int>(nr);
    }
};

namespace detail {

template <class Arg>
CMatrix phi_rs_impl(const HypergeometricSpec& spec, const Arg& z, const QContext& ctx) {
    BasicSeries s;
    s.terminating_order = spec.terminating_order;
    s.balancing_exponent = 1 + static_cast<int>(spec.lowers.size())
                             - static_cast<int>(spec.uppers.size());
    for (const CMatrix& a : spec.uppers) s.upper_args.push_back(scalar_power(ctx.q, a));
    for (const CMatrix& b : spec.lowers) {
        if (b.max_abs() == 0.0) s.lower_args.push_back(b); // literal zero lower
        else s.lower_args.push_back(scalar_power(ctx.q, b));
    }
    if (!s.terminating_order) {
        double zn;
        if constexpr (std::is_same_v<Arg, CMatrix>) zn = two_norm(z);
        else zn = std::abs(z);
        if (s.balancing_exponent < 0)
            throw NumericError(errc::domain, "phi_rs: non-terminating series with r > s+1 diverges");
        if (s.balancing_exponent == 0 && zn >= 1.0)
            throw NumericError(errc::domain, "phi_rs: |z| >= 1 outside the convergence region");
    }
    return evaluate_basic_series(s, z, ctx);
}

} // namespace detail

inline CMatrix phi_rs(const HypergeometricSpec& spec, Complex z, const QContext& ctx) {
    return detail::phi_rs_impl(spec, z, ctx);
}
inline CMatrix phi_rs(const HypergeometricSpec& spec, const CMatrix& z, const QContext& ctx) {
    return detail::phi_rs_impl(spec, z, ctx);
}

// 2phi1(q^A, q^B; E; q, z) with the zero-lower convention above.
inline CMatrix phi21(const CMatrix& a, const CMatrix& b, const CMatrix& e, Complex z,
                     const QContext& ctx) {
    return phi_rs(HypergeometricSpec::make({a, b}, {e}), z, ctx);
}

// ---- eps-regularized scalar Pochhammer ratios -----------------------------
//
// Integer-exponent ratios like (q^{-n};q)_k / (q^{1-k+n};q)_l carry exact
// 0/0 pairs once k > n. The value used is the limit under the derivation's
// parameter perturbation: each zero factor is (1 - q^{dir*eps}) ~ -dir*eps*ln q,
// so a cancelled pair contributes dir_num * dir_den and everything else is the
// plain ratio of the nonzero factors.

struct PochFactorGroup {
    int base;  // first exponent
    int count; // number of factors (1 - q^{base+j}), j = 0..count-1
    int dir;   // sign of d(exponent)/d(eps) under the perturbation
};

inline double poch_ratio_eps_limit(const std::vector<PochFactorGroup>& num,
                                   const std::vector<PochFactorGroup>& den,
                                   double q) {
    double nv = 1.0, dv = 1.0;
    int nz = 0, dz = 0, sign = 1;
    for (const auto& g : num)
        for (int j = 0; j < g.count; ++j) {
            int e = g.base + j;
            if (e == 0) { ++nz; sign *= g.dir; }
            else nv *= (1.0 - std::pow(q, e));
        }
    for (const auto& g : den)
        for (int j = 0; j < g.count; ++j) {
            int e = g.base + j;
            if (e == 0) { ++dz; sign *= g.dir; }
            else dv *= (1.0 - std::pow(q, e));
        }
    if (nz > dz) return 0.0;
    if (dz > nz)
        throw NumericError(errc::singular, "poch_ratio_eps_limit: unpaired denominator zero");
    return sign * nv / dv;
}

} // namespace qbessel
