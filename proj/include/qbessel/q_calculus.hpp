#pragma once

#include <functional>

#include "commuting_family.hpp"
#include "matrix_exponential.hpp"
#include "q_context.hpp"

namespace qbessel {

using MatrixFunction = std::function<CMatrix(Complex)>;

// ---- scalar q-helpers -------------------------------------------------

// (x;q)_n for a complex scalar x
inline Complex qpoch_scalar(Complex x, double q, int n) {
    Complex p(1.0);
    double qk = 1.0;
    for (int k = 0; k < n; ++k) { p *= (Complex(1.0) - x * qk); qk *= q; }
    return p;
}

// (x;q)_inf for a complex scalar x, under the context truncation policy
inline Complex qpoch_inf_scalar(Complex x, const QContext& ctx) {
    Complex p(1.0);
    double qk = 1.0;
    int run = 0;
    for (int k = 0; k < ctx.max_terms; ++k) {
        p *= (Complex(1.0) - x * qk);
        if (std::abs(x) * qk < ctx.series_tol) {
            if (++run >= ctx.consecutive_small) return p;
        } else {
            run = 0;
        }
        qk *= ctx.q;
    }
    throw NumericError(errc::truncation, "qpoch_inf_scalar: max_terms reached");
}

// (q;q)_n
inline double qfact(double q, int n) {
    double p = 1.0, qk = q;
    for (int k = 0; k < n; ++k) { p *= (1.0 - qk); qk *= q; }
    return p;
}

// ---- matrix q-calculus -------------------------------------------------

// [E]_q = (I - q^E)/(1-q)
inline CMatrix q_bracket(const CMatrix& e, const QContext& ctx) {
    const int n = e.dim();
    return (CMatrix::identity(n) - scalar_power(ctx.q, e)) * Complex(1.0 / (1.0 - ctx.q));
}

// (E;q)_n = prod_{t=0}^{n-1} (I - q^t E); the argument E is the matrix whose
// shifted factors are taken (pass q^A form matrices where that is meant).
// Left-to-right product order, kept stable so that
// q_poch(E, n+1) == q_poch(E, n) * (I - q^n E) holds exactly.
inline CMatrix q_poch(const CMatrix& e, int n, const QContext& ctx) {
    if (n < 0) throw NumericError(errc::domain, "q_poch: n must be >= 0");
    CMatrix p = CMatrix::identity(e.dim());
    double qk = 1.0;
    for (int k = 0; k < n; ++k) {
        p = p * (CMatrix::identity(e.dim()) - e * Complex(qk));
        qk *= ctx.q;
    }
    return p;
}

// (E;q)_inf, truncated when ||q^k E|| stays below series_tol for
// consecutive_small successive factors.
inline CMatrix q_poch_inf(const CMatrix& e, const QContext& ctx) {
    if (!e.finite()) throw NumericError(errc::nonfinite, "q_poch_inf: non-finite input");
    CMatrix p = CMatrix::identity(e.dim());
    const double enorm = two_norm(e);
    double qk = 1.0;
    int run = 0;
    for (int k = 0; k < ctx.max_terms; ++k) {
        p = p * (CMatrix::identity(e.dim()) - e * Complex(qk));
        if (enorm * qk < ctx.series_tol) {
            if (++run >= ctx.consecutive_small) return p;
        } else {
            run = 0;
        }
        qk *= ctx.q;
    }
    throw NumericError(errc::truncation, "q_poch_inf: max_terms reached");
}

// E_q^F = sum q^{C(k,2)} F^k / [k]_q!  (entire; equals (-(1-q)F;q)_inf)
inline CMatrix q_exp_big(const CMatrix& f, const QContext& ctx) {
    const int n = f.dim();
    CMatrix sum = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    double qk = 1.0; // q^k
    int run = 0;
    for (int k = 0; k < ctx.max_terms; ++k) {
        // t_{k+1} = t_k * q^k (1-q) F / (1 - q^{k+1})
        term = term * f * Complex(qk * (1.0 - ctx.q) / (1.0 - qk * ctx.q));
        sum += term;
        if (term.max_abs() < ctx.series_tol * (1.0 + sum.max_abs())) {
            if (++run >= ctx.consecutive_small) return sum;
        } else {
            run = 0;
        }
        qk *= ctx.q;
    }
    throw NumericError(errc::truncation, "q_exp_big: max_terms reached");
}

// e_q^F = sum F^k / [k]_q!, valid for ||F|| < 1/(1-q); equals [((1-q)F;q)_inf]^{-1}
inline CMatrix q_exp_small(const CMatrix& f, const QContext& ctx) {
    if (two_norm(f) >= 1.0 / (1.0 - ctx.q))
        throw NumericError(errc::domain, "q_exp_small: ||F|| >= 1/(1-q)");
    const int n = f.dim();
    CMatrix sum = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    double qk = ctx.q; // q^{k+1}
    int run = 0;
    for (int k = 0; k < ctx.max_terms; ++k) {
        term = term * f * Complex((1.0 - ctx.q) / (1.0 - qk));
        sum += term;
        if (term.max_abs() < ctx.series_tol * (1.0 + sum.max_abs())) {
            if (++run >= ctx.consecutive_small) return sum;
        } else {
            run = 0;
        }
        qk *= ctx.q;
    }
    throw NumericError(errc::truncation, "q_exp_small: max_terms reached");
}

// order-fold q-derivative by the exact divided-difference table over the
// lattice z, qz, ..., q^order z. No finite-difference approximation: the
// recursion D_q g(w) = (g(w) - g(qw)) / ((1-q) w) is applied literally.
inline CMatrix q_derivative(const MatrixFunction& f, Complex z, int order,
                            const QContext& ctx) {
    if (order < 0) throw NumericError(errc::domain, "q_derivative: order must be >= 0");
    if (z == Complex(0.0))
        throw NumericError(errc::domain, "q_derivative: z = 0 is outside the lattice definition");
    std::vector<CMatrix> vals;
    vals.reserve(order + 1);
    Complex w = z;
    for (int j = 0; j <= order; ++j) { vals.push_back(f(w)); w *= ctx.q; }
    for (int level = 0; level < order; ++level) {
        Complex wj = z;
        for (size_t j = 0; j + 1 < vals.size(); ++j) {
            vals[j] = (vals[j] - vals[j + 1]) * (1.0 / ((1.0 - ctx.q) * wj));
            wj *= ctx.q;
        }
        vals.pop_back();
    }
    return vals[0];
}

// theta_{z,q} = z D_{z,q}
inline CMatrix theta_op(const MatrixFunction& f, Complex z, const QContext& ctx) {
    return q_derivative(f, z, 1, ctx) * z;
}

// Jackson integral over (0, upper): upper (1-q) sum_k q^k f(upper q^k).
// The cutoff watches the lattice weight q^k against the largest |f| seen so
// far, not the current term: integrands may vanish at isolated lattice
// points, and a term-based rule would stop inside such a gap.
inline CMatrix jackson_integral(const MatrixFunction& f, double upper,
                                const QContext& ctx) {
    if (!(upper > 0.0))
        throw NumericError(errc::domain, "jackson_integral: upper must be > 0");
    CMatrix sum;
    double qk = 1.0, fmax = 0.0;
    int run = 0;
    for (int k = 0; k < ctx.max_terms; ++k) {
        CMatrix v = f(Complex(upper * qk));
        if (!v.finite())
            throw NumericError(errc::nonfinite, "jackson_integral: non-finite lattice value");
        if (k == 0) sum = CMatrix(v.dim());
        fmax = std::max(fmax, v.max_abs());
        v *= Complex(qk);
        sum += v;
        if (qk * (1.0 + fmax) < ctx.series_tol * (1.0 + sum.max_abs())) {
            if (++run >= ctx.consecutive_small)
                return sum * Complex(upper * (1.0 - ctx.q));
        } else {
            run = 0;
        }
        qk *= ctx.q;
    }
    throw NumericError(errc::truncation, "jackson_integral: max_terms reached");
}

// q_derivative together with a running bound on the roundoff left behind by
// the table's cancellations: the same recursion applied to value norms with
// additions. Callers use the bound to recognize precision-starved samples.
struct DerivativeWithFloor {
    CMatrix value;
    double roundoff_floor;
};

// f_abs_err(w), when supplied, bounds the absolute error of evaluating f at w
// (a terminating series with large alternating coefficients can be far less
// accurate than eps times its value); the default charges 64 eps per value.
inline DerivativeWithFloor q_derivative_with_floor(
    const MatrixFunction& f, Complex z, int order, const QContext& ctx,
    const std::function<double(Complex)>& f_abs_err = nullptr) {
    if (order < 0) throw NumericError(errc::domain, "q_derivative: order must be >= 0");
    if (z == Complex(0.0))
        throw NumericError(errc::domain, "q_derivative: z = 0 is outside the lattice definition");
    std::vector<CMatrix> vals;
    std::vector<double> errs;
    vals.reserve(order + 1);
    Complex w = z;
    for (int j = 0; j <= order; ++j) {
        vals.push_back(f(w));
        double e = 64.0 * 1.11e-16 * two_norm(vals.back());
        if (f_abs_err) e = std::max(e, f_abs_err(w));
        errs.push_back(e);
        w *= ctx.q;
    }
    for (int level = 0; level < order; ++level) {
        Complex wj = z;
        for (size_t j = 0; j + 1 < vals.size(); ++j) {
            double inv = 1.0 / std::abs((1.0 - ctx.q) * wj);
            vals[j] = (vals[j] - vals[j + 1]) * (1.0 / ((1.0 - ctx.q) * wj));
            errs[j] = (errs[j] + errs[j + 1]) * inv;
            wj *= ctx.q;
        }
        vals.pop_back();
        errs.pop_back();
    }
    return {vals[0], errs[0]};
}

// Gamma_q(F) by the closed product form
//   (1-q)^{I-F} (q;q)_inf [(q^F;q)_inf]^{-1}.
// A singular infinite product signals q^{-k} in sigma(q^F).
inline CMatrix q_gamma(const CMatrix& f, const QContext& ctx) {
    const int n = f.dim();
    CMatrix pre = scalar_power(1.0 - ctx.q, CMatrix::identity(n) - f);
    Complex qq = qpoch_inf_scalar(Complex(ctx.q), ctx);
    CMatrix prod = q_poch_inf(scalar_power(ctx.q, f), ctx);
    return pre * qq * mat_inv(prod, ctx.inv_cond_limit);
}

// Gamma_q(F) by the q-integral definition; used as a cross-check oracle route.
inline CMatrix q_gamma_jackson(const CMatrix& f, const QContext& ctx) {
    const int n = f.dim();
    const double q = ctx.q;
    MatrixFunction integrand = [&](Complex t) {
        double tr = t.real();
        CMatrix tp = scalar_power(tr, f - CMatrix::identity(n));
        Complex eq = qpoch_inf_scalar(Complex(q * (1.0 - q) * tr), ctx); // E_q^{-qt}
        return tp * eq;
    };
    return jackson_integral(integrand, 1.0 / (1.0 - q), ctx);
}

// B_q(A,B) by the Gamma route Gamma(B) Gamma(A) Gamma^{-1}(A+B). The route
// presumes commuting inputs; grossly non-commuting pairs are rejected.
inline CMatrix q_beta(const CMatrix& a, const CMatrix& b, const QContext& ctx) {
    if (commutator_norm(a, b) > 1e-6 * (1.0 + two_norm(a) * two_norm(b)))
        throw NumericError(errc::domain, "q_beta: inputs do not commute");
    return q_gamma(b, ctx) * q_gamma(a, ctx) * mat_inv(q_gamma(a + b, ctx), ctx.inv_cond_limit);
}

// B_q(A,B) by the q-integral route
//   int_0^1 (tq;q)_inf [(t q^B;q)_inf]^{-1} t^{A-I} d_q t,
// exposed for cross-checking against the Gamma route.
inline CMatrix q_beta_integral(const CMatrix& a, const CMatrix& b, const QContext& ctx) {
    const int n = a.dim();
    const double q = ctx.q;
    CMatrix qb = scalar_power(q, b);
    MatrixFunction integrand = [&](Complex t) {
        double tr = t.real();
        Complex w1 = qpoch_inf_scalar(Complex(tr * q), ctx);
        CMatrix w2 = mat_inv(q_poch_inf(qb * Complex(tr), ctx), ctx.inv_cond_limit);
        CMatrix tp = scalar_power(tr, a - CMatrix::identity(n));
        return w2 * tp * w1;
    };
    return jackson_integral(integrand, 1.0, ctx);
}

} // namespace qbessel
