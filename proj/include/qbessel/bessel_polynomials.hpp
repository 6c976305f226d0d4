#pragma once

#include <array>
#include <string>

#include "hypergeometric.hpp"

namespace qbessel {

// Parameters of the q-Bessel matrix polynomial J_{n,q}(z;A): degree n >= 0,
// matrix parameter A (positive stable by construction in the samplers), and
// the governing QContext.
struct QBesselParams {
    int n;
    CMatrix A;
    QContext ctx;
};

namespace detail {

template <class Arg>
CMatrix qbmp_impl(const QBesselParams& p, const Arg& z) {
    if (p.n < 0) throw NumericError(errc::domain, "qbmp: n must be >= 0");
    const int d = p.A.dim();
    const CMatrix I = CMatrix::identity(d);
    const QContext& ctx = p.ctx;
    CMatrix pref = q_poch(scalar_power(ctx.q, p.A - I), p.n, ctx)
                   * Complex(1.0 / qfact(ctx.q, p.n));
    auto spec = HypergeometricSpec::make(
        {CMatrix::scalar(d, Complex(-p.n, 0.0)), p.A + CMatrix::scalar(d, Complex(p.n - 1, 0.0))},
        {CMatrix::zero(d)});
    return pref * phi_rs(spec, z, ctx);
}

} // namespace detail

// J_{n,q}(z;A) = ((q^{A-I};q)_n / (q;q)_n) 2phi1(q^{-nI}, q^{A+(n-1)I}; 0; q, z).
// Exact terminating polynomial of degree <= n; coefficients commute with A.
inline CMatrix qbmp(const QBesselParams& p, Complex z) { return detail::qbmp_impl(p, z); }

// Same polynomial with a commuting matrix substituted into the scalar slot.
inline CMatrix qbmp(const QBesselParams& p, const CMatrix& z) { return detail::qbmp_impl(p, z); }

// Coefficient matrices c_0..c_n with J_{n,q}(z;A) = sum c_k z^k.
inline std::vector<CMatrix> qbmp_coefficients(const QBesselParams& p) {
    const int d = p.A.dim();
    const CMatrix I = CMatrix::identity(d);
    const QContext& ctx = p.ctx;
    const double q = ctx.q;
    CMatrix pref = q_poch(scalar_power(q, p.A - I), p.n, ctx) * Complex(1.0 / qfact(q, p.n));
    CMatrix up2 = scalar_power(q, p.A + CMatrix::scalar(d, Complex(p.n - 1, 0.0)));
    std::vector<CMatrix> c;
    c.reserve(p.n + 1);
    CMatrix term = pref;
    double qk = 1.0;
    for (int k = 0;; ++k) {
        c.push_back(term);
        if (k >= p.n) break;
        double u1 = 1.0 - std::pow(q, k - p.n); // (1 - q^{k-n}) scalar factor
        term = term * (I - up2 * Complex(qk)) * Complex(u1 / (1.0 - q * qk));
        qk *= q;
    }
    return c;
}

// Absolute roundoff bound for a double-precision evaluation of J_{n,q}(w;A):
// the polynomial's term magnitudes, which near a root of J dwarf the value.
inline double qbmp_eval_error(const QBesselParams& p, double absw) {
    auto cs = qbmp_coefficients(p);
    double s = 0.0, wk = 1.0;
    for (const CMatrix& c : cs) { s += two_norm(c) * wk; wk *= absw; }
    return 64.0 * 1.11e-16 * s;
}

// Relative residual of the second-order q-difference operator
//   q^A z^2 D_q^2 + ((z(q^{-nI}+q^{A+(n-1)I}-q^{A-I}-q^A)-I)/(1-q)) D_q
//   + (I-q^{-nI})(I-q^{A+(n-1)I})/(1-q)^2
// applied to J_{n,q}(.;A) at z (exact lattice evaluations at z, qz, q^2 z).
inline double qbmp_ode_residual(const QBesselParams& p, Complex z) {
    const QContext& ctx = p.ctx;
    const int d = p.A.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    MatrixFunction f = [&](Complex w) { return qbmp(p, w); };
    CMatrix j0 = f(z);
    CMatrix d1 = q_derivative(f, z, 1, ctx);
    CMatrix d2 = q_derivative(f, z, 2, ctx);
    CMatrix qa = scalar_power(q, p.A);
    CMatrix qa1 = qa * Complex(std::pow(q, p.n - 1)); // q^{A+(n-1)I}
    CMatrix qam1 = qa * Complex(1.0 / q);             // q^{A-I}
    CMatrix coef1 = (I * Complex(std::pow(q, -p.n)) + qa1 - qam1 - qa) * z - I;
    CMatrix pot = (I - I * Complex(std::pow(q, -p.n))) * (I - qa1)
                  * Complex(1.0 / ((1.0 - q) * (1.0 - q)));
    CMatrix L = qa * (z * z) * d2 + coef1 * Complex(1.0 / (1.0 - q)) * d1 + pot * j0;
    return two_norm(L) / (1.0 + two_norm(j0));
}

// Closed form of the r-fold q-derivative,
//   D_q^r J_{n,q}(z;A) = ((q^{A-I};q)_{2r} / (q-1)^r) q^{C(r,2)-nr} J_{n-r,q}(z;A+2rI).
inline CMatrix qbmp_qderiv_closed(const QBesselParams& p, Complex z, int r) {
    if (r < 0 || r > p.n)
        throw NumericError(errc::domain, "qbmp_qderiv_closed: need 0 <= r <= n");
    if (r == 0) return qbmp(p, z);
    const int d = p.A.dim();
    const QContext& ctx = p.ctx;
    const double q = ctx.q;
    CMatrix poch = q_poch(scalar_power(q, p.A - CMatrix::identity(d)), 2 * r, ctx);
    double denom = 1.0;
    for (int i = 0; i < r; ++i) denom *= (q - 1.0);
    double qs = std::pow(q, r * (r - 1) / 2 - p.n * r);
    QBesselParams pr{p.n - r, p.A + CMatrix::scalar(d, Complex(2 * r, 0.0)), ctx};
    return poch * Complex(qs / denom) * qbmp(pr, z);
}

// Right side of the product formula for J_{n,q}(alpha z;A) J_{m,q}(beta z;A).
// The inner series carries the (-1)^l q^C(l,2) balancing factor, and the
// scalar ratio (q^{-n};q)_k / (q^{(1-k+n)};q)_l is taken in the
// eps-regularized sense (it is 0/0 for k > n as written). The outer sum stops
// at k = n+m; the k = n+m+1 term must vanish structurally and is checked.
inline CMatrix qbmp_product_rhs(int n, int m, const CMatrix& a, Complex alpha,
                                Complex beta, Complex z, const QContext& ctx) {
    if (alpha == Complex(0.0))
        throw NumericError(errc::domain, "qbmp_product_rhs: alpha must be nonzero");
    const int d = a.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    CMatrix qa = scalar_power(q, a);

    CMatrix prefs = q_poch(qa * Complex(1.0 / q), n, ctx) * q_poch(qa * Complex(1.0 / q), m, ctx)
                    * Complex(1.0 / (qfact(q, n) * qfact(q, m)));
    CMatrix qam1 = qa * Complex(std::pow(q, m - 1)); // q^{A+(m-1)I}
    CMatrix qan1 = qa * Complex(std::pow(q, n - 1)); // q^{A+(n-1)I}
    CMatrix inv_qa = mat_inv(qa, ctx.inv_cond_limit);

    auto k_term = [&](int k) {
        // inner sum over l
        CMatrix w = inv_qa * Complex(std::pow(q, 3 - k)) * (beta / alpha); // (beta/alpha) q^{(3-k)I-A}
        CMatrix lower2 = inv_qa * Complex(std::pow(q, 2 - k - n));         // q^{(2-k-n)I-A}
        CMatrix inner(d);
        CMatrix wl = I;                                                    // w^l
        CMatrix lowpoch = I;                                               // (q^{(2-k-n)I-A};q)_l
        for (int l = 0; l <= std::min(m, k); ++l) {
            double R;
            try {
                R = poch_ratio_eps_limit({{-n, k, +1}}, {{1 - k + n, l, -1}}, q);
            } catch (const NumericError&) {
                throw NumericError(errc::singular,
                                   "qbmp_product_rhs: singular lower Pochhammer at (k,l)=(" +
                                       std::to_string(k) + "," + std::to_string(l) + ")");
            }
            double sc = (qpoch_scalar(Complex(std::pow(q, -m)), q, l) *
                         qpoch_scalar(Complex(std::pow(q, -k)), q, l))
                            .real() /
                        qfact(q, l);
            double bal = ((l % 2) ? -1.0 : 1.0) * std::pow(q, l * (l - 1) / 2);
            inner += q_poch(qam1, l, ctx) * mat_inv(lowpoch, ctx.inv_cond_limit) * wl *
                     Complex(R * sc * bal);
            lowpoch = lowpoch * (I - lower2 * Complex(std::pow(q, l)));
            wl = wl * w;
        }
        return q_poch(qan1, k, ctx) * Complex(1.0 / qfact(q, k)) *
               std::pow(alpha * z, k) * inner;
    };

    CMatrix tot(d);
    for (int k = 0; k <= n + m; ++k) tot += k_term(k);
    CMatrix tail = k_term(n + m + 1);
    if (tail.max_abs() > 1e-15 * (1.0 + tot.max_abs()))
        throw NumericError(errc::truncation,
                           "qbmp_product_rhs: outer tail does not vanish at k = n+m+1");
    return prefs * tot;
}

// Jackson-lattice evaluation of the integral representation
//   J_{n,q}(z;A) = ((1-q)^n Gamma_q^{-1}(A-I) / (q;q)_n)
//                  int_0^{1/(1-q)} t^{A+(n-2)I} E_q^{-qt} 1phi0(q^{-nI};-;q,(1-q)tz) d_q t.
inline CMatrix qbmp_integral_rep(const QBesselParams& p, Complex z) {
    const QContext& ctx = p.ctx;
    const int d = p.A.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    CMatrix ginv = mat_inv(q_gamma(p.A - I, ctx), ctx.inv_cond_limit);
    const int n = p.n;
    MatrixFunction integrand = [&](Complex t) {
        double tr = t.real();
        Complex phi10(0.0);
        Complex term(1.0);
        Complex w = (1.0 - q) * tr * z;
        for (int r = 0;; ++r) {
            phi10 += term;
            if (r >= n) break;
            term *= (1.0 - std::pow(q, r - n)) / (1.0 - std::pow(q, r + 1)) * w;
        }
        Complex eq = qpoch_inf_scalar(Complex(q * (1.0 - q) * tr), ctx); // E_q^{-qt}
        return scalar_power(tr, p.A + CMatrix::scalar(d, Complex(n - 2, 0.0))) * (eq * phi10);
    };
    CMatrix integral = jackson_integral(integrand, 1.0 / (1.0 - q), ctx);
    return ginv * integral * Complex(std::pow(1.0 - q, n) / qfact(q, n));
}

enum class BetaVariant { plain, shifted };

struct QBetaIntegralPair {
    CMatrix lhs; // Jackson-integral left side
    CMatrix rhs; // 3phi2 closed-form right side
};

// Both sides of the q-Beta-type integral identities: the weight
// (1-qt)^{B-I} is the q-binomial (tq;q)_inf [(t q^B;q)_inf]^{-1}, and the
// shifted variant substitutes the commuting matrix (I - q^B t) z into the
// polynomial's scalar slot.
inline QBetaIntegralPair qbmp_beta_integral(int n, const CMatrix& a, const CMatrix& b,
                                            BetaVariant variant, Complex z,
                                            const QContext& ctx) {
    const int d = a.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    CMatrix qb = scalar_power(q, b);
    QBesselParams pol{n, a - I, ctx};
    MatrixFunction integrand = [&](Complex t) {
        double tr = t.real();
        Complex w1 = qpoch_inf_scalar(Complex(tr * q), ctx);
        CMatrix w2 = mat_inv(q_poch_inf(qb * Complex(tr), ctx), ctx.inv_cond_limit);
        CMatrix tp = scalar_power(tr, a - I);
        CMatrix jv;
        if (variant == BetaVariant::plain) {
            jv = qbmp(pol, tr * z);
        } else {
            CMatrix arg = (I - qb * Complex(tr)) * z;
            jv = qbmp(pol, arg);
        }
        return tp * w2 * (w1 * jv);
    };
    QBetaIntegralPair out;
    out.lhs = jackson_integral(integrand, 1.0, ctx) * Complex(1.0 / (1.0 - q));

    const CMatrix second = (variant == BetaVariant::plain) ? a : b;
    auto spec = HypergeometricSpec::make(
        {CMatrix::scalar(d, Complex(-n, 0.0)), second, a + CMatrix::scalar(d, Complex(n - 2, 0.0))},
        {a + b, CMatrix::zero(d)});
    Complex qq = qpoch_inf_scalar(Complex(q), ctx);
    CMatrix pre = q_poch_inf(scalar_power(q, a + b), ctx) *
                  mat_inv(q_poch_inf(scalar_power(q, a), ctx), ctx.inv_cond_limit) *
                  mat_inv(q_poch_inf(qb, ctx), ctx.inv_cond_limit) *
                  q_poch(scalar_power(q, a - 2.0 * I), n, ctx) *
                  Complex(qq / qfact(q, n));
    out.rhs = pre * phi_rs(spec, z, ctx);
    return out;
}

struct RecurrenceCoeffs {
    CMatrix c1, c2, c3;
    double fit_residual;   // residual of the fitted relation at the holdout z = 0.77
    // max deviation of the coefficient tuple against the refit triple, on the
    // tuple's own scale (the components span many orders of magnitude; each
    // contributes to the relation in proportion to its size)
    double z_consistency;
};

namespace detail {

// Small dense complex LU with partial pivoting; returns false on an exact
// zero pivot. Used on the flattened recurrence fit systems (order <= 12).
inline bool lu_factor(std::vector<Complex>& a, std::vector<int>& piv, int n) {
    piv.resize(n);
    for (int col = 0; col < n; ++col) {
        int p = col;
        double best = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (v > best) { best = v; p = r; }
        }
        if (best == 0.0) return false;
        piv[col] = p;
        if (p != col)
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<size_t>(p) * n + j], a[static_cast<size_t>(col) * n + j]);
        const Complex d = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            Complex f = a[static_cast<size_t>(r) * n + col] / d;
            a[static_cast<size_t>(r) * n + col] = f;
            if (f == Complex(0.0)) continue;
            for (int j = col + 1; j < n; ++j)
                a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
        }
    }
    return true;
}

inline void lu_solve_vec(const std::vector<Complex>& lu, const std::vector<int>& piv, int n,
                         std::vector<Complex>& b) {
    for (int col = 0; col < n; ++col)
        if (piv[col] != col) std::swap(b[static_cast<size_t>(piv[col])], b[static_cast<size_t>(col)]);
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < r; ++c) b[static_cast<size_t>(r)] -= lu[static_cast<size_t>(r) * n + c] * b[static_cast<size_t>(c)];
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) b[static_cast<size_t>(r)] -= lu[static_cast<size_t>(r) * n + c] * b[static_cast<size_t>(c)];
        b[static_cast<size_t>(r)] /= lu[static_cast<size_t>(r) * n + r];
    }
}

struct RecurrenceFit {
    std::array<CMatrix, 3> c{};
    double cond = 1e300; // raw (unequilibrated) condition estimate
};

// Fits the three coefficient matrices from one z-triple. Every row of the
// unknowns satisfies the same (3 dim x 3 dim) scalar system
//   sum_c K[(i,b),(slot,c)] X[slot](a,c) = J_{n+1}(z_i)(a,b),
// so one LU factorization serves all rows, and its condition estimate tells
// whether the triple landed near a root of one of the polynomials.
inline RecurrenceFit fit_recurrence(int n, const CMatrix& a, const QContext& ctx,
                                    const std::array<double, 3>& zs) {
    const int d = a.dim();
    const int N = 3 * d;
    QBesselParams pn{n, a, ctx}, pnm{n - 1, a, ctx}, pnp{n + 1, a, ctx};
    std::array<std::array<CMatrix, 3>, 3> blocks; // blocks[i][slot]
    std::array<CMatrix, 3> rhs;
    for (int i = 0; i < 3; ++i) {
        Complex z(zs[i]);
        CMatrix jn = qbmp(pn, z);
        blocks[i][0] = jn;
        blocks[i][1] = jn * z;
        blocks[i][2] = -qbmp(pnm, z);
        rhs[i] = qbmp(pnp, z);
    }
    // K[(i,b),(slot,c)] = blocks[i][slot](c,b)
    std::vector<Complex> K(static_cast<size_t>(N) * N);
    for (int i = 0; i < 3; ++i)
        for (int b = 0; b < d; ++b)
            for (int slot = 0; slot < 3; ++slot)
                for (int c = 0; c < d; ++c)
                    K[static_cast<size_t>(i * d + b) * N + (slot * d + c)] =
                        blocks[i][slot].at(c, b);

    // raw condition estimate, before any scaling: a z sample near a common
    // root of the polynomials shows up here (equilibration would mask it,
    // because rescaling a garbage row makes the matrix look healthy while the
    // row's data accuracy stays ruined)
    RecurrenceFit out;
    {
        std::vector<Complex> raw = K;
        std::vector<int> rpiv;
        double knorm = 0.0, invnorm = 0.0;
        for (const Complex& v : raw) knorm = std::max(knorm, std::abs(v));
        if (!lu_factor(raw, rpiv, N)) return out;
        for (int c = 0; c < N; ++c) {
            std::vector<Complex> e(static_cast<size_t>(N), Complex(0.0));
            e[static_cast<size_t>(c)] = 1.0;
            lu_solve_vec(raw, rpiv, N, e);
            for (const Complex& v : e) invnorm = std::max(invnorm, std::abs(v));
        }
        out.cond = knorm * invnorm * N;
    }

    std::vector<double> rs(N, 0.0), cs(N, 0.0);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) rs[r] = std::max(rs[r], std::abs(K[static_cast<size_t>(r) * N + c]));
    for (int r = 0; r < N; ++r) {
        if (rs[r] == 0.0) rs[r] = 1.0;
        for (int c = 0; c < N; ++c) K[static_cast<size_t>(r) * N + c] /= rs[r];
    }
    for (int c = 0; c < N; ++c) {
        for (int r = 0; r < N; ++r) cs[c] = std::max(cs[c], std::abs(K[static_cast<size_t>(r) * N + c]));
        if (cs[c] == 0.0) cs[c] = 1.0;
        for (int r = 0; r < N; ++r) K[static_cast<size_t>(r) * N + c] /= cs[c];
    }

    std::vector<Complex> lu = K;
    std::vector<int> piv;
    if (!lu_factor(lu, piv, N)) { out.cond = 1e300; return out; }

    for (int slot = 0; slot < 3; ++slot) out.c[slot] = CMatrix(d);
    for (int arow = 0; arow < d; ++arow) {
        std::vector<Complex> b(static_cast<size_t>(N));
        for (int i = 0; i < 3; ++i)
            for (int bb = 0; bb < d; ++bb)
                b[static_cast<size_t>(i * d + bb)] = rhs[i].at(arow, bb) / rs[static_cast<size_t>(i * d + bb)];
        lu_solve_vec(lu, piv, N, b);
        for (int slot = 0; slot < 3; ++slot)
            for (int c = 0; c < d; ++c)
                out.c[slot].at(arow, c) = b[static_cast<size_t>(slot * d + c)] / cs[static_cast<size_t>(slot * d + c)];
    }
    return out;
}

} // namespace detail

// Fits C1, C2, C3 in J_{n+1,q}(z;A) = C1 J_{n,q} + C2 z J_{n,q} - C3 J_{n-1,q}
// from three z values, refits at a second triple, and reports the
// consistency between the two fits plus a holdout-point residual. The default
// z-triples step to alternates when a sample lands near a root of one of the
// polynomials (detected through the fit system's condition estimate); a
// singular-system error is raised only when every candidate stays
// ill-conditioned beyond 1e10.
inline RecurrenceCoeffs recurrence_coeffs(int n, const CMatrix& a, const QContext& ctx) {
    if (n < 1) throw NumericError(errc::domain, "recurrence_coeffs: n must be >= 1");
    static const std::array<std::array<double, 3>, 3> first{{{0.1, 0.2, 0.4},
                                                             {0.12, 0.26, 0.44},
                                                             {0.09, 0.21, 0.41}}};
    static const std::array<std::array<double, 3>, 3> second{{{0.15, 0.3, 0.6},
                                                              {0.18, 0.34, 0.52},
                                                              {0.14, 0.31, 0.57}}};
    QBesselParams pn{n, a, ctx}, pnm{n - 1, a, ctx}, pnp{n + 1, a, ctx};
    // taint score of a triple: worst evaluation-error-to-value ratio among
    // the nine polynomial samples feeding the system
    auto taint = [&](const std::array<double, 3>& zs) {
        double t = 0.0;
        for (double z : zs)
            for (const QBesselParams* pp : {&pnm, &pn, &pnp}) {
                double err = qbmp_eval_error(*pp, z);
                double val = two_norm(qbmp(*pp, Complex(z)));
                t = std::max(t, err / (1.0 + val));
            }
        return t;
    };
    detail::RecurrenceFit f1, f2;
    bool found = false;
    size_t best_k = 0;
    double best = 1e300;
    for (size_t k = 0; k < first.size(); ++k) {
        double t = std::max(taint(first[k]), taint(second[k]));
        if (t <= 1e-12) {
            f1 = detail::fit_recurrence(n, a, ctx, first[k]);
            f2 = detail::fit_recurrence(n, a, ctx, second[k]);
            if (std::max(f1.cond, f2.cond) <= 1e10) { found = true; break; }
        }
        if (t < best) { best = t; best_k = k; }
    }
    if (!found) {
        f1 = detail::fit_recurrence(n, a, ctx, first[best_k]);
        f2 = detail::fit_recurrence(n, a, ctx, second[best_k]);
        if (std::max(f1.cond, f2.cond) > 1e10)
            throw NumericError(errc::singular,
                               "recurrence_coeffs: three-point fit system ill-conditioned (> 1e10)");
    }

    RecurrenceCoeffs out;
    out.c1 = f1.c[0]; out.c2 = f1.c[1]; out.c3 = f1.c[2];
    double scale = 0.0, dev = 0.0;
    for (int i = 0; i < 3; ++i) {
        scale = std::max(scale, two_norm(f1.c[i]));
        dev = std::max(dev, two_norm(f1.c[i] - f2.c[i]));
    }
    out.z_consistency = dev / (1.0 + scale);
    const Complex zh(0.77);
    CMatrix lhs = qbmp(pnp, zh);
    CMatrix t1 = out.c1 * qbmp(pn, zh);
    CMatrix t2 = out.c2 * zh * qbmp(pn, zh);
    CMatrix t3 = out.c3 * qbmp(pnm, zh);
    CMatrix rhs = t1 + t2 - t3;
    // residual on the scale of the evaluation, so a holdout landing near a
    // root of the combination does not masquerade as a failed relation
    double hscale = std::max(std::max(two_norm(t1), two_norm(t2)),
                             std::max(two_norm(t3), two_norm(lhs)));
    out.fit_residual = two_norm(lhs - rhs) / (1.0 + hscale);
    return out;
}

} // namespace qbessel
