#pragma once

#include <optional>

#include "bessel_polynomials.hpp"

namespace qbessel {

// Matrix-valued function sampled on the q-lattices {q^r/s} and {q^r}. The
// argument is complex because the q-Laplace lattice is q^r/s; on the default
// grids everything stays real.
using ScalarLatticeFunction = std::function<CMatrix(Complex)>;

// L_{s,q}[f] = ((q;q)_inf / s) sum_r q^r/(q;q)_r f(q^r/s), Re(s) > 0.
inline CMatrix q_laplace(const ScalarLatticeFunction& f, Complex s, const QContext& ctx) {
    if (!(s.real() > 0.0))
        throw NumericError(errc::domain, "q_laplace: Re(s) must be > 0");
    const double q = ctx.q;
    CMatrix sum;
    double qr = 1.0, fact = 1.0, fmax = 0.0;
    int run = 0;
    for (int r = 0; r < ctx.max_terms; ++r) {
        CMatrix v = f(Complex(qr) / s);
        if (!v.finite())
            throw NumericError(errc::nonfinite, "q_laplace: non-finite lattice value");
        if (r == 0) sum = CMatrix(v.dim());
        fmax = std::max(fmax, v.max_abs());
        v *= Complex(qr / fact);
        sum += v;
        // cap on the lattice weight, with the boundedness of f checked as we go
        if ((qr / fact) * (1.0 + fmax) < ctx.series_tol * (1.0 + sum.max_abs())) {
            if (++run >= ctx.consecutive_small)
                return sum * (qpoch_inf_scalar(Complex(q), ctx) / s);
        } else {
            run = 0;
        }
        qr *= q;
        fact *= (1.0 - std::pow(q, r + 1));
    }
    throw NumericError(errc::truncation, "q_laplace: max_terms reached");
}

// M_q[f; s] = (1-q) sum_r q^{sr} f(q^r), s > 0.
inline CMatrix q_mellin(const ScalarLatticeFunction& f, double s, const QContext& ctx) {
    if (!(s > 0.0)) throw NumericError(errc::domain, "q_mellin: s must be > 0");
    const double q = ctx.q;
    const double w = std::pow(q, s);
    CMatrix sum;
    double wr = 1.0, fmax = 0.0;
    int run = 0;
    for (int r = 0; r < ctx.max_terms; ++r) {
        CMatrix v = f(Complex(std::pow(q, r)));
        if (!v.finite())
            throw NumericError(errc::nonfinite, "q_mellin: non-finite lattice value");
        if (r == 0) sum = CMatrix(v.dim());
        fmax = std::max(fmax, v.max_abs());
        v *= Complex(wr);
        sum += v;
        if (wr * (1.0 + fmax) < ctx.series_tol * (1.0 + sum.max_abs())) {
            if (++run >= ctx.consecutive_small) return sum * Complex(1.0 - q);
        } else {
            run = 0;
        }
        wr *= w;
    }
    throw NumericError(errc::truncation, "q_mellin: max_terms reached");
}

// Closed form of the q-Laplace transform of J_{n,q}(t;A) (plain, m absent) or
// of t^{m-1} J_{n,q}(t;A) (weighted).
inline CMatrix qbmp_laplace_closed(int n, const CMatrix& a, Complex s,
                                   std::optional<int> m, const QContext& ctx) {
    const int d = a.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    CMatrix negn = CMatrix::scalar(d, Complex(-n, 0.0));
    CMatrix up2 = a + CMatrix::scalar(d, Complex(n - 1, 0.0));
    CMatrix pref = q_poch(scalar_power(q, a - I), n, ctx) * Complex(1.0 / qfact(q, n));
    if (!m) {
        auto spec = HypergeometricSpec::make({negn, up2, I}, {CMatrix::zero(d), CMatrix::zero(d)});
        return pref * phi_rs(spec, Complex(1.0) / s, ctx) * (Complex(1.0) / s);
    }
    if (*m < 1) throw NumericError(errc::domain, "qbmp_laplace_closed: m must be >= 1");
    auto spec = HypergeometricSpec::make(
        {negn, up2, CMatrix::scalar(d, Complex(*m, 0.0))}, {CMatrix::zero(d), CMatrix::zero(d)});
    Complex qq = qpoch_inf_scalar(Complex(q), ctx);
    Complex qm = qpoch_inf_scalar(Complex(std::pow(q, *m)), ctx);
    if (std::abs(qm) == 0.0)
        throw NumericError(errc::singular, "qbmp_laplace_closed: (q^m;q)_inf vanished");
    return pref * phi_rs(spec, Complex(1.0) / s, ctx) * (qq / (qm * std::pow(s, *m)));
}

struct MellinClosedPair {
    CMatrix printed; // the closed form exactly as stated (audited, not asserted)
    CMatrix direct;  // coefficient route: sum_k c_k (1-q)/(1-q^{s+k})
};

// Returns both routes for the q-Mellin transform of J_{n,q}(.;A); the pair is
// reported and adjudicated by the harness, never asserted equal.
inline MellinClosedPair qbmp_mellin_closed(int n, const CMatrix& a, double s,
                                           const QContext& ctx) {
    if (n < 1) throw NumericError(errc::domain, "qbmp_mellin_closed: n must be >= 1");
    const int d = a.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    MellinClosedPair out;
    auto spec = HypergeometricSpec::make(
        {CMatrix::scalar(d, Complex(-n, 0.0)), a + CMatrix::scalar(d, Complex(n - 1, 0.0)),
         CMatrix::scalar(d, Complex(s, 0.0))},
        {CMatrix::zero(d), CMatrix::zero(d)});
    Complex qs = qpoch_inf_scalar(Complex(std::pow(q, s)), ctx);
    out.printed = q_poch(scalar_power(q, a - I), n, ctx) *
                  phi_rs(spec, Complex(1.0), ctx) * Complex(1.0 / (qs.real() * qfact(q, n - 1)));

    QBesselParams p{n, a, ctx};
    std::vector<CMatrix> c = qbmp_coefficients(p);
    CMatrix direct(d);
    for (int k = 0; k <= n; ++k)
        direct += c[k] * Complex((1.0 - q) / (1.0 - std::pow(q, s + k)));
    out.direct = direct;
    return out;
}

// ---- q-Horn double series -------------------------------------------------

struct HornParams {
    CMatrix A, B, E; // B participates in Phi1 only
    Complex x, y;
};

namespace detail {

// Rectangular double-series evaluation: grow the window geometrically until
// the boundary row/column falls below tolerance (terms are not monotone along
// diagonals, so a plain diagonal cutoff is not safe).
template <class TermFn>
CMatrix horn_sum(int dim, const TermFn& term, const QContext& ctx, double y_cap,
                 double xmod, double ymod, double xlimit) {
    if (!(xmod < xlimit))
        throw NumericError(errc::domain, "horn: |x| outside the convergence region");
    if (!(ymod <= y_cap))
        throw NumericError(errc::domain, "horn: |y| above the configured summability cap");
    int T = 8;
    for (;;) {
        CMatrix sum(dim);
        double boundary = 0.0;
        for (int tau = 0; tau < T; ++tau)
            for (int ups = 0; ups < T; ++ups) {
                CMatrix t = term(tau, ups);
                sum += t;
                if (tau == T - 1 || ups == T - 1)
                    boundary = std::max(boundary, t.max_abs());
            }
        if (boundary < ctx.series_tol * (1.0 + sum.max_abs())) return sum;
        T *= 2;
        if (T > ctx.max_terms || T > 4096)
            throw NumericError(errc::truncation, "horn: window growth exceeded max_terms");
    }
}

} // namespace detail

// Phi1(q^A, q^B; q^E; x, y) = sum (q^A;q)_{tau+ups} (q^B;q)_tau [(q^E;q)_{tau+ups}]^{-1}
//                                 / ((q;q)_tau (q;q)_ups) x^tau y^ups,  |x| < 1.
inline CMatrix horn_phi1(const HornParams& p, const QContext& ctx, double y_cap = 2.0) {
    const int d = p.A.dim();
    const double q = ctx.q;
    CMatrix qa = scalar_power(q, p.A), qb = scalar_power(q, p.B), qe = scalar_power(q, p.E);
    const int NMAX = 4200;
    std::vector<CMatrix> pa(1, CMatrix::identity(d)), pe_inv(1, CMatrix::identity(d));
    std::vector<CMatrix> pb(1, CMatrix::identity(d));
    auto extend = [&](int upto) {
        const CMatrix I = CMatrix::identity(d);
        while (static_cast<int>(pa.size()) <= upto) {
            int k = static_cast<int>(pa.size()) - 1;
            pa.push_back(pa.back() * (I - qa * Complex(std::pow(q, k))));
            pe_inv.push_back(pe_inv.back() *
                             mat_inv(I - qe * Complex(std::pow(q, k)), ctx.inv_cond_limit));
            pb.push_back(pb.back() * (I - qb * Complex(std::pow(q, k))));
        }
    };
    auto term = [&](int tau, int ups) {
        extend(std::min(tau + ups + 1, NMAX));
        return pa[tau + ups] * pe_inv[tau + ups] * pb[tau] *
               (std::pow(p.x, tau) * std::pow(p.y, ups) /
                Complex(qfact(q, tau) * qfact(q, ups)));
    };
    return detail::horn_sum(d, term, ctx, y_cap, std::abs(p.x), std::abs(p.y), 1.0);
}

// H6(q^A; q^E; x, y) = sum (q^A;q)_{2tau+ups} [(q^E;q)_{tau+ups}]^{-1}
//                          / ((q;q)_tau (q;q)_ups) x^tau y^ups,  |x| < 1/4.
inline CMatrix horn_h6(const CMatrix& a, const CMatrix& e, Complex x, Complex y,
                       const QContext& ctx, double y_cap = 2.0) {
    const int d = a.dim();
    const double q = ctx.q;
    CMatrix qa = scalar_power(q, a), qe = scalar_power(q, e);
    std::vector<CMatrix> pa(1, CMatrix::identity(d)), pe_inv(1, CMatrix::identity(d));
    auto extend = [&](int upto) {
        const CMatrix I = CMatrix::identity(d);
        while (static_cast<int>(pa.size()) <= upto) {
            int k = static_cast<int>(pa.size()) - 1;
            pa.push_back(pa.back() * (I - qa * Complex(std::pow(q, k))));
            pe_inv.push_back(pe_inv.back() *
                             mat_inv(I - qe * Complex(std::pow(q, k)), ctx.inv_cond_limit));
        }
    };
    auto term = [&](int tau, int ups) {
        extend(2 * tau + ups + 1);
        return pa[2 * tau + ups] * pe_inv[tau + ups] *
               (std::pow(x, tau) * std::pow(y, ups) /
                Complex(qfact(q, tau) * qfact(q, ups)));
    };
    return detail::horn_sum(d, term, ctx, y_cap, std::abs(x), std::abs(y), 0.25);
}

// ---- connection right-hand sides -----------------------------------------

enum class HornConnectionId { eq248, eq249, eq251, eq252 };

namespace detail {

// Outer-series accumulator for the connection sums. Convergent series stop by
// the usual consecutive-small rule; divergent tails (eq2.51/eq2.52 as stated)
// are cut at the smallest term so the audit still yields a deterministic,
// conclusive value to dump next to the left side.
class OuterSum {
  public:
    OuterSum(int dim, const QContext& ctx) : sum_(dim), ctx_(ctx) {}
    // returns false when accumulation should stop
    bool add(const CMatrix& term) {
        double tn = term.max_abs();
        if (count_ >= 4 && tn > prev_ && tn > 10.0 * min_seen_) {
            diverged_ = true;
            return false; // smallest-term cut: do not absorb the growing tail
        }
        sum_ += term;
        prev_ = tn;
        min_seen_ = std::min(min_seen_, tn);
        ++count_;
        if (tn < ctx_.series_tol * (1.0 + sum_.max_abs())) {
            if (++small_run_ >= ctx_.consecutive_small) return false;
        } else {
            small_run_ = 0;
        }
        return count_ < ctx_.max_terms;
    }
    const CMatrix& value() const { return sum_; }
    bool diverged() const { return diverged_; }
    bool exhausted() const { return count_ >= ctx_.max_terms; }

  private:
    CMatrix sum_;
    const QContext& ctx_;
    int count_ = 0, small_run_ = 0;
    double prev_ = 0.0, min_seen_ = 1e300;
    bool diverged_ = false;
};

} // namespace detail

struct HornConnectionResult {
    CMatrix value;
    bool divergent_tail = false; // the stated series had to be cut at its smallest term
};

// Right-hand sides of the Horn connection formulas. reading = 0 is the form
// the registry checks; reading = 1 is the alternate reading kept for the
// audit record (printed sign for eq248/eq249, swapped J arguments for eq251/eq252).
inline HornConnectionResult horn_connection_rhs(HornConnectionId id, const HornParams& p,
                                                const QContext& ctx, int reading = 0) {
    const int d = p.A.dim();
    const CMatrix I = CMatrix::identity(d);
    const double q = ctx.q;
    const Complex x = p.x, y = p.y;
    HornConnectionResult out;
    detail::OuterSum acc(d, ctx);

    switch (id) {
    case HornConnectionId::eq248: {
        if (x == Complex(0.0))
            throw NumericError(errc::domain, "eq248: x must be nonzero");
        CMatrix qa = scalar_power(q, p.A), qe = scalar_power(q, p.E);
        CMatrix inv_qa = mat_inv(qa, ctx.inv_cond_limit);
        const double sg = (reading == 0) ? -1.0 : 1.0; // implemented form negates the argument
        CMatrix poch2m = I, pochem = I;
        for (int m = 0;; ++m) {
            // inner 2phi1(q^{-mI}, 0; q^{(1-2m)I-A}; q, sg q^{(1-m)I-A}/x), terminating at m
            CMatrix low = inv_qa * Complex(std::pow(q, 1 - 2 * m));
            CMatrix w = inv_qa * Complex(std::pow(q, 1 - m) * sg) * (Complex(1.0) / x);
            BasicSeries inner;
            inner.upper_args = {CMatrix::scalar(d, Complex(std::pow(q, -m), 0.0)), CMatrix::zero(d)};
            inner.lower_args = {low};
            inner.terminating_order = m;
            CMatrix ph = evaluate_series(inner, w, ctx);
            double sgn = (m % 2) ? -1.0 : 1.0;
            CMatrix term = poch2m * mat_inv(pochem, ctx.inv_cond_limit) * ph *
                           (std::pow(x, m) * std::pow(y, m) * Complex(sgn / qfact(q, m)));
            if (!acc.add(term)) break;
            poch2m = poch2m * (I - qa * Complex(std::pow(q, 2 * m))) *
                     (I - qa * Complex(std::pow(q, 2 * m + 1)));
            pochem = pochem * (I - qe * Complex(std::pow(q, m)));
        }
        break;
    }
    case HornConnectionId::eq249: {
        CMatrix qa = scalar_power(q, p.A), qb = scalar_power(q, p.B), qe = scalar_power(q, p.E);
        const double sg = (reading == 0) ? -1.0 : 1.0;
        CMatrix pochan = I, pochen = I;
        for (int n = 0;; ++n) {
            BasicSeries inner; // 2phi0 with balancing exponent -1, terminating at n
            inner.upper_args = {CMatrix::scalar(d, Complex(std::pow(q, -n), 0.0)), qb};
            inner.balancing_exponent = -1;
            inner.terminating_order = n;
            CMatrix ph = evaluate_series(inner, Complex(sg * std::pow(q, n)) * x, ctx);
            CMatrix term = pochan * mat_inv(pochen, ctx.inv_cond_limit) * ph *
                           (std::pow(y, n) / Complex(qfact(q, n)));
            if (!acc.add(term)) break;
            pochan = pochan * (I - qa * Complex(std::pow(q, n)));
            pochen = pochen * (I - qe * Complex(std::pow(q, n)));
        }
        break;
    }
    case HornConnectionId::eq251: {
        CMatrix qe = scalar_power(q, p.E);
        CMatrix qa = scalar_power(q, p.A);
        CMatrix pochen = I, pochan = I;
        for (int n = 0;; ++n) {
            CMatrix term;
            if (reading == 0) {
                QBesselParams pj{n, p.A + I, ctx};
                term = mat_inv(pochen, ctx.inv_cond_limit) * qbmp(pj, x) *
                       (std::pow(y, n) * Complex(std::pow(q, -(n * (n - 1) / 2))));
            } else {
                // proof-step reading: inner sum at argument -x q^n
                BasicSeries inner;
                inner.upper_args = {CMatrix::scalar(d, Complex(std::pow(q, -n), 0.0)),
                                    qa * Complex(std::pow(q, n))};
                inner.lower_args = {CMatrix::zero(d)};
                inner.terminating_order = n;
                CMatrix ph = evaluate_series(inner, -x * Complex(std::pow(q, n)), ctx);
                term = pochan * mat_inv(pochen, ctx.inv_cond_limit) * ph *
                       (std::pow(y, n) *
                        Complex(std::pow(q, -(n * (n - 1) / 2)) / qfact(q, n)));
            }
            if (!acc.add(term)) break;
            pochen = pochen * (I - qe * Complex(std::pow(q, n)));
            pochan = pochan * (I - qa * Complex(std::pow(q, n)));
        }
        break;
    }
    case HornConnectionId::eq252: {
        if (x == Complex(0.0))
            throw NumericError(errc::domain, "eq252: x must be nonzero");
        CMatrix qa = scalar_power(q, p.A), qb = scalar_power(q, p.B), qe = scalar_power(q, p.E);
        CMatrix inv_qb = mat_inv(qb, ctx.inv_cond_limit);
        CMatrix pocham = I, pochbm = I, pochem = I;
        for (int m = 0;; ++m) {
            CMatrix low = inv_qb * Complex(std::pow(q, 1 - 2 * m)); // q^{(1-2m)I-B}
            CMatrix zarg = inv_qb * Complex(q) * (y / x);           // q^{I-B} y / x
            CMatrix aparam = 2.0 * (1.0 - m) * I - p.B;             // 2(1-m)I - B
            CMatrix jv;
            if (reading == 0) {
                // as stated: first slot is the parameter, second the argument
                QBesselParams pj{m, aparam, ctx};
                jv = qbmp(pj, zarg);
            } else {
                // swapped reading: J_m(.; zarg-as-parameter) at scalar-matrix argument aparam
                QBesselParams pj{m, zarg, ctx};
                jv = qbmp(pj, aparam);
            }
            double sgn = (m % 2) ? -1.0 : 1.0;
            CMatrix term = pocham * pochbm * mat_inv(pochem, ctx.inv_cond_limit) *
                           mat_inv(q_poch(low, m, ctx), ctx.inv_cond_limit) * jv *
                           (std::pow(x, m) * Complex(sgn));
            if (!acc.add(term)) break;
            pocham = pocham * (I - qa * Complex(std::pow(q, m)));
            pochbm = pochbm * (I - qb * Complex(std::pow(q, m)));
            pochem = pochem * (I - qe * Complex(std::pow(q, m)));
        }
        break;
    }
    }
    if (acc.exhausted() && !acc.diverged())
        throw NumericError(errc::truncation, "horn_connection_rhs: max_terms reached");
    out.value = acc.value();
    out.divergent_tail = acc.diverged();
    return out;
}

} // namespace qbessel
