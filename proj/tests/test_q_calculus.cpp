#include "doctest.h"

#include <limits>

#include "oracle.hpp"
#include "qbessel/q_calculus.hpp"

using namespace qbessel;

namespace {
const double QS[] = {0.3, 0.5, 0.7, 0.9};
}

TEST_CASE("q_bracket") {
    QContext ctx(0.5);
    CHECK(q_bracket(CMatrix::zero(2), ctx).max_abs() == 0.0);
    CHECK(rel_residual(q_bracket(CMatrix::identity(3), ctx), CMatrix::identity(3)) < 1e-14);
    CHECK(std::abs(q_bracket(CMatrix::scalar(1, Complex(2.0)), ctx).at(0, 0) - Complex(1.5)) < 1e-14);

    // q -> 1 recovers E entrywise
    QContext near1(0.999);
    auto fam = random_commuting_family(3u, 3, 1);
    CMatrix e = fam.members[0];
    CHECK(rel_residual(q_bracket(e, near1), e) < 5e-3);
}

TEST_CASE("q_poch finite products") {
    QContext ctx(0.5);
    CHECK(rel_residual(q_poch(CMatrix::scalar(2, Complex(0.3)), 0, ctx), CMatrix::identity(2)) == 0.0);
    CHECK(std::abs(q_poch(CMatrix::scalar(1, Complex(0.5)), 2, ctx).at(0, 0) - Complex(0.375)) < 1e-15);

    // left-to-right product order is associativity-stable: extending by one
    // factor reproduces the longer product exactly
    auto fam = random_commuting_family(17u, 3, 1);
    CMatrix e = scalar_power(ctx.q, fam.members[0]);
    for (int n = 0; n < 7; ++n) {
        CMatrix lhs = q_poch(e, n + 1, ctx);
        CMatrix rhs = q_poch(e, n, ctx) *
                      (CMatrix::identity(3) - e * Complex(std::pow(ctx.q, n)));
        CHECK((lhs - rhs).max_abs() == 0.0);
    }

    // Gamma route: (q^E;q)_n == (1-q)^n Gamma_q(E+nI) Gamma_q^{-1}(E)
    for (double q : QS) {
        QContext c(q);
        auto f2 = random_commuting_family(23u, 2, 1);
        CMatrix e2 = f2.members[0];
        for (int n : {1, 3, 5}) {
            CMatrix lhs = q_poch(scalar_power(q, e2), n, c);
            CMatrix rhs = scalar_power(1.0 - q, CMatrix::scalar(2, Complex(n, 0.0))) *
                          q_gamma(e2 + CMatrix::scalar(2, Complex(n, 0.0)), c) *
                          mat_inv(q_gamma(e2, c), c.inv_cond_limit);
            CHECK(rel_residual(lhs, rhs) < 1e-9);
        }
    }
}

TEST_CASE("q_poch_inf") {
    QContext ctx(0.5);
    CHECK(rel_residual(q_poch_inf(CMatrix::zero(2), ctx), CMatrix::identity(2)) == 0.0);

    // frozen high-precision value of (0.5;0.5)_inf
    CMatrix v = q_poch_inf(CMatrix::scalar(1, Complex(0.5)), ctx);
    CHECK(std::abs(v.at(0, 0).real() - 0.28878809508660242) < 1e-12);

    // splitting: (E;q)_inf == (E;q)_N (q^N E;q)_inf
    for (double q : QS) {
        QContext c(q);
        auto fam = random_commuting_family(29u, 3, 1);
        CMatrix e = fam.members[0] * Complex(0.4);
        const int N = 5;
        CMatrix lhs = q_poch_inf(e, c);
        CMatrix rhs = q_poch(e, N, c) * q_poch_inf(e * Complex(std::pow(q, N)), c);
        CHECK(rel_residual(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("q-exponentials: series vs product forms") {
    for (double q : QS) {
        QContext ctx(q);
        CHECK(rel_residual(q_exp_big(CMatrix::zero(2), ctx), CMatrix::identity(2)) == 0.0);
        CHECK(rel_residual(q_exp_small(CMatrix::zero(2), ctx), CMatrix::identity(2)) == 0.0);

        auto fam = random_commuting_family(31u, 3, 1);
        CMatrix f = fam.members[0] - CMatrix::scalar(3, Complex(1.2, 0.0));
        CHECK(rel_residual(q_exp_big(f, ctx), q_poch_inf(f * Complex(-(1.0 - q)), ctx)) < 1e-10);

        CMatrix fs = f * Complex(0.7 / ((1.0 - q) * two_norm(f)));
        CHECK(rel_residual(q_exp_small(fs, ctx),
                           mat_inv(q_poch_inf(fs * Complex(1.0 - q), ctx), ctx.inv_cond_limit)) < 1e-10);

        // scalar: e_q(F) E_q(-F) == 1
        CMatrix f1 = CMatrix::scalar(1, Complex(0.5 / (1.0 - q)));
        CHECK(rel_residual(q_exp_small(f1, ctx) * q_exp_big(-f1, ctx), CMatrix::identity(1)) < 1e-10);

        // scalar values against the direct long-double series
        Complex lib = q_exp_big(CMatrix::scalar(1, Complex(0.7)), ctx).at(0, 0);
        oracle::C ref = oracle::eq_big(oracle::C(0.7L), q);
        CHECK(std::abs(lib - Complex((double)ref.real(), (double)ref.imag())) < 1e-11);
    }
    QContext ctx(0.5);
    CHECK_THROWS_AS(q_exp_small(CMatrix::scalar(1, Complex(2.5)), ctx), NumericError);
}

TEST_CASE("q_derivative and theta") {
    QContext ctx(0.5);
    const int d = 2;
    MatrixFunction cst = [&](Complex) { return CMatrix::scalar(d, Complex(3.0, 1.0)); };
    CHECK(q_derivative(cst, Complex(0.4), 1, ctx).max_abs() < 1e-14);
    CHECK(theta_op(cst, Complex(0.4), ctx).max_abs() < 1e-14);

    MatrixFunction lin = [&](Complex z) { return CMatrix::identity(d) * z; };
    CHECK(rel_residual(q_derivative(lin, Complex(0.7, 0.2), 1, ctx), CMatrix::identity(d)) < 1e-14);

    MatrixFunction sq = [&](Complex z) { return CMatrix::identity(d) * (z * z); };
    Complex z(0.3);
    CHECK(rel_residual(q_derivative(sq, z, 1, ctx),
                       CMatrix::identity(d) * ((1.0 + ctx.q) * z)) < 1e-14);

    // theta z^k = [k]_q z^k
    for (int k = 1; k <= 4; ++k) {
        MatrixFunction mono = [&](Complex w) { return CMatrix::identity(d) * std::pow(w, k); };
        Complex expect = (1.0 - std::pow(ctx.q, k)) / (1.0 - ctx.q) * std::pow(z, k);
        CHECK(rel_residual(theta_op(mono, z, ctx), CMatrix::identity(d) * expect) < 1e-12);
    }

    // theta linearity
    MatrixFunction sum = [&](Complex w) { return lin(w) + sq(w); };
    CHECK(rel_residual(theta_op(sum, z, ctx), theta_op(lin, z, ctx) + theta_op(sq, z, ctx)) < 1e-12);

    // (d+1)-fold derivative of a degree-d polynomial vanishes (evaluated away
    // from the origin, where the lattice divided differences stay conditioned)
    MatrixFunction poly = [&](Complex w) {
        return CMatrix::identity(d) * (Complex(1.0) + 2.0 * w + 0.5 * w * w);
    };
    CHECK(q_derivative(poly, Complex(0.8), 3, ctx).max_abs() < 1e-12);

    CHECK_THROWS_AS(q_derivative(lin, Complex(0.0), 1, ctx), NumericError);
}

TEST_CASE("jackson_integral") {
    for (double q : QS) {
        QContext ctx(q);
        MatrixFunction zero = [&](Complex) { return CMatrix::zero(2); };
        CHECK(jackson_integral(zero, 1.0, ctx).max_abs() == 0.0);

        MatrixFunction one = [&](Complex) { return CMatrix::identity(2); };
        CHECK(rel_residual(jackson_integral(one, 1.0, ctx), CMatrix::identity(2)) < 1e-12);

        MatrixFunction tt = [&](Complex t) { return CMatrix::identity(2) * t; };
        CHECK(rel_residual(jackson_integral(tt, 1.0, ctx),
                           CMatrix::identity(2) * Complex(1.0 / (1.0 + q))) < 1e-12);

        // linearity
        MatrixFunction g = [&](Complex t) { return CMatrix::identity(2) * (t * t); };
        CMatrix lhs = jackson_integral([&](Complex t) { return tt(t) * Complex(2.0) + g(t) * Complex(-0.5); },
                                       1.0, ctx);
        CMatrix rhs = jackson_integral(tt, 1.0, ctx) * Complex(2.0) +
                      jackson_integral(g, 1.0, ctx) * Complex(-0.5);
        CHECK(rel_residual(lhs, rhs) < 1e-12);
    }
    QContext ctx(0.5);
    MatrixFunction one = [&](Complex) { return CMatrix::identity(2); };
    CHECK_THROWS_AS(jackson_integral(one, 0.0, ctx), NumericError);
}

TEST_CASE("q_gamma") {
    QContext ctx(0.5);
    CHECK(rel_residual(q_gamma(CMatrix::identity(1), ctx), CMatrix::identity(1)) < 1e-13);

    for (double q : QS) {
        QContext c(q);
        auto fam = random_commuting_family(37u, 2, 1, 4.0, true, 0.5);
        CMatrix f = fam.members[0];
        CMatrix lhs = q_gamma(f + CMatrix::identity(2), c);
        CMatrix rhs = q_bracket(f, c) * q_gamma(f, c);
        CHECK(rel_residual(lhs, rhs) < 1e-9);
    }

    // q-integral definition agrees with the product form
    CMatrix f2 = CMatrix::scalar(1, Complex(2.0));
    CHECK(rel_residual(q_gamma_jackson(f2, ctx), q_gamma(f2, ctx)) < 1e-8);
}

TEST_CASE("q_beta") {
    QContext ctx(0.5);
    CHECK(rel_residual(q_beta(CMatrix::identity(1), CMatrix::identity(1), ctx),
                       CMatrix::identity(1)) < 1e-12);

    for (double q : QS) {
        QContext c(q);
        for (int dim : {1, 2}) {
            auto fam = random_commuting_family(41u + dim, dim, 2, 4.0, true, 0.25);
            const CMatrix &a = fam.members[0], &b = fam.members[1];
            CHECK(rel_residual(q_beta(a, b, c), q_beta(b, a, c)) < 1e-9);
            CHECK(rel_residual(q_beta_integral(a, b, c), q_beta(a, b, c)) < 1e-7);
        }
    }
}

TEST_CASE("scalar operations match the long-double oracle") {
    for (double q : QS) {
        QContext ctx(q);
        const Complex x(0.37, 0.11);
        Complex lib = q_poch(CMatrix::scalar(1, x), 6, ctx).at(0, 0);
        oracle::C ref = oracle::qpoch(oracle::C(0.37L, 0.11L), q, 6);
        CHECK(std::abs(lib - Complex((double)ref.real(), (double)ref.imag())) < 1e-13);

        lib = q_poch_inf(CMatrix::scalar(1, x), ctx).at(0, 0);
        ref = oracle::qpoch_inf(oracle::C(0.37L, 0.11L), q);
        CHECK(std::abs(lib - Complex((double)ref.real(), (double)ref.imag())) < 1e-11);

        lib = q_gamma(CMatrix::scalar(1, Complex(1.8)), ctx).at(0, 0);
        ref = oracle::gamma_q(oracle::C(1.8L), q);
        CHECK(std::abs(lib - Complex((double)ref.real(), (double)ref.imag())) <
              1e-11 * std::abs(ref));
    }
}

TEST_CASE("QContext validation") {
    CHECK_THROWS_AS(QContext(0.0), NumericError);
    CHECK_THROWS_AS(QContext(1.0), NumericError);
    CHECK_THROWS_AS(QContext(0.5, -1.0, 100), NumericError);
    CHECK_THROWS_AS(QContext(0.5, 1e-14, 4), NumericError);
}

TEST_CASE("truncation and non-finite error paths") {
    // a context too small to let the slow q = 0.9 product converge
    QContext tight(0.9, 1e-14, 16);
    CHECK_THROWS_AS(q_poch_inf(CMatrix::scalar(2, Complex(1.0)), tight), NumericError);

    QContext ctx(0.5);
    MatrixFunction bad = [](Complex) {
        CMatrix m(1);
        m.at(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
        return m;
    };
    CHECK_THROWS_AS(jackson_integral(bad, 1.0, ctx), NumericError);
}
