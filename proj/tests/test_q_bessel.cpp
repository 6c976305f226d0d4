#include "doctest.h"

#include "oracle.hpp"
#include "qbessel/bessel_polynomials.hpp"
#include "qbessel/identities.hpp"

using namespace qbessel;

TEST_CASE("qbmp basics") {
    QContext ctx(0.5);
    auto fam = random_commuting_family(61u, 2, 1, 4.0, true, 1.0);
    const CMatrix& a = fam.members[0];

    // n = 0 collapses to I for every z
    for (double z : {0.0, 0.3, 2.0})
        CHECK(rel_residual(qbmp(QBesselParams{0, a, ctx}, Complex(z)), CMatrix::identity(2)) < 1e-14);

    // z = 0 leaves only the r = 0 term
    for (int n : {1, 2, 4}) {
        CMatrix want = q_poch(scalar_power(ctx.q, a - CMatrix::identity(2)), n, ctx) *
                       Complex(1.0 / qfact(ctx.q, n));
        CHECK(rel_residual(qbmp(QBesselParams{n, a, ctx}, Complex(0.0)), want) < 1e-14);
    }

    // frozen scalar values computed ahead of the build
    CHECK(std::abs(qbmp(QBesselParams{2, CMatrix::scalar(1, Complex(3.0)), ctx}, Complex(0.3)).at(0, 0) -
                   Complex(-0.0587890625)) < 1e-14);
    QContext ctx7(0.7);
    CHECK(std::abs(qbmp(QBesselParams{3, CMatrix::scalar(1, Complex(2.3)), ctx7}, Complex(0.25)).at(0, 0) -
                   Complex(0.30202557126367404)) < 1e-12);

    // scalar oracle across the q grid
    for (double q : {0.3, 0.5, 0.7, 0.9}) {
        QContext c(q);
        for (int n : {1, 3, 6}) {
            Complex got = qbmp(QBesselParams{n, CMatrix::scalar(1, Complex(2.3)), c}, Complex(0.4)).at(0, 0);
            oracle::C want = oracle::jbmp(n, oracle::C(2.3L), q, oracle::C(0.4L));
            CHECK(std::abs(got - Complex((double)want.real(), (double)want.imag())) <=
                  1e-11 * (1.0 + std::abs(want)));
        }
    }

    // matrix argument on a scalar carrier matches the scalar slot
    QBesselParams p{3, a, ctx};
    CHECK(rel_residual(qbmp(p, CMatrix::scalar(2, Complex(0.4))), qbmp(p, Complex(0.4))) < 1e-13);

    // coefficients reproduce the evaluation
    auto cs = qbmp_coefficients(p);
    CHECK(static_cast<int>(cs.size()) == 4);
    CMatrix horner(2);
    Complex z(0.37, 0.05);
    for (int k = 3; k >= 0; --k) horner = horner * z + cs[static_cast<size_t>(k)];
    CHECK(rel_residual(horner, qbmp(p, z)) < 1e-13);
}

TEST_CASE("qbmp commutation and degree properties") {
    QContext ctx(0.7);
    auto fam = random_commuting_family(67u, 3, 1, 4.0, true, 1.0);
    const CMatrix& a = fam.members[0];
    QBesselParams p{4, a, ctx};
    CMatrix v1 = qbmp(p, Complex(0.2)), v2 = qbmp(p, Complex(0.55));
    CHECK(commutator_norm(v1, v2) < 1e-10);
    CHECK(commutator_norm(v1, a) < 1e-10);

    // (n+1)-fold q-derivative of a degree-n polynomial vanishes; the scale
    // grows with the lattice divided-difference condition number, so compare
    // against the polynomial's own magnitude
    QBesselParams p2{2, a, ctx};
    MatrixFunction f = [&](Complex w) { return qbmp(p2, w); };
    double scale = qbmp(p2, Complex(0.8)).max_abs();
    CHECK(q_derivative(f, Complex(0.8), 3, ctx).max_abs() < 1e-12 * (1.0 + scale));
}

TEST_CASE("qbmp ODE residual") {
    QContext ctx(0.5);
    CMatrix a1 = CMatrix::scalar(1, Complex(2.6));
    CHECK(qbmp_ode_residual(QBesselParams{0, a1, ctx}, Complex(0.4)) < 1e-15);
    CHECK(qbmp_ode_residual(QBesselParams{2, a1, ctx}, Complex(0.3)) < 1e-10);

    // solution property holds lattice-wide
    auto fam = random_commuting_family(71u, 2, 1, 4.0, true, 0.5);
    QBesselParams p{3, fam.members[0], ctx};
    CHECK(qbmp_ode_residual(p, Complex(0.4)) < 1e-10);
    CHECK(qbmp_ode_residual(p, Complex(0.4 * ctx.q)) < 1e-10);
}

TEST_CASE("qbmp derivative closed form") {
    QContext ctx(0.5);
    auto fam = random_commuting_family(73u, 2, 1, 4.0, true, 1.0);
    const CMatrix& a = fam.members[0];
    QBesselParams p{3, a, ctx};

    CHECK(rel_residual(qbmp_qderiv_closed(p, Complex(0.3), 0), qbmp(p, Complex(0.3))) == 0.0);

    MatrixFunction f = [&](Complex w) { return qbmp(p, w); };
    for (int r : {1, 2, 3}) {
        CMatrix lhs = q_derivative(f, Complex(0.3), r, ctx);
        CHECK(rel_residual(lhs, qbmp_qderiv_closed(p, Complex(0.3), r)) < 1e-9);
    }

    // r = 1, n = 1: the derivative is constant in z
    QBesselParams p1{1, a, ctx};
    CMatrix d1 = qbmp_qderiv_closed(p1, Complex(0.1), 1);
    CMatrix d2 = qbmp_qderiv_closed(p1, Complex(0.9), 1);
    CHECK(rel_residual(d1, d2) < 1e-13);
    CMatrix want = q_poch(scalar_power(ctx.q, a - CMatrix::identity(2)), 2, ctx) *
                   Complex(std::pow(ctx.q, -1) / (ctx.q - 1.0));
    CHECK(rel_residual(d1, want) < 1e-12);

    CHECK_THROWS_AS(qbmp_qderiv_closed(p, Complex(0.3), 4), NumericError);
}

TEST_CASE("product formula right side") {
    QContext ctx(0.5);
    CMatrix a1 = CMatrix::scalar(1, Complex(2.3));

    // n = m = 0 collapses to I
    CHECK(rel_residual(qbmp_product_rhs(0, 0, a1, Complex(1.0), Complex(2.0), Complex(0.3), ctx),
                       CMatrix::identity(1)) < 1e-14);

    // m = 0 collapses to J_n(alpha z)
    QBesselParams p3{3, a1, ctx};
    CHECK(rel_residual(qbmp_product_rhs(3, 0, a1, Complex(1.0), Complex(2.0), Complex(0.25), ctx),
                       qbmp(p3, Complex(0.25))) < 1e-9);

    // n = m = 1 scalar case against the direct product
    QBesselParams p1{1, a1, ctx};
    CMatrix lhs = qbmp(p1, Complex(0.1)) * qbmp(p1, Complex(0.2));
    CHECK(rel_residual(lhs, qbmp_product_rhs(1, 1, a1, Complex(1.0), Complex(2.0), Complex(0.1), ctx)) < 1e-9);

    // matrix case, n+m spanning the eps-regularized region
    auto fam = random_commuting_family(79u, 2, 1, 4.0, true, 1.0);
    const CMatrix& a = fam.members[0];
    for (auto [n, m] : std::initializer_list<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
        QBesselParams pn{n, a, ctx}, pm{m, a, ctx};
        CMatrix l = qbmp(pn, Complex(0.2)) * qbmp(pm, Complex(0.3));
        CMatrix r = qbmp_product_rhs(n, m, a, Complex(1.0), Complex(1.5), Complex(0.2), ctx);
        CHECK(rel_residual(l, r) < 1e-9);
    }

    CHECK_THROWS_AS(qbmp_product_rhs(1, 1, a1, Complex(0.0), Complex(1.0), Complex(0.1), ctx),
                    NumericError);
}

TEST_CASE("integral representation") {
    QContext ctx(0.5);
    CMatrix a1 = CMatrix::scalar(1, Complex(3.0));

    // n = 0 reduces to Gamma^{-1}(A-I) Gamma(A-I) = I
    CHECK(rel_residual(qbmp_integral_rep(QBesselParams{0, a1, ctx}, Complex(0.0)),
                       CMatrix::identity(1)) < 1e-8);

    QBesselParams p{1, a1, ctx};
    CHECK(rel_residual(qbmp_integral_rep(p, Complex(0.2)), qbmp(p, Complex(0.2))) < 1e-7);

    // degree-1 polynomial in z on both sides: slopes agree
    CMatrix s1 = qbmp_integral_rep(p, Complex(0.4)) - qbmp_integral_rep(p, Complex(0.2));
    CMatrix s2 = qbmp(p, Complex(0.4)) - qbmp(p, Complex(0.2));
    CHECK(rel_residual(s1, s2) < 1e-7);

    // matrix parameter
    auto fam = random_commuting_family(83u, 2, 1, 4.0, true, 1.5);
    QBesselParams pm{2, fam.members[0], ctx};
    CHECK(rel_residual(qbmp_integral_rep(pm, Complex(0.25)), qbmp(pm, Complex(0.25))) < 1e-7);
}

TEST_CASE("q-Beta-type integrals") {
    QContext ctx(0.5);
    auto fam = random_commuting_family(89u, 2, 2, 4.0, true, 0.5);
    const CMatrix &a = fam.members[0], &b = fam.members[1];

    // n = 0, plain: both sides reduce to the q-Beta evaluation
    auto pair0 = qbmp_beta_integral(0, a, b, BetaVariant::plain, Complex(0.3), ctx);
    CHECK(rel_residual(pair0.lhs, pair0.rhs) < 1e-7);

    // scalar n = 1 case agrees (the stated identity holds at n = 1)
    CMatrix a1 = CMatrix::scalar(1, Complex(2.0)), b1 = CMatrix::scalar(1, Complex(2.0));
    auto pair1 = qbmp_beta_integral(1, a1, b1, BetaVariant::plain, Complex(0.3), ctx);
    CHECK(rel_residual(pair1.lhs, pair1.rhs) < 1e-6);
    auto pair1s = qbmp_beta_integral(1, a1, b1, BetaVariant::shifted, Complex(0.3), ctx);
    CHECK(rel_residual(pair1s.lhs, pair1s.rhs) < 1e-6);

    // shifted variant at z = 0: both sides carry the same n-dependent prefactor
    auto pz = qbmp_beta_integral(2, a, b, BetaVariant::shifted, Complex(0.0), ctx);
    CHECK(rel_residual(pz.lhs, pz.rhs) < 1e-7);
}

TEST_CASE("recurrence coefficients") {
    QContext ctx(0.5);
    CMatrix a1 = CMatrix::scalar(1, Complex(2.3));
    RecurrenceCoeffs rc = recurrence_coeffs(1, a1, ctx);
    CHECK(rc.z_consistency < 1e-9);
    CHECK(rc.fit_residual < 1e-8);

    auto fam = random_commuting_family(97u, 3, 1, 4.0, true, 0.5);
    for (int n : {1, 2, 4}) {
        RecurrenceCoeffs r = recurrence_coeffs(n, fam.members[0], ctx);
        CHECK(r.z_consistency < 1e-8);
        CHECK(r.fit_residual < 1e-8);
    }
    CHECK_THROWS_AS(recurrence_coeffs(0, a1, ctx), NumericError);
}

TEST_CASE("substitution maps the contiguous layer onto the q-BMP layer") {
    // running both layers on matched inputs: each residual is tiny and the
    // two layers agree to 1e-12 on the residual scale
    const IdentityDef* l2[5] = {lookup("eq2.9"), lookup("eq2.10"), lookup("eq2.11"),
                                lookup("eq2.12"), lookup("eq2.13")};
    const IdentityDef* lJ[5] = {lookup("eq2.14"), lookup("eq2.15"), lookup("eq2.16"),
                                lookup("eq2.17"), lookup("eq2.18")};
    SampleSpace space;
    for (int i = 0; i < 5; ++i) {
        REQUIRE(l2[i] != nullptr);
        REQUIRE(lJ[i] != nullptr);
        TrialInput inA = make_trial(*l2[i], space, 42, 1, 0);
        TrialInput inB = make_trial(*lJ[i], space, 42, 1, 0);
        TrialOutcome a = run_trial(*l2[i], inA);
        TrialOutcome b = run_trial(*lJ[i], inB);
        REQUIRE(a.conclusive);
        REQUIRE(b.conclusive);
        CHECK(a.residual < 1e-12);
        CHECK(b.residual < 1e-12);
        CHECK(std::abs(a.residual - b.residual) < 1e-12);
    }
}

TEST_CASE("product formula with general alpha") {
    QContext ctx(0.7);
    auto fam = random_commuting_family(111u, 2, 1, 4.0, true, 1.0);
    const CMatrix& a = fam.members[0];
    QBesselParams p2{2, a, ctx}, p1{1, a, ctx};
    Complex al(0.7), be(1.3), z(0.3);
    CMatrix lhs = qbmp(p2, al * z) * qbmp(p1, be * z);
    CHECK(rel_residual(lhs, qbmp_product_rhs(2, 1, a, al, be, z, ctx)) < 1e-9);
}

TEST_CASE("q_beta rejects non-commuting inputs") {
    QContext ctx(0.5);
    CMatrix a = CMatrix::from_rows({{Complex(1.0), Complex(0.5)}, {Complex(0.0), Complex(2.0)}});
    CMatrix b = CMatrix::from_rows({{Complex(2.0), Complex(0.0)}, {Complex(0.7), Complex(1.0)}});
    CHECK_THROWS_AS(q_beta(a, b, ctx), NumericError);
}
