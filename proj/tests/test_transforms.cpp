#include "doctest.h"

#include "oracle.hpp"
#include "qbessel/transforms.hpp"

using namespace qbessel;

TEST_CASE("q_laplace basics") {
    for (double q : {0.3, 0.5, 0.7, 0.9}) {
        QContext ctx(q);
        // f = I: sum q^r/(q;q)_r = 1/(q;q)_inf (Euler), so L[I] = I/s
        ScalarLatticeFunction one = [](Complex) { return CMatrix::identity(2); };
        Complex s(2.0);
        CHECK(rel_residual(q_laplace(one, s, ctx), CMatrix::identity(2) * (Complex(1.0) / s)) < 1e-10);

        // linearity
        ScalarLatticeFunction f = [](Complex t) { return CMatrix::identity(2) * t; };
        ScalarLatticeFunction g = [](Complex t) { return CMatrix::identity(2) * (t * t); };
        ScalarLatticeFunction h = [&](Complex t) { return f(t) * Complex(1.5) + g(t) * Complex(-2.0); };
        CMatrix lhs = q_laplace(h, s, ctx);
        CMatrix rhs = q_laplace(f, s, ctx) * Complex(1.5) + q_laplace(g, s, ctx) * Complex(-2.0);
        CHECK(rel_residual(lhs, rhs) < 1e-12);
    }
    QContext ctx(0.5);
    ScalarLatticeFunction one = [](Complex) { return CMatrix::identity(1); };
    CHECK_THROWS_AS(q_laplace(one, Complex(-1.0), ctx), NumericError);
}

TEST_CASE("q_mellin basics") {
    for (double q : {0.3, 0.5, 0.7}) {
        QContext ctx(q);
        double s = 1.5;
        ScalarLatticeFunction one = [](Complex) { return CMatrix::identity(2); };
        CHECK(rel_residual(q_mellin(one, s, ctx),
                           CMatrix::identity(2) * Complex((1.0 - q) / (1.0 - std::pow(q, s)))) < 1e-12);
        ScalarLatticeFunction lin = [](Complex t) { return CMatrix::identity(2) * t; };
        CHECK(rel_residual(q_mellin(lin, s, ctx),
                           CMatrix::identity(2) * Complex((1.0 - q) / (1.0 - std::pow(q, s + 1)))) < 1e-12);
    }

    // coefficient route equals the lattice transform for a q-BMP
    QContext ctx(0.5);
    CMatrix a = CMatrix::scalar(1, Complex(2.0));
    QBesselParams p{1, a, ctx};
    auto cs = qbmp_coefficients(p);
    double s = 1.25;
    CMatrix direct(1);
    for (size_t k = 0; k < cs.size(); ++k)
        direct += cs[k] * Complex((1.0 - ctx.q) / (1.0 - std::pow(ctx.q, s + (double)k)));
    ScalarLatticeFunction f = [&](Complex t) { return qbmp(p, t); };
    CHECK(rel_residual(direct, q_mellin(f, s, ctx)) < 1e-10);

    CHECK_THROWS_AS(q_mellin(f, 0.0, ctx), NumericError);
}

TEST_CASE("Laplace closed forms") {
    QContext ctx(0.5);
    CMatrix a = CMatrix::scalar(1, Complex(2.0));

    // n = 0, no weight: I/s
    CHECK(rel_residual(qbmp_laplace_closed(0, a, Complex(2.0), std::nullopt, ctx),
                       CMatrix::identity(1) * Complex(0.5)) < 1e-12);

    // frozen value: L[J_1(t;2)](s=2), q = 0.5 equals 0.3125
    CMatrix v = qbmp_laplace_closed(1, a, Complex(2.0), std::nullopt, ctx);
    CHECK(std::abs(v.at(0, 0) - Complex(0.3125)) < 1e-12);

    // closed form vs lattice transform
    for (double q : {0.3, 0.5, 0.7}) {
        QContext c(q);
        auto fam = random_commuting_family(101u, 2, 1, 4.0, true, 0.5);
        for (int n : {1, 2, 3}) {
            QBesselParams p{n, fam.members[0], c};
            ScalarLatticeFunction f = [&](Complex t) { return qbmp(p, t); };
            CHECK(rel_residual(q_laplace(f, Complex(2.0), c),
                               qbmp_laplace_closed(n, fam.members[0], Complex(2.0), std::nullopt, c)) < 1e-8);
            // weighted variant
            ScalarLatticeFunction fw = [&](Complex t) { return qbmp(p, t) * t; };
            CHECK(rel_residual(q_laplace(fw, Complex(2.0), c),
                               qbmp_laplace_closed(n, fam.members[0], Complex(2.0), 2, c)) < 1e-8);
        }
    }

    // m = 1 weight reduces to the plain transform
    CHECK(rel_residual(qbmp_laplace_closed(2, a, Complex(1.7), 1, ctx),
                       qbmp_laplace_closed(2, a, Complex(1.7), std::nullopt, ctx)) < 1e-12);
}

TEST_CASE("Mellin closed-form pair") {
    QContext ctx(0.5);
    CMatrix a = CMatrix::scalar(1, Complex(2.0));

    auto pair = qbmp_mellin_closed(1, a, 1.0, ctx);
    QBesselParams p{1, a, ctx};
    ScalarLatticeFunction f = [&](Complex t) { return qbmp(p, t); };
    CMatrix lattice = q_mellin(f, 1.0, ctx);
    // the direct coefficient route is the correct one
    CHECK(rel_residual(pair.direct, lattice) < 1e-10);
    // frozen direct value at s = 2
    auto pair2 = qbmp_mellin_closed(1, a, 2.0, ctx);
    CHECK(std::abs(pair2.direct.at(0, 0) - Complex(-0.19047619047619048)) < 1e-13);

    // deterministic: the pair reproduces itself on re-evaluation
    auto pairb = qbmp_mellin_closed(1, a, 1.0, ctx);
    CHECK((pair.printed - pairb.printed).max_abs() == 0.0);
    CHECK((pair.direct - pairb.direct).max_abs() == 0.0);

    // s large: every geometric factor tends to (1-q), so the direct route
    // approaches the r = 0 lattice term (1-q) J_n(1)
    auto pl = qbmp_mellin_closed(1, a, 40.0, ctx);
    CHECK(rel_residual(pl.direct, qbmp(p, Complex(1.0)) * Complex(1.0 - ctx.q)) < 1e-8);

    CHECK_THROWS_AS(qbmp_mellin_closed(0, a, 1.0, ctx), NumericError);
}

TEST_CASE("Horn functions against direct double sums") {
    QContext ctx(0.5);
    CMatrix a = CMatrix::scalar(1, Complex(1.3));
    CMatrix b = CMatrix::scalar(1, Complex(0.9));
    CMatrix e = CMatrix::scalar(1, Complex(2.1));

    // trivial point
    CHECK(rel_residual(horn_phi1(HornParams{a, b, e, Complex(0.0), Complex(0.0)}, ctx),
                       CMatrix::identity(1)) == 0.0);
    CHECK(rel_residual(horn_h6(a, e, Complex(0.0), Complex(0.0), ctx), CMatrix::identity(1)) == 0.0);

    // frozen values
    CHECK(std::abs(horn_phi1(HornParams{a, b, e, Complex(0.2), Complex(0.3)}, ctx).at(0, 0) -
                   Complex(2.0376244231390635)) < 1e-10);
    CHECK(std::abs(horn_h6(a, e, Complex(0.1), Complex(0.2), ctx).at(0, 0) -
                   Complex(1.6239784675143316)) < 1e-10);

    // long-double oracle over the q grid
    for (double q : {0.3, 0.5, 0.7}) {
        QContext c(q);
        oracle::C ua = std::pow(oracle::C(q), oracle::C(1.3L));
        oracle::C ub = std::pow(oracle::C(q), oracle::C(0.9L));
        oracle::C ue = std::pow(oracle::C(q), oracle::C(2.1L));
        Complex got = horn_phi1(HornParams{a, b, e, Complex(0.15), Complex(0.2)}, c).at(0, 0);
        oracle::C want = oracle::horn_phi1(ua, ub, ue, q, oracle::C(0.15L), oracle::C(0.2L));
        CHECK(std::abs(got - Complex((double)want.real(), (double)want.imag())) < 1e-10);

        got = horn_h6(a, e, Complex(0.12), Complex(0.2), c).at(0, 0);
        want = oracle::horn_h6(ua, ue, q, oracle::C(0.12L), oracle::C(0.2L));
        CHECK(std::abs(got - Complex((double)want.real(), (double)want.imag())) < 1e-10);
    }

    // B = 0 collapses Phi1 to a single series in y
    QContext c5(0.5);
    CMatrix got = horn_phi1(HornParams{a, CMatrix::zero(1), e, Complex(0.2), Complex(0.3)}, c5);
    // direct single series: sum (q^A;q)_u [(q^E;q)_u]^{-1} y^u / (q;q)_u
    Complex direct(0.0);
    for (int u = 0; u < 200; ++u) {
        oracle::C t = oracle::qpoch(std::pow(oracle::C(0.5L), oracle::C(1.3L)), 0.5L, u) /
                      oracle::qpoch(std::pow(oracle::C(0.5L), oracle::C(2.1L)), 0.5L, u) /
                      oracle::C(oracle::qfact(0.5L, u)) * std::pow(oracle::C(0.3L), u);
        direct += Complex((double)t.real(), (double)t.imag());
    }
    CHECK(std::abs(got.at(0, 0) - direct) < 1e-10);

    // H6 with y = 0 collapses to a single series in x
    got = horn_h6(a, e, Complex(0.1), Complex(0.0), c5);
    direct = Complex(0.0);
    for (int t2 = 0; t2 < 200; ++t2) {
        oracle::C t = oracle::qpoch(std::pow(oracle::C(0.5L), oracle::C(1.3L)), 0.5L, 2 * t2) /
                      oracle::qpoch(std::pow(oracle::C(0.5L), oracle::C(2.1L)), 0.5L, t2) /
                      oracle::C(oracle::qfact(0.5L, t2)) * std::pow(oracle::C(0.1L), t2);
        direct += Complex((double)t.real(), (double)t.imag());
    }
    CHECK(std::abs(got.at(0, 0) - direct) < 1e-10);

    // domain guards
    CHECK_THROWS_AS(horn_phi1(HornParams{a, b, e, Complex(1.2), Complex(0.1)}, c5), NumericError);
    CHECK_THROWS_AS(horn_h6(a, e, Complex(0.3), Complex(0.1), c5), NumericError);
}

TEST_CASE("double-series rearrangement is exact for finite arrays") {
    // sum_{u,l} Psi(l,u) == sum_u sum_{l<=u} Psi(l,u-l) for finitely
    // supported arrays, as a plain reordering of finitely many terms
    SplitMix64 rng(7);
    const int N = 6;
    std::vector<std::vector<CMatrix>> psi(N, std::vector<CMatrix>(N, CMatrix(2)));
    for (int l = 0; l < N; ++l)
        for (int u = 0; u < N; ++u)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    psi[l][u].at(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
    CMatrix lhs(2), rhs(2);
    for (int u = 0; u < N; ++u)
        for (int l = 0; l < N; ++l) lhs += psi[l][u];
    for (int u = 0; u < 2 * N; ++u)
        for (int l = 0; l <= u; ++l)
            if (l < N && u - l < N) rhs += psi[l][u - l];
    CHECK(rel_residual(lhs, rhs) < 1e-15);
}

TEST_CASE("Horn connections") {
    QContext ctx(0.5);
    auto fam = random_commuting_family(103u, 2, 3);
    HornParams p{fam.members[0], fam.members[1], fam.members[2], Complex(0.15), Complex(0.2)};

    // eq2.48 / eq2.49 right sides reproduce the two-variable functions
    CMatrix lhs = horn_h6(p.A, p.E, -p.x * p.y, p.y, ctx);
    auto r48 = horn_connection_rhs(HornConnectionId::eq248, p, ctx, 0);
    CHECK(!r48.divergent_tail);
    CHECK(rel_residual(lhs, r48.value) < 1e-8);

    lhs = horn_phi1(HornParams{p.A, p.B, p.E, -p.x * p.y, p.y}, ctx);
    auto r49 = horn_connection_rhs(HornConnectionId::eq249, p, ctx, 0);
    CHECK(!r49.divergent_tail);
    CHECK(rel_residual(lhs, r49.value) < 1e-8);

    // eq2.51 at y = 0: both sides collapse to I
    HornParams p0{fam.members[0], fam.members[1], fam.members[2], Complex(0.15), Complex(0.0)};
    auto r51 = horn_connection_rhs(HornConnectionId::eq251, p0, ctx, 0);
    CHECK(rel_residual(r51.value, CMatrix::identity(2)) < 1e-12);
    CHECK(rel_residual(horn_h6(p0.A, p0.E, Complex(0.0), Complex(0.0), ctx), r51.value) < 1e-12);

    // the stated eq2.51 series diverges away from y = 0; the evaluator cuts
    // it at the smallest term and flags the tail
    auto r51d = horn_connection_rhs(HornConnectionId::eq251, p, ctx, 0);
    CHECK(r51d.divergent_tail);
}
