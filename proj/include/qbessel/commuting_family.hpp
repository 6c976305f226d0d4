#pragma once

#include <cstdint>
#include <vector>

#include "complex_matrix.hpp"

namespace qbessel {

// splitmix64: tiny, deterministic, platform-independent.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    uint64_t below(uint64_t n) { return next() % n; }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    SplitMix64 s(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
    return s.next();
}

inline uint64_t hash_string(const char* s) {
    uint64_t h = 1469598103934665603ull;
    for (; *s; ++s) { h ^= static_cast<uint64_t>(*s); h *= 1099511628211ull; }
    return h;
}

// Members are real-coefficient polynomials of one random seed matrix, so
// commutation is structural and no eigensolver is ever involved. Positive
// stability is enforced by construction: the polynomial part p(S) has
// every eigenvalue inside the disk of radius r = sum |c_j| ||S||^j, and the
// constant shift c0 >= 0.25 + r pushes all real parts to >= 0.25.
struct CommutingFamily {
    std::vector<CMatrix> members;
    CMatrix seed_matrix;
    uint64_t seed;
    int dim;
};

inline CommutingFamily random_commuting_family(uint64_t seed, int dim, int count,
                                               double spectral_radius_bound = 4.0,
                                               bool positive_stable = true,
                                               double extra_shift = 0.0) {
    if (dim < 1 || dim > 8)
        throw NumericError(errc::config, "random_commuting_family: dim out of range");
    if (count < 1)
        throw NumericError(errc::config, "random_commuting_family: count must be >= 1");

    SplitMix64 rng(mix_seed(seed, 0x71ee2b5c0d1f34abull));
    CMatrix s(dim);
    double snorm = 0.0;
    int attempts = 0;
    for (;; ++attempts) {
        if (attempts >= 1000)
            throw NumericError(errc::config,
                               "random_commuting_family: rejection limit reached");
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                s.at(i, j) = Complex(rng.uniform(-1.0, 1.0), 0.0);
        snorm = two_norm(s);
        if (snorm >= 0.05) break; // degenerate draw, resample
    }
    // normalize so that ||S|| <= 0.5
    s *= Complex(0.5 / snorm);
    snorm = 0.5;

    CommutingFamily fam;
    fam.seed = seed;
    fam.dim = dim;
    fam.seed_matrix = s;
    fam.members.reserve(count);

    // powers of S up to degree dim-1
    std::vector<CMatrix> pw;
    pw.push_back(CMatrix::identity(dim));
    for (int d = 1; d < dim; ++d) pw.push_back(pw.back() * s);

    const double lo = positive_stable ? 0.25 : -1.0;
    for (int k = 0; k < count; ++k) {
        double r = 0.0;
        CMatrix m(dim);
        for (int d = 1; d < dim; ++d) {
            double c = rng.uniform(-1.0, 1.0);
            m += pw[d] * Complex(c);
            r += std::abs(c) * std::pow(snorm, d);
        }
        double span = spectral_radius_bound - (lo + r) - extra_shift;
        if (span < 0.25) span = 0.25;
        double c0 = lo + r + extra_shift + rng.uniform(0.0, std::min(span, 2.0));
        m += pw[0] * Complex(c0);
        fam.members.push_back(m);
    }
    return fam;
}

// max over pairs of ||XY - YX||_2; structural zero up to roundoff here.
inline double family_max_commutator(const CommutingFamily& f) {
    double m = 0.0;
    for (size_t i = 0; i < f.members.size(); ++i)
        for (size_t j = i + 1; j < f.members.size(); ++j)
            m = std::max(m, commutator_norm(f.members[i], f.members[j]));
    return m;
}

} // namespace qbessel
