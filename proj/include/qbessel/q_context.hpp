#pragma once

#include "errors.hpp"

namespace qbessel {

// Base q plus the truncation/tolerance policy that governs every series,
// infinite product and lattice sum in the library. q is real in (0,1).
struct QContext {
    double q;
    double series_tol = 1e-14;
    int max_terms = 10000;
    int consecutive_small = 3;
    double inv_cond_limit = 1e12;

    explicit QContext(double q_) : q(q_) { validate(); }
    QContext(double q_, double tol, int terms, int consec = 3,
             double cond_limit = 1e12)
        : q(q_), series_tol(tol), max_terms(terms), consecutive_small(consec),
          inv_cond_limit(cond_limit) {
        validate();
    }

    void validate() const {
        if (!(q > 0.0 && q < 1.0))
            throw NumericError(errc::config, "QContext: q must lie in (0,1)");
        if (!(series_tol > 0.0))
            throw NumericError(errc::config, "QContext: series_tol must be > 0");
        if (max_terms < 16)
            throw NumericError(errc::config, "QContext: max_terms must be >= 16");
        if (consecutive_small < 1)
            throw NumericError(errc::config, "QContext: consecutive_small must be >= 1");
    }
};

} // namespace qbessel
