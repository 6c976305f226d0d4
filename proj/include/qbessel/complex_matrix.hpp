#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <vector>

#include "errors.hpp"

namespace qbessel {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major, value semantics. Dimensions stay
// tiny (<= 8); everything is done with plain O(n^3) loops.
class CMatrix {
  public:
    CMatrix() : dim_(0) {}
    explicit CMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

    static CMatrix zero(int dim) { return CMatrix(dim); }

    static CMatrix identity(int dim) {
        CMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    // c*I
    static CMatrix scalar(int dim, Complex c) {
        CMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = c;
        return m;
    }

    static CMatrix diagonal(std::initializer_list<Complex> d) {
        CMatrix m(static_cast<int>(d.size()));
        int i = 0;
        for (Complex c : d) { m.at(i, i) = c; ++i; }
        return m;
    }

    static CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        CMatrix m(static_cast<int>(rows.size()));
        int i = 0;
        for (const auto& row : rows) {
            int j = 0;
            for (Complex c : row) m.at(i, j++) = c;
            ++i;
        }
        return m;
    }

    int dim() const { return dim_; }
    Complex& at(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const Complex& at(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const std::vector<Complex>& entries() const { return a_; }
    std::vector<Complex>& entries() { return a_; }

    bool finite() const {
        for (const Complex& c : a_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& c : a_) m = std::max(m, std::abs(c));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (const Complex& c : a_) s += std::norm(c);
        return std::sqrt(s);
    }

    CMatrix& operator+=(const CMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(Complex c) {
        for (Complex& x : a_) x *= c;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex c) { return a *= c; }
    friend CMatrix operator*(Complex c, CMatrix a) { return a *= c; }
    friend CMatrix operator*(CMatrix a, double c) { return a *= Complex(c); }
    friend CMatrix operator*(double c, CMatrix a) { return a *= Complex(c); }
    friend CMatrix operator-(CMatrix a) { return a *= Complex(-1.0); }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        const int n = a.dim_;
        CMatrix c(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const Complex aik = a.at(i, k);
                if (aik == Complex(0.0)) continue;
                for (int j = 0; j < n; ++j) c.at(i, j) += aik * b.at(k, j);
            }
        return c;
    }

    bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  private:
    int dim_;
    std::vector<Complex> a_;
};

inline CMatrix conj_transpose(const CMatrix& m) {
    CMatrix r(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) r.at(i, j) = std::conj(m.at(j, i));
    return r;
}

// Spectral norm via power iteration on M*M. M*M is Hermitian PSD, so the
// iteration converges in value even with repeated top singular values.
inline double two_norm(const CMatrix& m) {
    const int n = m.dim();
    if (n == 0) return 0.0;
    if (!m.finite()) throw NumericError(errc::nonfinite, "two_norm: non-finite input");
    if (n == 1) return std::abs(m.at(0, 0));
    if (m.max_abs() == 0.0) return 0.0;

    CMatrix h = conj_transpose(m) * m;
    // scale to keep the iteration well-ranged
    double s = h.max_abs();
    h *= Complex(1.0 / s);

    std::vector<Complex> v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(1.0 + 0.1 * i, 0.05 * (i + 1));
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        std::vector<Complex> w(n, Complex(0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w[i] += h.at(i, j) * v[j];
        double nw = 0.0;
        for (const Complex& c : w) nw += std::norm(c);
        nw = std::sqrt(nw);
        if (nw == 0.0) return 0.0; // v in the kernel: null after scaling
        for (Complex& c : w) c /= nw;
        // Rayleigh quotient of the normalized iterate
        double lam = 0.0;
        {
            std::vector<Complex> hw(n, Complex(0.0));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) hw[i] += h.at(i, j) * w[j];
            Complex r(0.0);
            for (int i = 0; i < n; ++i) r += std::conj(w[i]) * hw[i];
            lam = r.real();
        }
        if (it > 2 && std::abs(lam - lambda) <= 1e-10 * std::max(lam, 1e-300) * 0.1) {
            lambda = lam;
            break;
        }
        lambda = lam;
        v = std::move(w);
    }
    return std::sqrt(std::max(lambda, 0.0) * s);
}

inline double commutator_norm(const CMatrix& x, const CMatrix& y) {
    return two_norm(x * y - y * x);
}

// Gaussian elimination with partial pivoting; throws a singularity error when
// the condition estimate ||M|| ||M^-1|| exceeds cond_limit. That estimate is
// the operational stand-in for the spectrum conditions q^{-k} not in sigma(.).
inline CMatrix mat_inv(const CMatrix& m, double cond_limit = 1e12) {
    const int n = m.dim();
    if (!m.finite()) throw NumericError(errc::nonfinite, "mat_inv: non-finite input");
    CMatrix a = m;
    CMatrix inv = CMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(a.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(a.at(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0)
            throw NumericError(errc::singular, "mat_inv: exactly singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(piv, j), a.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        }
        const Complex d = a.at(col, col);
        for (int j = 0; j < n; ++j) { a.at(col, j) /= d; inv.at(col, j) /= d; }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a.at(r, col);
            if (f == Complex(0.0)) continue;
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    if (!inv.finite())
        throw NumericError(errc::singular, "mat_inv: non-finite inverse");
    double cond = two_norm(m) * two_norm(inv);
    if (cond > cond_limit)
        throw NumericError(errc::singular, "mat_inv: condition estimate above limit");
    return inv;
}

// ||lhs - rhs||_2 / (1 + max(||lhs||_2, ||rhs||_2)), the uniform residual metric.
inline double rel_residual(const CMatrix& lhs, const CMatrix& rhs) {
    return two_norm(lhs - rhs) / (1.0 + std::max(two_norm(lhs), two_norm(rhs)));
}

} // namespace qbessel
