#ifndef DPC_LINALG_HPP
#define DPC_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "dpc/contract.hpp"
#include "dpc/rng.hpp"

namespace dpc {

using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) {
    DPC_REQUIRE(x.size() == y.size(), "dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec scaled(const Vec& x, double a) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
    return out;
}

inline Vec added(const Vec& x, const Vec& y) {
    DPC_REQUIRE(x.size() == y.size(), "added: dimension mismatch");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
    return out;
}

inline Vec subtracted(const Vec& x, const Vec& y) {
    DPC_REQUIRE(x.size() == y.size(), "subtracted: dimension mismatch");
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
    return out;
}

inline void add_scaled_in_place(Vec& x, const Vec& y, double a) {
    DPC_REQUIRE(x.size() == y.size(), "add_scaled: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
}

inline Vec concat(const Vec& x, const Vec& y) {
    Vec out;
    out.reserve(x.size() + y.size());
    out.insert(out.end(), x.begin(), x.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

inline Vec concat(const Vec& x, const Vec& y, const Vec& z) {
    return concat(concat(x, y), z);
}

/// Returns x/||x||; zero vector stays zero.
inline Vec normalized(const Vec& x) {
    const double n = norm(x);
    if (n < 1e-300) return Vec(x.size(), 0.0);
    return scaled(x, 1.0 / n);
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Dense row-major real matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {
        DPC_REQUIRE(r >= 1 && c >= 1, "matrix dims must be positive");
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    Vec apply(const Vec& x) const {
        DPC_REQUIRE(x.size() == cols, "matvec: dimension mismatch");
        Vec out(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            const double* row = &data[i * cols];
            for (std::size_t j = 0; j < cols; ++j) s += row[j] * x[j];
            out[i] = s;
        }
        return out;
    }

    Vec apply_transposed(const Vec& x) const {
        DPC_REQUIRE(x.size() == rows, "matvec^T: dimension mismatch");
        Vec out(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = &data[i * cols];
            for (std::size_t j = 0; j < cols; ++j) out[j] += row[j] * x[i];
        }
        return out;
    }

    void scale_in_place(double a) {
        for (auto& v : data) v *= a;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix gaussian(std::size_t r, std::size_t c, SeededRng& rng) {
        Matrix m(r, c);
        for (auto& v : m.data) v = rng.gaussian();
        return m;
    }
};

/// Largest singular value via power iteration on M^T M. Deterministic:
/// starts from the all-ones direction.
inline double spectral_norm(const Matrix& m, int iters = 200) {
    Vec v(m.cols, 1.0);
    v = normalized(v);
    double sigma = 0.0;
    for (int it = 0; it < iters; ++it) {
        Vec mv = m.apply(v);
        sigma = norm(mv);
        if (sigma < 1e-300) return 0.0;
        v = normalized(m.apply_transposed(mv));
    }
    return sigma;
}

/// Seeded matrix with orthonormal rows (requires rows <= cols).
/// Gaussian draw followed by two rounds of modified Gram-Schmidt.
inline Matrix orthonormal_rows(std::size_t rows, std::size_t cols, SeededRng& rng) {
    DPC_REQUIRE(rows <= cols, "orthonormal_rows: rows must not exceed cols");
    Matrix m = Matrix::gaussian(rows, cols, rng);
    for (int round = 0; round < 2; ++round) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                double proj = 0.0;
                for (std::size_t j = 0; j < cols; ++j) proj += m(i, j) * m(k, j);
                for (std::size_t j = 0; j < cols; ++j) m(i, j) -= proj * m(k, j);
            }
            double n = 0.0;
            for (std::size_t j = 0; j < cols; ++j) n += m(i, j) * m(i, j);
            n = std::sqrt(n);
            DPC_REQUIRE(n > 1e-12, "orthonormal_rows: degenerate draw");
            for (std::size_t j = 0; j < cols; ++j) m(i, j) /= n;
        }
    }
    return m;
}

}  // namespace dpc

#endif
