#pragma once

// Small dense linear algebra: just what OLS, PCA and k-means need.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "polar/error.hpp"

namespace polar {

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw PreconditionError("Matrix::append_row: width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// 1 - cos(a, b), clamped into [0, 2]. Zero vectors are at distance 1 from everything.
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 1.0;
    const double d = 1.0 - dot(a, b) / (na * nb);
    return std::clamp(d, 0.0, 2.0);
}

/// In-place Cholesky factorisation of a symmetric matrix (lower triangle).
/// Returns false when a pivot is not safely positive.
inline bool cholesky(Matrix& a, double rel_tol = 1e-12) {
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > rel_tol * scale)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
    return true;
}

/// Solves L L^T x = b given the Cholesky factor L.
inline std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
        y[i] /= l(i, i);
    }
    return y;
}

inline Matrix cholesky_inverse(const Matrix& l) {
    const std::size_t n = l.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        auto col = cholesky_solve(l, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

/// Householder QR of an m x n matrix (m >= n), no pivoting.
struct QR {
    Matrix qr;                 // R in the upper triangle, reflectors below
    std::vector<double> rdiag;  // diagonal of R
    std::vector<double> beta;

    explicit QR(Matrix a) : qr(std::move(a)), rdiag(qr.cols()), beta(qr.cols()) {
        const std::size_t m = qr.rows(), n = qr.cols();
        for (std::size_t k = 0; k < n; ++k) {
            double nrm = 0.0;
            for (std::size_t i = k; i < m; ++i) nrm = std::hypot(nrm, qr(i, k));
            if (nrm == 0.0) {
                rdiag[k] = 0.0;
                beta[k] = 0.0;
                continue;
            }
            if (qr(k, k) < 0) nrm = -nrm;
            for (std::size_t i = k; i < m; ++i) qr(i, k) /= nrm;
            qr(k, k) += 1.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += qr(i, k) * qr(i, j);
                s = -s / qr(k, k);
                for (std::size_t i = k; i < m; ++i) qr(i, j) += s * qr(i, k);
            }
            rdiag[k] = -nrm;
            beta[k] = 1.0;
        }
    }

    /// Indices of columns whose R diagonal is negligible relative to the column
    /// norms: each is (numerically) a combination of the columns before it.
    std::vector<std::size_t> dependent_columns(const Matrix& original, double rel_tol = 1e-10) const {
        std::vector<std::size_t> dep;
        for (std::size_t j = 0; j < qr.cols(); ++j) {
            double cn = 0.0;
            for (std::size_t i = 0; i < original.rows(); ++i) cn = std::hypot(cn, original(i, j));
            if (cn == 0.0 || std::abs(rdiag[j]) <= rel_tol * cn) dep.push_back(j);
        }
        return dep;
    }

    /// Least-squares solution of A x = b (A assumed full column rank).
    std::vector<double> solve(std::span<const double> b) const {
        const std::size_t m = qr.rows(), n = qr.cols();
        std::vector<double> y(b.begin(), b.end());
        for (std::size_t k = 0; k < n; ++k) {
            if (beta[k] == 0.0) continue;
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += qr(i, k) * y[i];
            s = -s / qr(k, k);
            for (std::size_t i = k; i < m; ++i) y[i] += s * qr(i, k);
        }
        std::vector<double> x(n);
        for (std::size_t k = n; k-- > 0;) {
            double s = y[k];
            for (std::size_t j = k + 1; j < n; ++j) s -= qr(k, j) * x[j];
            x[k] = s / rdiag[k];
        }
        return x;
    }

    /// (R^T R)^{-1}, i.e. (A^T A)^{-1}.
    Matrix normal_inverse() const {
        const std::size_t n = qr.cols();
        // invert upper-triangular R
        Matrix rinv(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            rinv(j, j) = 1.0 / rdiag[j];
            for (std::size_t i = j; i-- > 0;) {
                double s = 0.0;
                for (std::size_t k = i + 1; k <= j; ++k) s += r(i, k) * rinv(k, j);
                rinv(i, j) = -s / rdiag[i];
            }
        }
        Matrix out(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = std::max(i, j); k < n; ++k) s += rinv(i, k) * rinv(j, k);
                out(i, j) = s;
            }
        return out;
    }

private:
    double r(std::size_t i, std::size_t j) const { return i == j ? rdiag[i] : qr(i, j); }
};

}  // namespace polar
