#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "octovisc/errors.hpp"

namespace octovisc {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Hessians, restrictions and pencil elements
/// are stored in full (both triangles) even though they are symmetric.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(std::span<const double> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(double s) noexcept {
        for (double& v : data_) v *= s;
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }
    friend bool operator==(const Matrix&, const Matrix&) = default;

    [[nodiscard]] Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    [[nodiscard]] double frobenius() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |a_ij - a_ji|.
    [[nodiscard]] double asymmetry() const {
        if (!square()) return INFINITY;
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    void symmetrize() {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j) {
                const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = v;
                (*this)(j, i) = v;
            }
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

using SymMatrix = Matrix;

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matvec: dimensions differ");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

/// B A B^T; B has orthonormal rows spanning the subspace.
inline Matrix congruence(const Matrix& basis, const Matrix& a) {
    if (basis.cols() != a.rows() || !a.square())
        throw DimensionMismatch("congruence: basis and matrix dimensions differ");
    const std::size_t k = basis.rows();
    const std::size_t n = a.rows();
    Matrix ba = basis * a; // k x n
    Matrix out(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto bi = ba.row(i);
        for (std::size_t j = i; j < k; ++j) {
            const auto bj = basis.row(j);
            double s = 0.0;
            for (std::size_t l = 0; l < n; ++l) s += bi[l] * bj[l];
            out(i, j) = s;
            out(j, i) = s;
        }
    }
    return out;
}

/// O^T A O for square O.
inline Matrix transpose_congruence(const Matrix& o, const Matrix& a) {
    return congruence(o.transposed(), a);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Matrix outer(std::span<const double> a, std::span<const double> b) {
    Matrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

/// Trace of the product of two symmetric matrices, i.e. the Frobenius pairing.
inline double trace_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("trace_product");
    double s = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t k = 0; k < da.size(); ++k) s += da[k] * db[k];
    return s;
}

/// Quadratic form x^T A x.
inline double quadratic(const Matrix& a, std::span<const double> x) { return dot(x, a * x); }

/// Householder QR of a square matrix. Returns Q explicitly and the diagonal of R.
struct QrResult {
    Matrix q;
    Vector r_diag;
};

inline QrResult householder_qr(Matrix a) {
    if (!a.square()) throw DimensionMismatch("householder_qr expects a square matrix");
    const std::size_t n = a.rows();
    std::vector<Vector> reflectors;
    reflectors.reserve(n);
    Vector rdiag(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double alpha = 0.0;
        for (std::size_t i = k; i < n; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (a(k, k) > 0) alpha = -alpha;
        Vector v(n - k, 0.0);
        for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
        v[0] -= alpha;
        const double vn = norm(v);
        if (vn > 0.0) {
            for (double& x : v) x /= vn;
            for (std::size_t j = k; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < n; ++i) s += v[i - k] * a(i, j);
                for (std::size_t i = k; i < n; ++i) a(i, j) -= 2.0 * s * v[i - k];
            }
        }
        rdiag[k] = a(k, k);
        reflectors.push_back(std::move(v));
    }
    Matrix q = Matrix::identity(n);
    for (std::size_t kk = n; kk-- > 0;) {
        const Vector& v = reflectors[kk];
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = kk; i < n; ++i) s += v[i - kk] * q(i, j);
            for (std::size_t i = kk; i < n; ++i) q(i, j) -= 2.0 * s * v[i - kk];
        }
    }
    return {std::move(q), std::move(rdiag)};
}

/// Largest entry of |B B^T - I|.
inline double orthonormality_defect(const Matrix& basis) {
    double m = 0.0;
    for (std::size_t i = 0; i < basis.rows(); ++i)
        for (std::size_t j = i; j < basis.rows(); ++j) {
            const double d = dot(basis.row(i), basis.row(j)) - (i == j ? 1.0 : 0.0);
            m = std::max(m, std::abs(d));
        }
    return m;
}

} // namespace octovisc
