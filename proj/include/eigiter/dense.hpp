#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace eigiter {

namespace detail {

template <typename T>
void require_finite(std::span<const T> values, const char* what) {
    for (T v : values) {
        if (!std::isfinite(v)) {
            throw UsageError(std::string(what) + " contains a non-finite entry");
        }
    }
}

}  // namespace detail

/// Dense real vector. Entries are checked finite on construction.
template <std::floating_point T>
class Vector {
public:
    using value_type = T;

    explicit Vector(std::size_t dim) : data_(dim, T(0)) {
        if (dim == 0) throw UsageError("vector dimension must be positive");
    }

    explicit Vector(std::vector<T> entries) : data_(std::move(entries)) {
        if (data_.empty()) throw UsageError("vector dimension must be positive");
        detail::require_finite<T>(data_, "vector");
    }

    Vector(std::initializer_list<T> entries) : Vector(std::vector<T>(entries)) {}

    static Vector unit(std::size_t dim, std::size_t index) {
        Vector e(dim);
        e[index] = T(1);
        return e;
    }

    std::size_t dim() const noexcept { return data_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Vector&) const = default;

private:
    std::vector<T> data_;
};

/// Dense real matrix, row-major and contiguous.
template <std::floating_point T>
class DenseMatrix {
public:
    using value_type = T;

    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {
        if (rows == 0 || cols == 0) throw UsageError("matrix dimensions must be positive");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> row_major)
        : rows_(rows), cols_(cols), data_(std::move(row_major)) {
        if (rows == 0 || cols == 0) throw UsageError("matrix dimensions must be positive");
        if (data_.size() != rows * cols) throw UsageError("matrix entry count does not match rows x cols");
        detail::require_finite<T>(data_, "matrix");
    }

    /// Row-wise literal: `{{2, 1}, {1, 2}}`.
    DenseMatrix(std::initializer_list<std::initializer_list<T>> rows) : rows_(rows.size()), cols_(0) {
        if (rows_ == 0) throw UsageError("matrix dimensions must be positive");
        cols_ = rows.begin()->size();
        if (cols_ == 0) throw UsageError("matrix dimensions must be positive");
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) throw UsageError("ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
        detail::require_finite<T>(data_, "matrix");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static DenseMatrix diagonal(std::span<const T> d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        detail::require_finite<T>(d, "diagonal");
        return m;
    }

    static DenseMatrix diagonal(std::initializer_list<T> d) {
        return diagonal(std::span<const T>(d.begin(), d.size()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<T> entries() noexcept { return data_; }
    std::span<const T> entries() const noexcept { return data_; }

    Vector<T> column(std::size_t j) const {
        Vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<T> data_;
};

using Matrix = DenseMatrix<double>;
using Vec = Vector<double>;

template <std::floating_point T>
Vector<T> matvec(const DenseMatrix<T>& a, const Vector<T>& x) {
    if (a.cols() != x.dim()) throw UsageError("matvec: dimension mismatch");
    Vector<T> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T s = 0;
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

template <std::floating_point T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.cols() != b.rows()) throw UsageError("matmul: dimension mismatch");
    DenseMatrix<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T(0)) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
        }
    }
    return c;
}

template <std::floating_point T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a) {
    DenseMatrix<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

/// aᵀ·b without forming the transpose.
template <std::floating_point T>
DenseMatrix<T> matmul_transposed_left(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.rows() != b.rows()) throw UsageError("matmul: dimension mismatch");
    DenseMatrix<T> c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const T aki = arow[i];
            if (aki == T(0)) continue;
            auto out = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
        }
    }
    return c;
}

template <std::floating_point T>
T dot(const Vector<T>& x, const Vector<T>& y) {
    if (x.dim() != y.dim()) throw UsageError("dot: dimension mismatch");
    T s = 0;
    for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
    return s;
}

/// Euclidean norm, scaled to avoid overflow and underflow of the squares.
template <std::floating_point T>
T norm2(const Vector<T>& x) {
    T scale = 0;
    for (T v : x) scale = std::max(scale, std::abs(v));
    if (scale == T(0)) return T(0);
    T s = 0;
    for (T v : x) {
        const T r = v / scale;
        s += r * r;
    }
    return scale * std::sqrt(s);
}

template <std::floating_point T>
T max_abs(std::span<const T> values) {
    T m = 0;
    for (T v : values) m = std::max(m, std::abs(v));
    return m;
}

template <std::floating_point T>
T max_abs(const DenseMatrix<T>& a) {
    return max_abs<T>(a.entries());
}

template <std::floating_point T>
T frobenius_norm(const DenseMatrix<T>& a) {
    T s = 0;
    for (T v : a.entries()) s += v * v;
    return std::sqrt(s);
}

/// max |a - b| entrywise; dimensions must agree.
template <std::floating_point T>
T max_abs_diff(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("max_abs_diff: dimension mismatch");
    T m = 0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
    return m;
}

template <std::floating_point T>
T max_abs_diff(const Vector<T>& a, const Vector<T>& b) {
    if (a.dim() != b.dim()) throw UsageError("max_abs_diff: dimension mismatch");
    T m = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <std::floating_point T>
T trace(const DenseMatrix<T>& a) {
    T s = 0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
    return s;
}

/// max |a - aᵀ|; zero for symmetric input.
template <std::floating_point T>
T asymmetry(const DenseMatrix<T>& a) {
    if (!a.is_square()) throw UsageError("asymmetry: matrix must be square");
    T m = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

/// Symmetry within 1e-12 * max|A|.
template <std::floating_point T>
bool is_symmetric(const DenseMatrix<T>& a) {
    return a.is_square() && asymmetry(a) <= T(1e-12) * max_abs(a);
}

/// a - shift * I
template <std::floating_point T>
DenseMatrix<T> shifted(const DenseMatrix<T>& a, T shift) {
    DenseMatrix<T> b = a;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) b(i, i) -= shift;
    return b;
}

/// Flip x so that its first non-negligible component is positive.
///
/// A component counts as nonzero when it exceeds sqrt(eps) * max|x|, so rounding noise in
/// entries that are zero in exact arithmetic does not decide the sign.
template <std::floating_point T>
void canonicalize_sign(std::span<T> x) {
    const T cutoff = std::sqrt(std::numeric_limits<T>::epsilon()) * max_abs<T>(x);
    for (T v : x) {
        if (std::abs(v) > cutoff) {
            if (v < T(0)) {
                for (T& e : x) e = -e;
            }
            return;
        }
    }
}

template <std::floating_point T>
void canonicalize_sign(Vector<T>& x) {
    canonicalize_sign(x.entries());
}

}  // namespace eigiter
