#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "qr.hpp"

namespace eigiter {

/// Partial-pivoting LU factors packed into one matrix: strict lower part holds L (unit
/// diagonal implied), upper part holds U. `pivots[i]` is the original row placed at row i.
template <std::floating_point T>
struct SolveFactorization {
    DenseMatrix<T> factored;
    std::vector<std::size_t> pivots;
    int permutation_sign = 1;

    std::size_t dim() const noexcept { return factored.rows(); }

    T min_pivot() const {
        T m = std::numeric_limits<T>::infinity();
        for (std::size_t i = 0; i < dim(); ++i) m = std::min(m, std::abs(factored(i, i)));
        return m;
    }

    /// det(A) as the signed product of pivots.
    T determinant() const {
        T d = static_cast<T>(permutation_sign);
        for (std::size_t i = 0; i < dim(); ++i) d *= factored(i, i);
        return d;
    }
};

namespace detail {

/// Gaussian elimination with partial pivoting that never throws. A zero pivot column is
/// left as is (the factorization is then exact but singular).
template <std::floating_point T>
SolveFactorization<T> lu_eliminate(const DenseMatrix<T>& a) {
    if (!a.is_square()) throw UsageError("lu_factor: matrix must be square");
    const std::size_t n = a.rows();
    SolveFactorization<T> f{a, std::vector<std::size_t>(n), 1};
    std::iota(f.pivots.begin(), f.pivots.end(), std::size_t{0});
    DenseMatrix<T>& lu = f.factored;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        T best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                p = i;
            }
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            std::swap(f.pivots[k], f.pivots[p]);
            f.permutation_sign = -f.permutation_sign;
        }
        const T pivot = lu(k, k);
        if (pivot == T(0)) continue;
        for (std::size_t i = k + 1; i < n; ++i) {
            const T m = lu(i, k) / pivot;
            lu(i, k) = m;
            if (m == T(0)) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }
    return f;
}

}  // namespace detail

/// LU with partial pivoting. Throws NearSingular when the smallest pivot magnitude is at or
/// below `singular_tol`; pass 0 to reject only exactly singular matrices.
template <std::floating_point T>
SolveFactorization<T> lu_factor(const DenseMatrix<T>& a, T singular_tol) {
    auto f = detail::lu_eliminate(a);
    const T smallest = f.min_pivot();
    if (smallest <= singular_tol || smallest == T(0)) throw NearSingular(static_cast<double>(smallest));
    return f;
}

/// LU with partial pivoting and the default scale-relative tolerance 1e-12 * n * max|A|.
template <std::floating_point T>
SolveFactorization<T> lu_factor(const DenseMatrix<T>& a) {
    return lu_factor(a, drop_tolerance(a));
}

template <std::floating_point T>
Vector<T> solve(const SolveFactorization<T>& f, const Vector<T>& b) {
    const std::size_t n = f.dim();
    if (b.dim() != n) throw UsageError("solve: dimension mismatch");
    const DenseMatrix<T>& lu = f.factored;
    Vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        T s = b[f.pivots[i]];
        for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        T s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x[j];
        x[ii] = s / lu(ii, ii);
    }
    return x;
}

/// P·A reconstructed as L·U, then un-permuted; used to check the factorization.
template <std::floating_point T>
DenseMatrix<T> reconstruct(const SolveFactorization<T>& f) {
    const std::size_t n = f.dim();
    const DenseMatrix<T>& lu = f.factored;
    DenseMatrix<T> a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            T s = 0;
            for (std::size_t k = 0; k <= std::min(i, j); ++k) {
                const T l = (k == i) ? T(1) : lu(i, k);
                s += l * lu(k, j);
            }
            a(f.pivots[i], j) = s;
        }
    }
    return a;
}

/// det(A) via partial-pivoting elimination; exactly 0 when elimination meets a zero column.
template <std::floating_point T>
T determinant(const DenseMatrix<T>& a) {
    return detail::lu_eliminate(a).determinant();
}

}  // namespace eigiter
