#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dense.hpp"

namespace eigiter {

/// A = Q·R with Q orthogonal and R upper triangular with a strictly positive diagonal.
template <std::floating_point T>
struct QrFactors {
    DenseMatrix<T> q;
    DenseMatrix<T> r;
};

/// Relative drop tolerance shared by the QR rank test and the LU singularity test.
template <std::floating_point T>
T drop_tolerance(const DenseMatrix<T>& a) {
    return T(1e-12) * static_cast<T>(a.rows()) * max_abs(a);
}

/// Householder QR of a square matrix, normalized so that every R(i,i) > 0.
///
/// Columns whose subdiagonal part is already zero are not reflected, so diagonal and
/// upper-triangular inputs with a positive diagonal factor exactly as Q = I, R = A.
/// Throws RankDeficient for the first column with |R(i,i)| at or below the drop tolerance.
template <std::floating_point T>
QrFactors<T> qr_decompose(const DenseMatrix<T>& a) {
    if (!a.is_square()) throw UsageError("qr_decompose: matrix must be square");
    const std::size_t n = a.rows();
    DenseMatrix<T> r = a;

    // Householder vectors, v_k spans rows k..n-1; empty when column k needed no reflection.
    std::vector<std::vector<T>> reflectors(n);

    for (std::size_t k = 0; k + 1 < n; ++k) {
        T below = 0;
        for (std::size_t i = k + 1; i < n; ++i) below = std::max(below, std::abs(r(i, k)));
        if (below == T(0)) continue;

        std::vector<T> v(n - k);
        for (std::size_t i = k; i < n; ++i) v[i - k] = r(i, k);
        const T alpha = norm2(Vector<T>(v));
        const T sign = v[0] >= T(0) ? T(1) : T(-1);
        v[0] += sign * alpha;
        T vtv = 0;
        for (T e : v) vtv += e * e;

        for (std::size_t j = k; j < n; ++j) {
            T s = 0;
            for (std::size_t i = k; i < n; ++i) s += v[i - k] * r(i, j);
            const T t = T(2) * s / vtv;
            for (std::size_t i = k; i < n; ++i) r(i, j) -= t * v[i - k];
        }
        r(k, k) = -sign * alpha;
        for (std::size_t i = k + 1; i < n; ++i) r(i, k) = T(0);
        reflectors[k] = std::move(v);
    }

    // Q = H_0 H_1 ... H_{n-2}, built by applying the reflectors to I in reverse order.
    DenseMatrix<T> q = DenseMatrix<T>::identity(n);
    for (std::size_t kk = n; kk-- > 0;) {
        const auto& v = reflectors[kk];
        if (v.empty()) continue;
        T vtv = 0;
        for (T e : v) vtv += e * e;
        for (std::size_t j = 0; j < n; ++j) {
            T s = 0;
            for (std::size_t i = kk; i < n; ++i) s += v[i - kk] * q(i, j);
            if (s == T(0)) continue;
            const T t = T(2) * s / vtv;
            for (std::size_t i = kk; i < n; ++i) q(i, j) -= t * v[i - kk];
        }
    }

    const T tol = drop_tolerance(a);
    for (std::size_t i = 0; i < n; ++i) {
        const T d = std::abs(r(i, i));
        if (d <= tol || d == T(0)) throw RankDeficient(i, static_cast<double>(d));
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (r(i, i) > T(0)) continue;
        for (std::size_t j = i; j < n; ++j) r(i, j) = -r(i, j);
        for (std::size_t row = 0; row < n; ++row) q(row, i) = -q(row, i);
    }
    return {std::move(q), std::move(r)};
}

/// max |QᵀQ - I|
template <std::floating_point T>
T orthogonality_defect(const DenseMatrix<T>& q) {
    return max_abs_diff(matmul_transposed_left(q, q), DenseMatrix<T>::identity(q.cols()));
}

/// Largest |entry| strictly below the diagonal.
template <std::floating_point T>
T lower_triangle_max(const DenseMatrix<T>& r) {
    T m = 0;
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < std::min(i, r.cols()); ++j) m = std::max(m, std::abs(r(i, j)));
    return m;
}

}  // namespace eigiter
