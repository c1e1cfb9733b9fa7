#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dense.hpp"
#include "eigen_iter.hpp"
#include "eigen_multi.hpp"
#include "lu.hpp"
#include "qr.hpp"

namespace eigiter {

/// f(z) = z^n + a_{n-1} z^{n-1} + ... + a_1 z + a_0, stored as [a_0, ..., a_{n-1}].
/// The leading coefficient is implicitly 1; non-monic input must be normalized by the caller.
template <std::floating_point T>
class MonicPolynomial {
public:
    explicit MonicPolynomial(std::vector<T> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) throw UsageError("monic polynomial must have degree at least 1");
        detail::require_finite<T>(coeffs_, "polynomial coefficients");
    }

    MonicPolynomial(std::initializer_list<T> coeffs) : MonicPolynomial(std::vector<T>(coeffs)) {}

    /// Monic polynomial with the given roots, expanded.
    static MonicPolynomial from_roots(std::span<const T> roots) {
        std::vector<T> c{T(1)};  // highest degree last
        for (T r : roots) {
            std::vector<T> next(c.size() + 1, T(0));
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i + 1] += c[i];
                next[i] -= r * c[i];
            }
            c = std::move(next);
        }
        c.pop_back();
        return MonicPolynomial(std::move(c));
    }

    std::size_t degree() const noexcept { return coeffs_.size(); }
    std::span<const T> coeffs() const noexcept { return coeffs_; }

    /// Horner evaluation.
    T operator()(T z) const {
        T acc = T(1);
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z + coeffs_[i];
        return acc;
    }

    T max_abs_coeff() const { return max_abs<T>(coeffs_); }

private:
    std::vector<T> coeffs_;
};

/// Ones on the subdiagonal, [-a_0, ..., -a_{n-1}] in the last column.
template <std::floating_point T>
DenseMatrix<T> companion_matrix(const MonicPolynomial<T>& p) {
    const std::size_t n = p.degree();
    DenseMatrix<T> c(n, n);
    for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = T(1);
    for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = -p.coeffs()[i];
    return c;
}

/// P_A(x) = det(xI - A) from the partial-pivoting elimination.
template <std::floating_point T>
T char_poly_eval(const DenseMatrix<T>& a, T x) {
    if (!a.is_square()) throw UsageError("char_poly_eval: matrix must be square");
    DenseMatrix<T> m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = (i == j ? x : T(0)) - a(i, j);
    return determinant(m);
}

template <std::floating_point T>
struct PolyRoots {
    /// Ascending.
    std::vector<T> roots;
    /// |p(root)| for each root.
    std::vector<T> residuals;
    std::size_t iterations = 0;
};

/// Real roots of p as eigenvalues of its companion matrix, found by unshifted QR iteration.
///
/// Exact zero roots (a_0 = 0) are divided out first, since they make the companion matrix
/// singular. The iteration stops once the subdiagonal mass is below tol * ‖C‖_F and every
/// diagonal entry r satisfies |p(r)| <= tol * (1 + max|a_i|) * n. Complex or equal-magnitude
/// roots never reach that state and raise NoRealConvergence after max_iters.
template <std::floating_point T>
PolyRoots<T> poly_roots(const MonicPolynomial<T>& p, const SolverConfig& cfg = {}) {
    cfg.validate();
    PolyRoots<T> out;

    std::vector<T> rest(p.coeffs().begin(), p.coeffs().end());
    while (!rest.empty() && rest.front() == T(0)) {
        out.roots.push_back(T(0));
        rest.erase(rest.begin());
    }

    const T bound = static_cast<T>(cfg.tol) * (T(1) + p.max_abs_coeff()) * static_cast<T>(p.degree());

    if (!rest.empty()) {
        const MonicPolynomial<T> q(rest);
        const DenseMatrix<T> c = companion_matrix(q);
        const T norm = frobenius_norm(c);
        std::vector<double> trajectory;
        DenseMatrix<T> ak = c;
        bool certified = false;
        for (std::size_t k = 1; k <= cfg.max_iters && !certified; ++k) {
            QrFactors<T> f = qr_decompose(ak);
            ak = matmul(f.r, f.q);
            const T off = off_diagonal_mass(ak, OffDiagonal::lower);
            trajectory.push_back(static_cast<double>(off));
            out.iterations = k;
            if (off > static_cast<T>(cfg.tol) * norm) continue;
            certified = true;
            for (std::size_t i = 0; i < ak.rows(); ++i) {
                if (std::abs(p(ak(i, i))) > bound) {
                    certified = false;
                    break;
                }
            }
        }
        if (!certified) {
            throw NoRealConvergence("QR iteration on the companion matrix did not reach a certified real "
                                    "triangular form after " + std::to_string(cfg.max_iters) +
                                        " iterations (complex or equal-magnitude roots?)",
                                    std::move(trajectory));
        }
        for (std::size_t i = 0; i < ak.rows(); ++i) out.roots.push_back(ak(i, i));
    }

    std::sort(out.roots.begin(), out.roots.end());
    for (T r : out.roots) out.residuals.push_back(std::abs(p(r)));
    return out;
}

}  // namespace eigiter
