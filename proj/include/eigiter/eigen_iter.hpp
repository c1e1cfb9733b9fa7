#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "lu.hpp"

namespace eigiter {

/// Controls shared by every iterative solver.
struct SolverConfig {
    double tol = 1e-10;
    std::size_t max_iters = 10000;
    std::uint64_t seed = 42;
    /// Explicit v^(0); normalized before use. Drawn uniformly from the unit sphere when absent.
    std::optional<std::vector<double>> start;
    /// Lets RQI and the QR family run on unsymmetric input. Nothing is guaranteed there.
    bool allow_unsymmetric = false;
    /// Keep every `trace_stride`-th QR iteration state; 0 picks 1 for n <= 32 and 10 otherwise.
    std::size_t trace_stride = 0;

    void validate() const {
        if (!(tol > 0.0) || !std::isfinite(tol)) throw UsageError("tol must be positive and finite");
        if (max_iters < 1) throw UsageError("max_iters must be at least 1");
        if (start) {
            double s = 0;
            for (double v : *start) {
                if (!std::isfinite(v)) throw UsageError("start vector must be finite");
                s += v * v;
            }
            if (s == 0.0) throw UsageError("start vector must be nonzero");
        }
    }
};

template <std::floating_point T>
struct EigenPair {
    T value = 0;
    Vector<T> vector{1};
    T residual = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct TraceStep {
    std::size_t k;
    double lambda;
    double residual;
    double step_change;
};

/// Per-iteration record of eigenvalue estimate, residual and iterate change.
struct IterationTrace {
    std::vector<TraceStep> steps;

    std::size_t size() const noexcept { return steps.size(); }
    bool empty() const noexcept { return steps.empty(); }

    std::vector<double> residuals() const {
        std::vector<double> r;
        r.reserve(steps.size());
        for (const auto& s : steps) r.push_back(s.residual);
        return r;
    }
};

template <std::floating_point T>
struct SolveResult {
    EigenPair<T> pair;
    IterationTrace trace;
};

/// r(x) = xᵀAx / xᵀx
template <std::floating_point T>
T rayleigh_quotient(const DenseMatrix<T>& a, const Vector<T>& x) {
    if (!a.is_square()) throw UsageError("rayleigh_quotient: matrix must be square");
    if (a.rows() != x.dim()) throw UsageError("rayleigh_quotient: dimension mismatch");
    const T xx = dot(x, x);
    if (xx == T(0)) throw UsageError("rayleigh_quotient: zero vector");
    return dot(x, matvec(a, x)) / xx;
}

/// ‖Av - λv‖₂
template <std::floating_point T>
T eigen_residual(const DenseMatrix<T>& a, const Vector<T>& v, T lambda) {
    Vector<T> r = matvec(a, v);
    for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= lambda * v[i];
    return norm2(r);
}

namespace detail {

template <std::floating_point T>
Vector<T> starting_vector(std::size_t n, const SolverConfig& cfg) {
    if (cfg.start) {
        if (cfg.start->size() != n) throw UsageError("start vector dimension does not match the matrix");
        std::vector<T> v(cfg.start->begin(), cfg.start->end());
        Vector<T> x(std::move(v));
        const T nx = norm2(x);
        for (T& e : x) e /= nx;
        return x;
    }
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (;;) {
        Vector<T> x(n);
        for (T& e : x) e = static_cast<T>(gauss(rng));
        const T nx = norm2(x);
        if (nx == T(0)) continue;
        for (T& e : x) e /= nx;
        return x;
    }
}

template <std::floating_point T>
T sign_free_distance(const Vector<T>& v, const Vector<T>& w) {
    T plus = 0, minus = 0;
    for (std::size_t i = 0; i < v.dim(); ++i) {
        plus += (v[i] - w[i]) * (v[i] - w[i]);
        minus += (v[i] + w[i]) * (v[i] + w[i]);
    }
    return std::sqrt(std::min(plus, minus));
}

template <std::floating_point T>
void require_square(const DenseMatrix<T>& a, const char* who) {
    if (!a.is_square()) throw UsageError(std::string(who) + ": matrix must be square");
}

template <std::floating_point T>
void require_symmetric(const DenseMatrix<T>& a, const SolverConfig& cfg, const char* who) {
    if (!cfg.allow_unsymmetric && !is_symmetric(a)) {
        throw UsageError(std::string(who) + ": matrix is not symmetric (max|A - Aᵀ| = " +
                         std::to_string(static_cast<double>(asymmetry(a))) + ")");
    }
}

/// Shared driver for the fixed-operator iterations: v^(k) = normalize(step(v^(k-1))).
/// Stops when ‖Av - r(v)v‖ <= tol; on exhaustion returns the lowest-residual iterate.
template <std::floating_point T, typename Step>
SolveResult<T> drive(const DenseMatrix<T>& a, const SolverConfig& cfg, Vector<T> v, Step&& step) {
    canonicalize_sign(v);
    SolveResult<T> out;
    std::optional<EigenPair<T>> best;
    const T tol = static_cast<T>(cfg.tol);

    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        Vector<T> w = step(v);
        const T nw = norm2(w);
        if (!(nw > T(0)) || !std::isfinite(nw)) {
            throw Breakdown("iterate annihilated at step " + std::to_string(k) +
                            " (previous iterate lies in the null space of the operator)");
        }
        for (T& e : w) e /= nw;
        canonicalize_sign(w);

        const T lambda = rayleigh_quotient(a, w);
        const T res = eigen_residual(a, w, lambda);
        out.trace.steps.push_back({k, static_cast<double>(lambda), static_cast<double>(res),
                                   static_cast<double>(sign_free_distance(w, v))});
        v = std::move(w);

        if (!best || res < best->residual) best = EigenPair<T>{lambda, v, res, k, false};
        if (res <= tol) {
            out.pair = EigenPair<T>{lambda, v, res, k, true};
            return out;
        }
    }
    out.pair = *best;
    out.pair.iterations = cfg.max_iters;
    return out;
}

}  // namespace detail

/// Power iteration: converges to the eigenpair of largest |λ| when that magnitude is unique.
template <std::floating_point T>
SolveResult<T> power_iteration(const DenseMatrix<T>& a, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "power_iteration");
    return detail::drive(a, cfg, detail::starting_vector<T>(a.rows(), cfg),
                         [&](const Vector<T>& v) { return matvec(a, v); });
}

/// Inverse iteration on (A - mu*I), factored once. The reported eigenvalue is the Rayleigh
/// quotient with respect to A.
template <std::floating_point T>
SolveResult<T> shifted_inverse_iteration(const DenseMatrix<T>& a, T mu, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "shifted_inverse_iteration");
    if (!std::isfinite(mu)) throw UsageError("shift must be finite");
    const DenseMatrix<T> b = shifted(a, mu);
    std::optional<SolveFactorization<T>> f;
    try {
        f = lu_factor(b);
    } catch (const NearSingular& e) {
        throw NearSingular("A - mu*I is numerically singular (smallest pivot " + std::to_string(e.min_pivot()) +
                               "); mu = " + std::to_string(static_cast<double>(mu)) +
                               " is numerically an eigenvalue of A and may be used as the estimate",
                           e.min_pivot(), static_cast<double>(mu));
    }
    return detail::drive(a, cfg, detail::starting_vector<T>(a.rows(), cfg),
                         [&](const Vector<T>& v) { return solve(*f, v); });
}

/// Inverse iteration: converges to the eigenpair of smallest |λ|.
template <std::floating_point T>
SolveResult<T> inverse_iteration(const DenseMatrix<T>& a, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "inverse_iteration");
    std::optional<SolveFactorization<T>> f;
    try {
        f = lu_factor(a);
    } catch (const NearSingular& e) {
        throw NearSingular("A is numerically singular (smallest pivot " + std::to_string(e.min_pivot()) +
                               "); A has an eigenvalue numerically equal to 0",
                           e.min_pivot(), 0.0);
    }
    return detail::drive(a, cfg, detail::starting_vector<T>(a.rows(), cfg),
                         [&](const Vector<T>& v) { return solve(*f, v); });
}

/// Rayleigh quotient iteration. The shift is refreshed to r(v^(k-1)) and (A - shift*I)
/// refactored every step; which eigenpair is found depends on the start vector.
///
/// Only exact singularity of the shifted matrix interrupts the solve: the shift approaching an
/// eigenvalue is the normal operating regime. A singular solve counts as convergence when the
/// current iterate already meets `tol`; otherwise the step is retried once with a nudged shift,
/// and Breakdown is raised if that is singular too.
template <std::floating_point T>
SolveResult<T> rayleigh_quotient_iteration(const DenseMatrix<T>& a, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "rayleigh_quotient_iteration");
    detail::require_symmetric(a, cfg, "rayleigh_quotient_iteration");

    Vector<T> v = detail::starting_vector<T>(a.rows(), cfg);
    canonicalize_sign(v);
    T lambda = rayleigh_quotient(a, v);
    const T tol = static_cast<T>(cfg.tol);
    SolveResult<T> out;
    std::optional<EigenPair<T>> best;

    const T nudge = T(8) * std::numeric_limits<T>::epsilon() * std::max(max_abs(a), T(1));
    auto shifted_solve = [&](T mu) -> std::optional<Vector<T>> {
        try {
            Vector<T> w = solve(lu_factor(shifted(a, mu), T(0)), v);
            const T nw = norm2(w);
            if (nw > T(0) && std::isfinite(nw)) return w;
        } catch (const NearSingular&) {
        }
        return std::nullopt;
    };

    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        std::optional<Vector<T>> w = shifted_solve(lambda);
        if (!w) {
            const T res = eigen_residual(a, v, lambda);
            if (res <= tol) {
                out.trace.steps.push_back({k, static_cast<double>(lambda), static_cast<double>(res), 0.0});
                out.pair = EigenPair<T>{lambda, v, res, k, true};
                return out;
            }
            // The shift is an eigenvalue to working precision but v is not yet its eigenvector:
            // one solve with the shift moved off by a few ulps of ‖A‖ recovers it.
            w = shifted_solve(lambda + nudge);
            if (!w) {
                out.trace.steps.push_back({k, static_cast<double>(lambda), static_cast<double>(res), 0.0});
                throw Breakdown("shifted system singular at step " + std::to_string(k) + " with residual " +
                                std::to_string(static_cast<double>(res)) + " above tolerance");
            }
        }
        const T nw = norm2(*w);
        for (T& e : *w) e /= nw;
        canonicalize_sign(*w);
        lambda = rayleigh_quotient(a, *w);
        const T res = eigen_residual(a, *w, lambda);
        out.trace.steps.push_back({k, static_cast<double>(lambda), static_cast<double>(res),
                                   static_cast<double>(detail::sign_free_distance(*w, v))});
        v = std::move(*w);

        if (!best || res < best->residual) best = EigenPair<T>{lambda, v, res, k, false};
        if (res <= tol) {
            out.pair = EigenPair<T>{lambda, v, res, k, true};
            return out;
        }
    }
    out.pair = *best;
    out.pair.iterations = cfg.max_iters;
    return out;
}

}  // namespace eigiter
