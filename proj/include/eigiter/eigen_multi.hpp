#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "dense.hpp"
#include "eigen_iter.hpp"
#include "qr.hpp"

namespace eigiter {

/// All n eigenpairs, ordered by decreasing |λ|. Columns of `vectors` are the eigenvectors.
template <std::floating_point T>
struct EigenDecomposition {
    std::vector<T> values;
    DenseMatrix<T> vectors{1, 1};
    std::vector<T> residuals;
    std::size_t iterations = 0;
    bool converged = false;
    /// Off-diagonal mass of A^(k) for k = 1..iterations.
    std::vector<double> off_diagonal;
};

/// Snapshot of iteration k: A^(k), the accumulated Q̲^(k) = Q^(1)···Q^(k) and R̲^(k) = R^(k)···R^(1).
template <std::floating_point T>
struct QrIterationState {
    DenseMatrix<T> a_k;
    DenseMatrix<T> q_accum;
    DenseMatrix<T> r_accum;
    std::size_t k;
};

template <std::floating_point T>
struct MultiRun {
    EigenDecomposition<T> result;
    std::vector<QrIterationState<T>> states;
    IterationTrace trace;
};

/// Which part of A^(k) must vanish: everything off the diagonal (symmetric input) or only the
/// strictly lower triangle (unsymmetric input, which tends to upper-triangular form).
enum class OffDiagonal { full, lower };

template <std::floating_point T>
T off_diagonal_mass(const DenseMatrix<T>& a, OffDiagonal part = OffDiagonal::full) {
    T s = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i == j || (part == OffDiagonal::lower && j > i)) continue;
            s += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(s);
}

namespace detail {

/// One step of either method advances (A^(k), Q̲^(k), R̲^(k)); this holds the bookkeeping
/// both share: convergence test, state retention, trace, and the final decomposition.
template <std::floating_point T>
class MultiIterationTracker {
public:
    MultiIterationTracker(const DenseMatrix<T>& a, const SolverConfig& cfg, bool stop_on_convergence)
        : a_(a),
          cfg_(cfg),
          part_(is_symmetric(a) ? OffDiagonal::full : OffDiagonal::lower),
          norm_(frobenius_norm(a)),
          stride_(cfg.trace_stride ? cfg.trace_stride : (a.rows() <= 32 ? 1 : 10)),
          stop_(stop_on_convergence) {}

    void start(const QrIterationState<T>& s0) {
        run_.states.push_back(s0);
        prev_diag_ = diagonal_of(s0.a_k);
    }

    /// Records iteration state `s`; true when the run should stop.
    bool record(const QrIterationState<T>& s) {
        const T off = off_diagonal_mass(s.a_k, part_);
        run_.result.off_diagonal.push_back(static_cast<double>(off));

        std::vector<T> diag = diagonal_of(s.a_k);
        std::size_t lead = 0;
        T change = 0;
        for (std::size_t i = 0; i < diag.size(); ++i) {
            if (std::abs(diag[i]) > std::abs(diag[lead])) lead = i;
            change = std::max(change, std::abs(diag[i] - prev_diag_[i]));
        }
        run_.trace.steps.push_back({s.k, static_cast<double>(diag[lead]), static_cast<double>(off),
                                    static_cast<double>(change)});
        prev_diag_ = std::move(diag);

        bool done = false;
        if (off <= static_cast<T>(cfg_.tol) * norm_) {
            finalize(s);
            done = run_.result.converged && stop_;
        }
        if (!done && s.k >= cfg_.max_iters) {
            finalize(s);
            done = true;
        }
        if (done || s.k % stride_ == 0) {
            if (run_.states.empty() || run_.states.back().k != s.k) run_.states.push_back(s);
        }
        return done;
    }

    MultiRun<T> take() && { return std::move(run_); }

private:
    static std::vector<T> diagonal_of(const DenseMatrix<T>& m) {
        std::vector<T> d(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
        return d;
    }

    void finalize(const QrIterationState<T>& s) {
        const std::size_t n = a_.rows();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return std::abs(s.a_k(x, x)) > std::abs(s.a_k(y, y));
        });

        EigenDecomposition<T>& d = run_.result;
        d.values.assign(n, T(0));
        d.residuals.assign(n, T(0));
        d.vectors = DenseMatrix<T>(n, n);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t src = order[c];
            d.values[c] = s.a_k(src, src);
            Vector<T> v = s.q_accum.column(src);
            canonicalize_sign(v);
            for (std::size_t i = 0; i < n; ++i) d.vectors(i, c) = v[i];
            d.residuals[c] = eigen_residual(a_, v, d.values[c]);
        }
        d.iterations = s.k;
        const T off = off_diagonal_mass(s.a_k, part_);
        const bool off_ok = off <= static_cast<T>(cfg_.tol) * norm_;
        if (part_ == OffDiagonal::full) {
            const T worst = *std::max_element(d.residuals.begin(), d.residuals.end());
            d.converged = off_ok && worst <= static_cast<T>(cfg_.tol);
        } else {
            d.converged = off_ok;
        }
    }

    const DenseMatrix<T>& a_;
    const SolverConfig& cfg_;
    OffDiagonal part_;
    T norm_;
    std::size_t stride_;
    bool stop_;
    std::vector<T> prev_diag_;
    MultiRun<T> run_;
};

template <std::floating_point T>
MultiRun<T> simultaneous_run(const DenseMatrix<T>& a, const std::optional<DenseMatrix<T>>& v0,
                             const SolverConfig& cfg, bool stop_on_convergence) {
    const std::size_t n = a.rows();
    if (v0 && (v0->rows() != n || v0->cols() != n)) {
        throw UsageError("simultaneous_iteration: starting basis must be n x n");
    }
    QrFactors<T> f0 = qr_decompose(v0 ? *v0 : DenseMatrix<T>::identity(n));
    QrIterationState<T> s{matmul_transposed_left(f0.q, matmul(a, f0.q)), std::move(f0.q),
                          DenseMatrix<T>::identity(n), 0};
    MultiIterationTracker<T> tracker(a, cfg, stop_on_convergence);
    tracker.start(s);
    for (;;) {
        QrFactors<T> f = qr_decompose(matmul(a, s.q_accum));
        s.q_accum = std::move(f.q);
        s.a_k = matmul_transposed_left(s.q_accum, matmul(a, s.q_accum));
        s.r_accum = matmul(f.r, s.r_accum);
        ++s.k;
        if (tracker.record(s)) break;
    }
    return std::move(tracker).take();
}

template <std::floating_point T>
MultiRun<T> qr_method_run(const DenseMatrix<T>& a, const SolverConfig& cfg, bool stop_on_convergence) {
    const std::size_t n = a.rows();
    QrIterationState<T> s{a, DenseMatrix<T>::identity(n), DenseMatrix<T>::identity(n), 0};
    MultiIterationTracker<T> tracker(a, cfg, stop_on_convergence);
    tracker.start(s);
    for (;;) {
        QrFactors<T> f = qr_decompose(s.a_k);
        s.a_k = matmul(f.r, f.q);
        s.q_accum = matmul(s.q_accum, f.q);
        s.r_accum = matmul(f.r, s.r_accum);
        ++s.k;
        if (tracker.record(s)) break;
    }
    return std::move(tracker).take();
}

}  // namespace detail

/// Simultaneous (orthogonalized block power) iteration: W = A·Q̲^(k-1), Q̲^(k)R^(k) = W,
/// A^(k) = Q̲ᵀAQ̲. The starting basis defaults to I.
template <std::floating_point T>
MultiRun<T> simultaneous_iteration(const DenseMatrix<T>& a, const std::optional<DenseMatrix<T>>& v0 = std::nullopt,
                                   const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "simultaneous_iteration");
    detail::require_symmetric(a, cfg, "simultaneous_iteration");
    return detail::simultaneous_run(a, v0, cfg, true);
}

/// Unshifted QR method: Q^(k)R^(k) = A^(k-1), A^(k) = R^(k)Q^(k), with Q̲ and R̲ accumulated.
///
/// With `allow_unsymmetric` set, convergence is judged on the strictly lower triangle only and
/// the returned vectors are Schur vectors, not eigenvectors.
template <std::floating_point T>
MultiRun<T> qr_iteration(const DenseMatrix<T>& a, const SolverConfig& cfg = {}) {
    cfg.validate();
    detail::require_square(a, "qr_iteration");
    detail::require_symmetric(a, cfg, "qr_iteration");
    return detail::qr_method_run(a, cfg, true);
}

struct EquivalenceStep {
    std::size_t k;
    /// max|·| deviation between the two methods' A^(k), Q̲^(k), R̲^(k)
    double a_deviation;
    double q_deviation;
    double r_deviation;
    /// ‖A^k - Q̲R̲‖_max per method
    double power_defect_simultaneous;
    double power_defect_qr;
    /// ‖A^(k) - Q̲ᵀAQ̲‖_max per method
    double similarity_defect_simultaneous;
    double similarity_defect_qr;
    /// 1e-9 * ‖A‖_F^k, applied to R̲ deviation and the power identity
    double power_bound;
    bool passed;
};

struct EquivalenceReport {
    std::vector<EquivalenceStep> steps;
    double frobenius_norm = 0;
    double tolerance = 1e-9;
    /// tolerance * max(1, ‖A‖_F), applied to A^(k) deviation and the similarity identity
    double similarity_bound = 0;
    /// tolerance, applied to Q̲ deviation
    double orthogonal_bound = 0;
    bool passed = true;

    double worst(double EquivalenceStep::*field) const {
        double m = 0;
        for (const auto& s : steps) m = std::max(m, s.*field);
        return m;
    }
};

/// Runs simultaneous iteration (from V^(0) = I) and the QR method side by side for k_max steps
/// and measures how far apart their A^(k), Q̲^(k), R̲^(k) sequences drift, together with the
/// defects of A^k = Q̲R̲ and A^(k) = Q̲ᵀAQ̲ for each method.
template <std::floating_point T>
EquivalenceReport verify_equivalence(const DenseMatrix<T>& a, std::size_t k_max, const SolverConfig& cfg = {},
                                     double tolerance = 1e-9) {
    cfg.validate();
    detail::require_square(a, "verify_equivalence");
    detail::require_symmetric(a, cfg, "verify_equivalence");
    if (k_max < 1) throw UsageError("verify_equivalence: k must be at least 1");

    SolverConfig fixed = cfg;
    fixed.max_iters = k_max;
    fixed.trace_stride = 1;
    const MultiRun<T> sim = detail::simultaneous_run(a, std::optional<DenseMatrix<T>>{}, fixed, false);
    const MultiRun<T> qrm = detail::qr_method_run(a, fixed, false);

    EquivalenceReport report;
    report.tolerance = tolerance;
    report.frobenius_norm = static_cast<double>(frobenius_norm(a));
    report.similarity_bound = tolerance * std::max(1.0, report.frobenius_norm);
    report.orthogonal_bound = tolerance;

    DenseMatrix<T> power = a;
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (k > 1) power = matmul(a, power);
        const auto& s = sim.states.at(k);
        const auto& q = qrm.states.at(k);
        EquivalenceStep step{};
        step.k = k;
        step.a_deviation = static_cast<double>(max_abs_diff(s.a_k, q.a_k));
        step.q_deviation = static_cast<double>(max_abs_diff(s.q_accum, q.q_accum));
        step.r_deviation = static_cast<double>(max_abs_diff(s.r_accum, q.r_accum));
        step.power_defect_simultaneous = static_cast<double>(max_abs_diff(power, matmul(s.q_accum, s.r_accum)));
        step.power_defect_qr = static_cast<double>(max_abs_diff(power, matmul(q.q_accum, q.r_accum)));
        step.similarity_defect_simultaneous = static_cast<double>(
            max_abs_diff(s.a_k, matmul_transposed_left(s.q_accum, matmul(a, s.q_accum))));
        step.similarity_defect_qr = static_cast<double>(
            max_abs_diff(q.a_k, matmul_transposed_left(q.q_accum, matmul(a, q.q_accum))));
        step.power_bound = tolerance * std::pow(report.frobenius_norm, static_cast<double>(k));
        step.passed = step.a_deviation <= report.similarity_bound && step.q_deviation <= report.orthogonal_bound &&
                      step.r_deviation <= step.power_bound && step.power_defect_simultaneous <= step.power_bound &&
                      step.power_defect_qr <= step.power_bound &&
                      step.similarity_defect_simultaneous <= report.similarity_bound &&
                      step.similarity_defect_qr <= report.similarity_bound;
        report.passed = report.passed && step.passed;
        report.steps.push_back(step);
    }
    return report;
}

}  // namespace eigiter
