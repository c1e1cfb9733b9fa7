#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "eigen_iter.hpp"

namespace eigiter {

/// Fitted order p in e_{k+1} ≈ C·e_k^p.
struct ConvergenceEstimate {
    double order = 0;
    /// Geometric per-step contraction, reported only when the order is close to 1.
    std::optional<double> rate;
    double r_squared = 0;
    std::size_t samples_used = 0;
};

struct ConvergenceOptions {
    /// Magnitude of the quantity the errors are measured against (e.g. ‖A‖ for residuals).
    double scale = 1.0;
    /// Number of trailing usable samples entering the fit.
    std::size_t window = 5;
    /// |p - 1| within which the sequence counts as linear and a rate is reported.
    double linear_band = 0.2;
};

/// Least-squares fit of log e_{k+1} against log e_k over the tail of an error sequence.
///
/// Samples at or below 100 * eps * scale are saturated and dropped. Throws
/// InsufficientSamples when fewer than 4 errors are positive or fewer than 3 usable
/// consecutive samples remain.
inline ConvergenceEstimate estimate_convergence_order(std::span<const double> errors,
                                                      const ConvergenceOptions& opts = {}) {
    const auto positive = std::count_if(errors.begin(), errors.end(),
                                        [](double e) { return e > 0.0 && std::isfinite(e); });
    if (positive < 4) throw InsufficientSamples(static_cast<std::size_t>(positive));

    const double guard = 100.0 * std::numeric_limits<double>::epsilon() * opts.scale;
    auto usable = [&](double e) { return std::isfinite(e) && e > guard; };

    // Consecutive usable pairs, newest last.
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (usable(errors[k]) && usable(errors[k + 1])) pairs.emplace_back(std::log(errors[k]), std::log(errors[k + 1]));
    }
    const std::size_t max_pairs = opts.window > 1 ? opts.window - 1 : 1;
    if (pairs.size() > max_pairs) pairs.erase(pairs.begin(), pairs.end() - static_cast<std::ptrdiff_t>(max_pairs));
    if (pairs.size() < 2) throw InsufficientSamples(pairs.empty() ? 0 : pairs.size() + 1);

    const double m = static_cast<double>(pairs.size());
    double mx = 0, my = 0;
    for (auto [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= m;
    my /= m;
    double sxx = 0, syy = 0, sxy = 0;
    for (auto [x, y] : pairs) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw InsufficientSamples(pairs.size() + 1);

    ConvergenceEstimate est;
    est.order = sxy / sxx;
    est.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    est.samples_used = pairs.size() + 1;
    if (std::abs(est.order - 1.0) <= opts.linear_band) {
        double log_ratio = 0;
        for (auto [x, y] : pairs) log_ratio += y - x;
        est.rate = std::exp(log_ratio / m);
    }
    return est;
}

/// Order fit on the residual column of a solver trace.
inline ConvergenceEstimate estimate_convergence_order(const IterationTrace& trace, const ConvergenceOptions& opts = {}) {
    const std::vector<double> r = trace.residuals();
    return estimate_convergence_order(std::span<const double>(r), opts);
}

}  // namespace eigiter
