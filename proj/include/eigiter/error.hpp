#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eigiter {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (dimension mismatch, zero vector, asymmetric input, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

/// A QR factorization met a column whose diagonal fell below the drop tolerance.
class RankDeficient : public Error {
public:
    RankDeficient(std::size_t column, double magnitude)
        : Error("matrix is rank deficient: |R(" + std::to_string(column) + "," + std::to_string(column) +
                ")| = " + std::to_string(magnitude) + " is below the drop tolerance"),
          column_(column), magnitude_(magnitude) {}

    std::size_t column() const noexcept { return column_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    std::size_t column_;
    double magnitude_;
};

/// An LU pivot fell below the singularity tolerance.
///
/// When the factored matrix was a shifted one (A - mu*I), `shift()` carries mu, which is then
/// itself a usable eigenvalue estimate.
class NearSingular : public Error {
public:
    explicit NearSingular(double min_pivot, std::optional<double> shift = std::nullopt)
        : Error(describe(min_pivot, shift)), min_pivot_(min_pivot), shift_(shift) {}

    NearSingular(std::string message, double min_pivot, std::optional<double> shift)
        : Error(std::move(message)), min_pivot_(min_pivot), shift_(shift) {}

    double min_pivot() const noexcept { return min_pivot_; }
    std::optional<double> shift() const noexcept { return shift_; }

private:
    static std::string describe(double min_pivot, std::optional<double> shift) {
        std::string msg = "matrix is numerically singular (smallest pivot magnitude " + std::to_string(min_pivot) + ")";
        if (shift) {
            msg += "; shift " + std::to_string(*shift) + " is numerically an eigenvalue and may be used as the estimate";
        }
        return msg;
    }

    double min_pivot_;
    std::optional<double> shift_;
};

/// An iteration could not continue (iterate annihilated, singular shifted solve far from convergence).
class Breakdown : public Error {
public:
    using Error::Error;
};

/// QR iteration on a companion matrix never reached a certified real triangular form.
class NoRealConvergence : public Error {
public:
    NoRealConvergence(std::string message, std::vector<double> off_diagonal)
        : Error(std::move(message)), off_diagonal_(std::move(off_diagonal)) {}

    /// Subdiagonal mass of every QR iterate, in iteration order.
    const std::vector<double>& off_diagonal() const noexcept { return off_diagonal_; }

private:
    std::vector<double> off_diagonal_;
};

/// Convergence-order fit had too few usable error samples.
class InsufficientSamples : public Error {
public:
    explicit InsufficientSamples(std::size_t usable)
        : Error("too few usable error samples for an order fit (" + std::to_string(usable) + ")"), usable_(usable) {}

    std::size_t usable() const noexcept { return usable_; }

private:
    std::size_t usable_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what, const std::string& source = {})
        : Error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + what),
          line_(line),
          detail_(what) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}
};

}  // namespace eigiter
