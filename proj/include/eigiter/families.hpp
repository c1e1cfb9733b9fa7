#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dense.hpp"
#include "qr.hpp"

// Seeded matrix families used by the bench mode and the test suites. These are constructed
// inputs, not reference data.

namespace eigiter::families {

inline Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& e : m.entries()) e = g(rng);
    return m;
}

/// Q factor of a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
    return qr_decompose(gaussian(n, n, seed)).q;
}

/// (G + Gᵀ)/2 for a seeded Gaussian G.
inline Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
    Matrix g = gaussian(n, n, seed);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (g(i, j) + g(j, i));
    return s;
}

/// Q·diag(eigs)·Qᵀ with a seeded orthogonal Q, symmetrized exactly. Column i of `basis`
/// (when requested) is the eigenvector for eigs[i].
inline Matrix with_spectrum(std::span<const double> eigs, std::uint64_t seed, Matrix* basis = nullptr) {
    const std::size_t n = eigs.size();
    const Matrix q = random_orthogonal(n, seed);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < n; ++k) s += q(i, k) * eigs[k] * q(j, k);
            a(i, j) = s;
            a(j, i) = s;
        }
    }
    if (basis) *basis = q;
    return a;
}

/// Eigenvalues r^0, r^1, ..., r^(n-1): every consecutive magnitude ratio equals r.
inline std::vector<double> geometric_spectrum(std::size_t n, double ratio) {
    std::vector<double> eigs(n);
    double v = 1.0;
    for (double& e : eigs) {
        e = v;
        v *= ratio;
    }
    return eigs;
}

/// Random-signed spectrum, decreasing in magnitude, with every consecutive magnitude ratio
/// drawn from [lo, hi] and leading magnitude `top`.
inline std::vector<double> gapped_spectrum(std::size_t n, double lo, double hi, std::uint64_t seed, double top = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ratio(lo, hi);
    std::bernoulli_distribution negative(0.5);
    std::vector<double> eigs(n);
    double mag = top;
    for (double& e : eigs) {
        e = negative(rng) ? -mag : mag;
        mag *= ratio(rng);
    }
    return eigs;
}

struct BenchFamily {
    std::string name;
    Matrix matrix;
};

/// Bench inputs: rotated diagonals with gap ratios 0.9, 0.5, 0.1, a symmetrized Gaussian, and a
/// near-degenerate spectrum with |λ1|/|λ2| = 1.01.
inline std::vector<BenchFamily> bench_families(std::size_t n, std::uint64_t seed) {
    std::vector<BenchFamily> out;
    for (double r : {0.9, 0.5, 0.1}) {
        const auto eigs = geometric_spectrum(n, r);
        out.push_back({"gap-" + std::to_string(r).substr(0, 3), with_spectrum(eigs, seed)});
    }
    out.push_back({"random-symmetric", random_symmetric(n, seed)});
    std::vector<double> near = geometric_spectrum(n, 0.5);
    near[0] = 1.01;
    near[1] = 1.0;
    out.push_back({"near-degenerate", with_spectrum(near, seed)});
    return out;
}

}  // namespace eigiter::families
