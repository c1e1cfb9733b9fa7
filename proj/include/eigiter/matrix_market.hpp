#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dense.hpp"

namespace eigiter {

struct MatrixMarketOptions {
    /// Either dimension above this is refused before any allocation.
    std::size_t max_dim = 10000;
};

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline double parse_real(std::string_view tok, std::size_t line) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "invalid number '" + std::string(tok) + "'");
    }
    if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
    return v;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line, "invalid integer '" + std::string(tok) + "'");
    }
    return v;
}

inline bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace detail

/// Reads a real Matrix Market stream (array or coordinate; general, symmetric or
/// skew-symmetric) into a dense matrix. Symmetric storage is mirrored to full.
inline Matrix parse_matrix_market(std::istream& in, const MatrixMarketOptions& opts = {}) {
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw ParseError(1, "empty input, expected a %%MatrixMarket header");
    ++lineno;
    const auto head = detail::split_ws(line);
    if (head.size() != 5 || detail::lowercase(std::string(head[0])) != "%%matrixmarket") {
        throw ParseError(lineno, "malformed header, expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    }
    const std::string object = detail::lowercase(std::string(head[1]));
    const std::string format = detail::lowercase(std::string(head[2]));
    const std::string field = detail::lowercase(std::string(head[3]));
    const std::string symmetry = detail::lowercase(std::string(head[4]));
    if (object != "matrix") throw ParseError(lineno, "unsupported object '" + object + "'");
    if (format != "array" && format != "coordinate") throw ParseError(lineno, "unsupported format '" + format + "'");
    if (field != "real" && field != "double" && field != "integer") {
        throw ParseError(lineno, "unsupported field '" + field + "' (only real and integer)");
    }
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
        throw ParseError(lineno, "unsupported symmetry '" + symmetry + "'");
    }
    const bool coordinate = format == "coordinate";
    const bool general = symmetry == "general";
    const double mirror_sign = symmetry == "skew-symmetric" ? -1.0 : 1.0;

    auto next_data_line = [&](std::vector<std::string_view>& toks) {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '%' || detail::is_blank(line)) continue;
            toks = detail::split_ws(line);
            return true;
        }
        return false;
    };

    std::vector<std::string_view> toks;
    if (!next_data_line(toks)) throw ParseError(lineno + 1, "missing size line");
    if (toks.size() != (coordinate ? 3u : 2u)) throw ParseError(lineno, "malformed size line");
    const std::size_t rows = detail::parse_count(toks[0], lineno);
    const std::size_t cols = detail::parse_count(toks[1], lineno);
    if (rows == 0 || cols == 0) throw ParseError(lineno, "dimensions must be positive");
    if (rows > opts.max_dim || cols > opts.max_dim) {
        throw ParseError(lineno, "dimension " + std::to_string(std::max(rows, cols)) + " exceeds the limit of " +
                                     std::to_string(opts.max_dim));
    }
    if (!general && rows != cols) throw ParseError(lineno, "symmetric storage requires a square matrix");

    Matrix m(rows, cols);
    if (coordinate) {
        const std::size_t nnz = detail::parse_count(toks[2], lineno);
        for (std::size_t e = 0; e < nnz; ++e) {
            if (!next_data_line(toks)) {
                throw ParseError(lineno + 1, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(e));
            }
            if (toks.size() != 3) throw ParseError(lineno, "expected 'row col value'");
            const std::size_t i = detail::parse_count(toks[0], lineno);
            const std::size_t j = detail::parse_count(toks[1], lineno);
            const double v = detail::parse_real(toks[2], lineno);
            if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(lineno, "index out of range");
            m(i - 1, j - 1) += v;
            if (!general && i != j) m(j - 1, i - 1) += mirror_sign * v;
        }
    } else {
        // Column-major; symmetric storage lists the lower triangle only.
        for (std::size_t j = 0; j < cols; ++j) {
            for (std::size_t i = general ? 0 : j; i < rows; ++i) {
                if (!general && mirror_sign < 0 && i == j) continue;
                if (!next_data_line(toks)) throw ParseError(lineno + 1, "too few entries for a " + std::to_string(rows) +
                                                                            "x" + std::to_string(cols) + " array");
                if (toks.size() != 1) throw ParseError(lineno, "expected one value per line");
                const double v = detail::parse_real(toks[0], lineno);
                m(i, j) = v;
                if (!general && i != j) m(j, i) = mirror_sign * v;
            }
        }
    }
    if (next_data_line(toks)) throw ParseError(lineno, "unexpected trailing data");
    return m;
}

inline Matrix read_matrix_market(const std::string& path, const MatrixMarketOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    try {
        return parse_matrix_market(in, opts);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path);
    }
}

/// "%.17g" rendering; round-trips every finite double exactly.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes the dense array form, column-major, every value with 17 significant digits.
inline void write_matrix_market(std::ostream& out, const Matrix& m) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) out << format_real(m(i, j)) << '\n';
}

inline void write_matrix_market(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    write_matrix_market(out, m);
    if (!out) throw IoError(path, "write failed");
}

}  // namespace eigiter
