#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "convergence.hpp"
#include "eigen_iter.hpp"
#include "eigen_multi.hpp"
#include "matrix_market.hpp"
#include "poly.hpp"

namespace eigiter {

using Json = nlohmann::ordered_json;

struct MatrixDescriptor {
    std::string path;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool symmetric = false;
};

/// Everything one CLI run emits. `config` echoes the invocation so it can be replayed.
struct RunReport {
    std::string method;
    std::optional<MatrixDescriptor> input;
    Json config = Json::object();
    Json result = Json::object();
    IterationTrace trace;
    std::optional<ConvergenceEstimate> convergence;
    /// Only serialized when set, so default output stays byte-identical across runs.
    std::optional<double> wall_time_seconds;
};

namespace detail {

inline void dump_value(std::ostream& out, const Json& j, int depth);

inline bool is_flat(const Json& j) {
    for (const auto& e : j) {
        if (e.is_structured()) return false;
    }
    return true;
}

inline void dump_value(std::ostream& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close(static_cast<std::size_t>(depth) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out << "null";
                break;
            }
            std::string s = format_real(v);
            if (s.find_first_of(".eE") == std::string::npos) s += ".0";
            out << s;
            break;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                break;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad << Json(it.key()).dump() << ": ";
                dump_value(out, it.value(), depth + 1);
            }
            out << '\n' << close << '}';
            break;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                break;
            }
            if (is_flat(j)) {
                out << '[';
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out << ", ";
                    dump_value(out, j[i], depth + 1);
                }
                out << ']';
                break;
            }
            out << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ",\n";
                out << pad;
                dump_value(out, j[i], depth + 1);
            }
            out << '\n' << close << ']';
            break;
        }
        default:
            out << j.dump();
    }
}

}  // namespace detail

/// Pretty JSON with insertion-ordered keys and every float printed with 17 significant digits.
inline std::string dump_json(const Json& j) {
    std::ostringstream out;
    detail::dump_value(out, j, 0);
    out << '\n';
    return out.str();
}

template <std::floating_point T>
Json to_json(const Vector<T>& v) {
    Json a = Json::array();
    for (T e : v) a.push_back(static_cast<double>(e));
    return a;
}

template <std::floating_point T>
Json to_json(const EigenPair<T>& p) {
    Json j;
    j["value"] = static_cast<double>(p.value);
    j["vector"] = to_json(p.vector);
    j["residual"] = static_cast<double>(p.residual);
    j["iterations"] = p.iterations;
    j["converged"] = p.converged;
    return j;
}

template <std::floating_point T>
Json to_json(const EigenDecomposition<T>& d) {
    Json j;
    j["values"] = Json::array();
    for (T v : d.values) j["values"].push_back(static_cast<double>(v));
    j["vectors"] = Json::array();
    for (std::size_t c = 0; c < d.vectors.cols(); ++c) j["vectors"].push_back(to_json(d.vectors.column(c)));
    j["residuals"] = Json::array();
    for (T r : d.residuals) j["residuals"].push_back(static_cast<double>(r));
    j["iterations"] = d.iterations;
    j["converged"] = d.converged;
    return j;
}

inline Json to_json(const EquivalenceReport& r) {
    Json j;
    j["passed"] = r.passed;
    j["frobenius_norm"] = r.frobenius_norm;
    j["tolerance"] = r.tolerance;
    j["similarity_bound"] = r.similarity_bound;
    j["orthogonal_bound"] = r.orthogonal_bound;
    j["steps"] = Json::array();
    for (const auto& s : r.steps) {
        Json e;
        e["k"] = s.k;
        e["a_deviation"] = s.a_deviation;
        e["q_deviation"] = s.q_deviation;
        e["r_deviation"] = s.r_deviation;
        e["power_defect_simultaneous"] = s.power_defect_simultaneous;
        e["power_defect_qr"] = s.power_defect_qr;
        e["similarity_defect_simultaneous"] = s.similarity_defect_simultaneous;
        e["similarity_defect_qr"] = s.similarity_defect_qr;
        e["power_bound"] = s.power_bound;
        e["passed"] = s.passed;
        j["steps"].push_back(std::move(e));
    }
    return j;
}

template <std::floating_point T>
Json to_json(const PolyRoots<T>& r) {
    Json j;
    j["roots"] = Json::array();
    for (T x : r.roots) j["roots"].push_back(static_cast<double>(x));
    j["residuals"] = Json::array();
    for (T x : r.residuals) j["residuals"].push_back(static_cast<double>(x));
    j["iterations"] = r.iterations;
    j["converged"] = true;
    return j;
}

inline Json to_json(const ConvergenceEstimate& e) {
    Json j;
    j["order"] = e.order;
    j["rate"] = e.rate ? Json(*e.rate) : Json(nullptr);
    j["r_squared"] = e.r_squared;
    j["samples_used"] = e.samples_used;
    return j;
}

inline Json to_json(const RunReport& r) {
    Json j;
    j["method"] = r.method;
    if (r.input) {
        j["input"] = Json{{"path", r.input->path},
                          {"rows", r.input->rows},
                          {"cols", r.input->cols},
                          {"symmetric", r.input->symmetric}};
    } else {
        j["input"] = nullptr;
    }
    j["config"] = r.config;
    j["result"] = r.result;
    Json summary;
    summary["steps"] = r.trace.size();
    if (!r.trace.empty()) {
        summary["first_residual"] = r.trace.steps.front().residual;
        summary["last_residual"] = r.trace.steps.back().residual;
        summary["last_lambda"] = r.trace.steps.back().lambda;
    }
    j["trace_summary"] = std::move(summary);
    j["convergence"] = r.convergence ? to_json(*r.convergence) : Json(nullptr);
    if (r.wall_time_seconds) j["metadata"] = Json{{"wall_time_seconds", *r.wall_time_seconds}};
    return j;
}

/// CSV with header `k,lambda,residual,step_change`, floats at 17 significant digits.
inline void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
    out << "k,lambda,residual,step_change\n";
    for (const auto& s : trace.steps) {
        out << s.k << ',' << format_real(s.lambda) << ',' << format_real(s.residual) << ','
            << format_real(s.step_change) << '\n';
    }
}

/// Writes the JSON report and/or the CSV trace; empty paths are skipped.
inline void write_report(const RunReport& report, const std::string& json_path, const std::string& csv_trace_path) {
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw IoError(json_path, "cannot open for writing");
        out << dump_json(to_json(report));
        if (!out) throw IoError(json_path, "write failed");
    }
    if (!csv_trace_path.empty()) {
        std::ofstream out(csv_trace_path);
        if (!out) throw IoError(csv_trace_path, "cannot open for writing");
        write_trace_csv(out, report.trace);
        if (!out) throw IoError(csv_trace_path, "write failed");
    }
}

}  // namespace eigiter
