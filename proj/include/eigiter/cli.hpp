#pragma once

// Command-line front end. Needs CLI11 and nlohmann/json on the include path.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convergence.hpp"
#include "eigen_iter.hpp"
#include "eigen_multi.hpp"
#include "families.hpp"
#include "matrix_market.hpp"
#include "poly.hpp"
#include "report.hpp"

namespace eigiter::cli {

enum ExitCode : int { converged = 0, usage_error = 1, not_converged = 2 };

struct Options {
    std::string command;
    std::string matrix;
    double tol = 1e-10;
    std::size_t max_iters = 10000;
    std::uint64_t seed = 42;
    std::string trace;
    std::string out;
    std::vector<double> start;
    bool allow_unsymmetric = false;
    bool timing = false;
    double shift = 0;
    std::size_t k = 20;
    std::vector<double> coeffs;
    std::size_t size = 8;
};

inline const std::vector<std::string>& matrix_commands() {
    static const std::vector<std::string> c{"power", "inverse", "shifted-inverse", "rqi", "simultaneous", "qr", "equiv"};
    return c;
}

/// Everything needed to rerun the invocation, in a fixed key order.
inline Json config_echo(const Options& o) {
    Json j;
    j["command"] = o.command;
    if (!o.matrix.empty()) j["matrix"] = o.matrix;
    j["tol"] = o.tol;
    j["max_iters"] = o.max_iters;
    j["seed"] = o.seed;
    j["start"] = o.start.empty() ? Json(nullptr) : Json(o.start);
    j["allow_unsymmetric"] = o.allow_unsymmetric;
    if (o.command == "shifted-inverse") j["shift"] = o.shift;
    if (o.command == "equiv") j["k"] = o.k;
    if (o.command == "roots") j["coeffs"] = o.coeffs;
    if (o.command == "bench") j["size"] = o.size;
    return j;
}

/// Arguments (without program name) that reproduce the run described by a config echo.
inline std::vector<std::string> replay_args(const Json& config) {
    auto join = [](const Json& arr) {
        std::string s;
        for (const auto& v : arr) {
            if (!s.empty()) s += ',';
            s += format_real(v.get<double>());
        }
        return s;
    };
    std::vector<std::string> args{config.at("command").get<std::string>()};
    if (config.contains("matrix")) args.insert(args.end(), {"--matrix", config["matrix"].get<std::string>()});
    args.push_back("--tol=" + format_real(config.at("tol").get<double>()));
    args.push_back("--max-iters=" + std::to_string(config.at("max_iters").get<std::size_t>()));
    args.push_back("--seed=" + std::to_string(config.at("seed").get<std::uint64_t>()));
    if (config.contains("start") && !config["start"].is_null()) args.push_back("--start=" + join(config["start"]));
    if (config.value("allow_unsymmetric", false)) args.push_back("--allow-unsymmetric");
    if (config.contains("shift")) args.push_back("--shift=" + format_real(config["shift"].get<double>()));
    if (config.contains("k")) args.push_back("--k=" + std::to_string(config["k"].get<std::size_t>()));
    if (config.contains("coeffs")) args.push_back("--coeffs=" + join(config["coeffs"]));
    if (config.contains("size")) args.push_back("--size=" + std::to_string(config["size"].get<std::size_t>()));
    return args;
}

namespace detail {

inline SolverConfig solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.tol = o.tol;
    cfg.max_iters = o.max_iters;
    cfg.seed = o.seed;
    if (!o.start.empty()) cfg.start = o.start;
    cfg.allow_unsymmetric = o.allow_unsymmetric;
    return cfg;
}

inline std::optional<ConvergenceEstimate> try_estimate(const IterationTrace& trace, double scale) {
    try {
        return estimate_convergence_order(trace, ConvergenceOptions{scale > 0 ? scale : 1.0});
    } catch (const InsufficientSamples&) {
        return std::nullopt;
    }
}

inline Json bench(const Options& o) {
    SolverConfig cfg = solver_config(o);
    cfg.start.reset();
    std::map<std::string, Json> runs;
    for (const auto& fam : families::bench_families(o.size, o.seed)) {
        const Matrix& a = fam.matrix;
        const double scale = frobenius_norm(a);
        auto single = [&](const std::string& method, auto&& solver) {
            Json j;
            j["family"] = fam.name;
            j["method"] = method;
            try {
                SolveResult<double> r = solver();
                j["converged"] = r.pair.converged;
                j["iterations"] = r.pair.iterations;
                j["value"] = r.pair.value;
                j["residual"] = r.pair.residual;
                auto est = try_estimate(r.trace, scale);
                j["convergence"] = est ? to_json(*est) : Json(nullptr);
            } catch (const Error& e) {
                j["converged"] = false;
                j["error"] = e.what();
            }
            runs[fam.name + "/" + method] = std::move(j);
        };
        auto multi = [&](const std::string& method, auto&& solver) {
            Json j;
            j["family"] = fam.name;
            j["method"] = method;
            try {
                MultiRun<double> r = solver();
                j["converged"] = r.result.converged;
                j["iterations"] = r.result.iterations;
                j["value"] = r.result.values.front();
                j["residual"] = *std::max_element(r.result.residuals.begin(), r.result.residuals.end());
                auto est = try_estimate(r.trace, scale);
                j["convergence"] = est ? to_json(*est) : Json(nullptr);
            } catch (const Error& e) {
                j["converged"] = false;
                j["error"] = e.what();
            }
            runs[fam.name + "/" + method] = std::move(j);
        };
        single("power", [&] { return power_iteration(a, cfg); });
        single("inverse", [&] { return inverse_iteration(a, cfg); });
        single("rqi", [&] { return rayleigh_quotient_iteration(a, cfg); });
        multi("simultaneous", [&] { return simultaneous_iteration<double>(a, std::nullopt, cfg); });
        multi("qr", [&] { return qr_iteration(a, cfg); });
    }
    Json out = Json::array();
    for (auto& [key, j] : runs) out.push_back(std::move(j));
    return out;
}

struct Outcome {
    RunReport report;
    bool converged = false;
};

inline Outcome execute(const Options& o) {
    Outcome res;
    RunReport& rep = res.report;
    rep.method = o.command;
    rep.config = config_echo(o);
    const SolverConfig cfg = solver_config(o);
    cfg.validate();

    if (o.command == "roots") {
        if (o.coeffs.empty()) throw UsageError("roots: --coeffs is required");
        const PolyRoots<double> r = poly_roots(MonicPolynomial<double>(o.coeffs), cfg);
        rep.result = to_json(r);
        res.converged = true;
        return res;
    }
    if (o.command == "bench") {
        if (o.size < 2) throw UsageError("bench: --size must be at least 2");
        rep.result = Json{{"families_note", "constructed matrix families (rotated geometric spectra, symmetrized "
                                            "Gaussian, near-degenerate); not reference data"},
                          {"runs", bench(o)}};
        res.converged = true;
        return res;
    }

    const Matrix a = read_matrix_market(o.matrix);
    rep.input = MatrixDescriptor{o.matrix, a.rows(), a.cols(), a.is_square() && is_symmetric(a)};
    const double scale = frobenius_norm(a);

    auto single = [&](const SolveResult<double>& r) {
        rep.result = to_json(r.pair);
        rep.trace = r.trace;
        rep.convergence = try_estimate(r.trace, scale);
        res.converged = r.pair.converged;
    };
    auto multi = [&](const MultiRun<double>& r) {
        rep.result = to_json(r.result);
        rep.trace = r.trace;
        rep.convergence = try_estimate(r.trace, scale);
        res.converged = r.result.converged;
    };

    if (o.command == "power") {
        single(power_iteration(a, cfg));
    } else if (o.command == "inverse") {
        single(inverse_iteration(a, cfg));
    } else if (o.command == "shifted-inverse") {
        single(shifted_inverse_iteration(a, o.shift, cfg));
    } else if (o.command == "rqi") {
        single(rayleigh_quotient_iteration(a, cfg));
    } else if (o.command == "simultaneous") {
        multi(simultaneous_iteration<double>(a, std::nullopt, cfg));
    } else if (o.command == "qr") {
        multi(qr_iteration(a, cfg));
    } else if (o.command == "equiv") {
        const EquivalenceReport r = verify_equivalence(a, o.k, cfg);
        rep.result = to_json(r);
        res.converged = r.passed;
    } else {
        throw UsageError("unknown command '" + o.command + "'");
    }
    return res;
}

}  // namespace detail

/// Runs one CLI invocation. `args` excludes the program name. The JSON report goes to `out`,
/// diagnostics to `err`. Returns 0 when converged, 2 when not, 1 on usage or IO errors.
inline int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Iterative eigensolvers: power, inverse, shifted inverse, Rayleigh quotient, simultaneous and QR "
                 "iteration, plus companion-matrix polynomial roots.",
                 "eigiter"};
    app.require_subcommand(1, 1);

    auto shared = [&](CLI::App* sub, bool needs_matrix) {
        if (needs_matrix) sub->add_option("--matrix", o.matrix, "Matrix Market input file")->required();
        sub->add_option("--tol", o.tol, "Convergence tolerance")->capture_default_str();
        sub->add_option("--max-iters", o.max_iters, "Iteration limit")->capture_default_str();
        sub->add_option("--seed", o.seed, "Seed for random starting vectors")->capture_default_str();
        sub->add_option("--trace", o.trace, "Write the iteration trace as CSV");
        sub->add_option("--out", o.out, "Also write the JSON report to this file");
        sub->add_option("--start", o.start, "Explicit starting vector, comma separated")->delimiter(',');
        sub->add_flag("--allow-unsymmetric", o.allow_unsymmetric, "Skip the symmetry check (unsupported territory)");
        sub->add_flag("--timing", o.timing, "Add wall time to the report (output is then not reproducible)");
    };

    std::map<std::string, CLI::App*> subs;
    subs["power"] = app.add_subcommand("power", "Power iteration (dominant eigenpair)");
    subs["inverse"] = app.add_subcommand("inverse", "Inverse iteration (smallest |eigenvalue|)");
    subs["shifted-inverse"] = app.add_subcommand("shifted-inverse", "Inverse iteration with a fixed shift");
    subs["rqi"] = app.add_subcommand("rqi", "Rayleigh quotient iteration (symmetric input)");
    subs["simultaneous"] = app.add_subcommand("simultaneous", "Simultaneous iteration (all eigenpairs)");
    subs["qr"] = app.add_subcommand("qr", "Unshifted QR method (all eigenpairs)");
    subs["equiv"] = app.add_subcommand("equiv", "Compare simultaneous iteration and the QR method step by step");
    subs["roots"] = app.add_subcommand("roots", "Real roots of a monic polynomial via its companion matrix");
    subs["bench"] = app.add_subcommand("bench", "Run every solver over the constructed matrix families");
    for (const auto& name : matrix_commands()) shared(subs[name], true);
    shared(subs["roots"], false);
    shared(subs["bench"], false);
    subs["shifted-inverse"]->add_option("--shift", o.shift, "Shift mu")->required();
    subs["equiv"]->add_option("--k", o.k, "Number of iterations to compare")->capture_default_str();
    subs["roots"]->add_option("--coeffs", o.coeffs, "a0,a1,...,a_{n-1} of z^n + ... + a0")
        ->delimiter(',')
        ->required();
    subs["bench"]->add_option("--size", o.size, "Matrix dimension")->capture_default_str();

    std::vector<std::string> argv_store{"eigiter"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return converged;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& [name, sub] : subs) {
            if (sub->parsed()) {
                err << sub->help();
                return usage_error;
            }
        }
        err << app.help();
        return usage_error;
    }
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) o.command = name;
    }

    const auto t0 = std::chrono::steady_clock::now();
    detail::Outcome outcome;
    try {
        outcome = detail::execute(o);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const Error& e) {
        // Numerical failure: still a well-formed report, marked not converged.
        err << "error: " << e.what() << '\n';
        outcome.report.method = o.command;
        outcome.report.config = config_echo(o);
        if (!o.matrix.empty()) {
            const Matrix a = read_matrix_market(o.matrix);
            outcome.report.input = MatrixDescriptor{o.matrix, a.rows(), a.cols(), a.is_square() && is_symmetric(a)};
        }
        outcome.report.result = Json{{"converged", false}, {"error", e.what()}};
        if (const auto* nrc = dynamic_cast<const NoRealConvergence*>(&e)) {
            outcome.report.result["off_diagonal"] = nrc->off_diagonal();
        }
        outcome.converged = false;
    }
    if (o.timing) {
        outcome.report.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    try {
        out << dump_json(to_json(outcome.report));
        write_report(outcome.report, o.out, o.trace);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    if (!outcome.converged) err << o.command << ": did not converge\n";
    return outcome.converged ? converged : not_converged;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(std::span<const std::string>(args), out, err);
}

}  // namespace eigiter::cli
