#pragma once

// Command-line dispatch for the validate, solve, sweep, simulate and
// convergence verbs. Exit codes: 0 success, 1 domain or check failure,
// 2 usage or parse error.

#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "levy_radner/config.hpp"
#include "levy_radner/equilibrium.hpp"
#include "levy_radner/errors.hpp"
#include "levy_radner/rep_benchmark.hpp"
#include "levy_radner/simulator.hpp"

namespace levy_radner {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

struct CliOptions {
    std::string verb;
    std::string config_path;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<long long> paths;
    std::optional<int> grid;
    std::optional<double> perturb_psi;
    std::optional<std::string> dump_paths;
    std::size_t dump_count = 10;
};

namespace detail {

class UsageError : public Error {
public:
    using Error::Error;
};

inline SimConfig effective_sim(const RunConfig& cfg, const CliOptions& o) {
    SimConfig s = cfg.sim.value_or(SimConfig{});
    if (o.seed) s.seed = *o.seed;
    if (o.paths) {
        if (*o.paths < 1) throw UsageError("--paths must be at least 1");
        s.n_paths = static_cast<std::size_t>(*o.paths);
    }
    if (o.grid) {
        if (*o.grid < 1) throw UsageError("--grid must be at least 1");
        s.n_grid = *o.grid;
    }
    if (o.perturb_psi) s.perturb_psi = *o.perturb_psi;
    return s;
}

inline int write_output(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return kExitOk;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + path);
    f << text;
    return kExitOk;
}

inline std::string json_text(const json& j) { return j.dump(2) + "\n"; }

inline int cmd_validate(const RunConfig& cfg, std::string& text) {
    const auto v = validate_config(cfg);
    text = json_text(validation_to_json(v));
    return v.ok() ? kExitOk : kExitFailure;
}

inline int cmd_solve(const RunConfig& cfg, const std::string& format, std::string& text) {
    const auto eq = solve_equilibrium(cfg.economy, cfg.rootfind);
    const auto rep = solve_rep(cfg.economy);
    const auto imp = impacts(cfg.economy, eq, rep);
    if (format == "csv") {
        std::ostringstream os;
        os << "quantity,value\n";
        auto row = [&](const std::string& k, double v) { os << k << ',' << format_double(v) << '\n'; };
        row("lambda", eq.lambda);
        row("r", eq.r);
        row("lambda_rep", rep.lambda_rep);
        row("r_rep", rep.r_rep);
        row("delta_r", imp.delta_r);
        row("delta_lambda", imp.delta_lambda);
        row("mu_over_A", eq.mu_over_A());
        for (std::size_t k = 0; k < eq.theta_star.size(); ++k) {
            row("theta_star_" + std::to_string(k + 1), eq.theta_star[k]);
            row("g_" + std::to_string(k + 1), eq.g[k]);
        }
        text = os.str();
    } else {
        text = json_text(solution_to_json(cfg.economy, eq, rep, imp, cfg.output.time_points));
    }
    return kExitOk;
}

inline void require_sweep_ready(const RunConfig& cfg) {
    if (!cfg.sweep) throw ParseError("config has no sweep section");
    const auto problems = sweep_problems(cfg);
    if (!problems.empty()) throw StructuralError(problems.front());
}

inline json sweep_rows_json(const std::vector<SweepRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"rho", r.rho},
                       {"I", r.I},
                       {"tau", r.tau},
                       {"r", r.r},
                       {"r_rep", r.r_rep},
                       {"delta_r", r.delta_r},
                       {"lambda", r.lambda},
                       {"lambda_rep", r.lambda_rep},
                       {"delta_lambda", r.delta_lambda}});
    return arr;
}

inline int cmd_sweep(const RunConfig& cfg, const std::string& format, std::string& text) {
    require_sweep_ready(cfg);
    const auto rows = run_sweep(cfg.economy, *cfg.sweep, cfg.rootfind);
    if (format == "json") {
        text = json_text(sweep_rows_json(rows));
    } else {
        std::ostringstream os;
        write_sweep_csv(os, rows);
        text = os.str();
    }
    return kExitOk;
}

inline int cmd_convergence(const RunConfig& cfg, const std::string& format, std::string& text) {
    require_sweep_ready(cfg);
    const auto rows = run_convergence(cfg.economy, *cfg.sweep, cfg.rootfind);
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"rho", r.rho},
                           {"tau", r.tau},
                           {"I", r.I},
                           {"metric", r.metric},
                           {"value_I", r.value_I},
                           {"value_2I", r.value_2I},
                           {"abs_change", r.abs_change},
                           {"rel_change", r.rel_change}});
        text = json_text(arr);
    } else {
        std::ostringstream os;
        write_convergence_csv(os, rows);
        text = os.str();
    }
    return kExitOk;
}

inline int cmd_simulate(const RunConfig& cfg, const CliOptions& o, std::string& text) {
    const SimConfig sim = effective_sim(cfg, o);
    const auto eq = solve_equilibrium(cfg.economy, cfg.rootfind);
    const auto rep = solve_rep(cfg.economy);
    const auto report = verify_equilibrium_mc(cfg.economy, eq, rep, sim);
    text = json_text(report_to_json(report));

    if (o.dump_paths) {
        std::ofstream f(*o.dump_paths, std::ios::binary);
        if (!f) throw UsageError("cannot open dump file " + *o.dump_paths);
        const auto grid = make_grid(cfg.economy.T, sim.n_grid, {0.5 * cfg.economy.T});
        const JumpSampler sampler(cfg.economy.measure, cfg.economy.T);
        const ExpIntegrand psi = pricing_integrand(eq, sim.perturb_psi);
        write_path_csv_header(f, static_cast<std::size_t>(cfg.economy.investors()));
        const std::size_t n = std::min(o.dump_count, sim.n_paths);
        for (std::size_t k = 0; k < n; ++k)
            write_path_csv(f, evolve_paths(cfg.economy, eq, sampler(path_seed(sim.seed, k)), grid, psi), k);
    }
    return report.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace detail

/// Parses argv and runs one verb. Documents go to `out` (or --out), and
/// diagnostics to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliOptions o;
    CLI::App app{"Incomplete-market Radner equilibrium with Levy jumps", "levy_radner_cli"};
    app.add_option("verb", o.verb, "validate | solve | sweep | simulate | convergence")
        ->required()
        ->check(CLI::IsMember({"validate", "solve", "sweep", "simulate", "convergence"}));
    app.add_option("--config", o.config_path, "JSON configuration file")->required();
    app.add_option("--out", o.out_path, "output file (default: standard output)");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--paths", o.paths, "number of Monte Carlo paths");
    app.add_option("--grid", o.grid, "grid intervals per path");
    app.add_option("--perturb-psi", o.perturb_psi, "shift of the pricing exponent (negative control)");
    app.add_option("--dump-paths", o.dump_paths, "write per-path CSV for the first paths");
    app.add_option("--dump-count", o.dump_count, "number of paths written by --dump-paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig cfg = load_config(o.config_path);
        const bool tabular = o.verb == "sweep" || o.verb == "convergence";
        std::string format = o.format.value_or(cfg.output.format);
        if (format.empty()) format = tabular ? "csv" : "json";
        const std::string path = o.out_path.value_or(cfg.output.path);

        std::string text;
        int code = kExitOk;
        if (o.verb == "validate")
            code = detail::cmd_validate(cfg, text);
        else if (o.verb == "solve")
            code = detail::cmd_solve(cfg, format, text);
        else if (o.verb == "sweep")
            code = detail::cmd_sweep(cfg, format, text);
        else if (o.verb == "convergence")
            code = detail::cmd_convergence(cfg, format, text);
        else
            code = detail::cmd_simulate(cfg, o, text);
        detail::write_output(text, path, out);
        return code;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const detail::UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace levy_radner
