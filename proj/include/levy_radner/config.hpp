#pragma once

// Run configuration (JSON), result documents, and the correlation sweep.

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "levy_radner/equilibrium.hpp"
#include "levy_radner/errors.hpp"
#include "levy_radner/measure.hpp"
#include "levy_radner/parallel.hpp"
#include "levy_radner/rep_benchmark.hpp"
#include "levy_radner/simulator.hpp"

namespace levy_radner {

using json = nlohmann::json;

/// Correlation sweep over the family sigma_D = scale * I, sigma_i = const,
/// tau_i = tau, flat rho.
struct SweepConfig {
    double rho_min = 0.0;
    double rho_max = 0.999;
    int n_points = 50;
    std::vector<int> I_values{64};
    std::vector<double> tau_values{0.5, 1.0 / 3.0, 0.25};
    double sigma_D_per_investor = 0.2;
    double sigma_i = 0.1;
    double mu_i = 0.0;

    std::vector<double> rho_grid() const {
        std::vector<double> g;
        for (int k = 0; k < n_points; ++k)
            g.push_back(n_points == 1 ? rho_min : rho_min + (rho_max - rho_min) * k / (n_points - 1));
        if (n_points > 1) g.back() = rho_max;
        return g;
    }
};

struct OutputConfig {
    std::string format;  // empty: json, or csv for sweep and convergence
    std::string path = "-";
    int time_points = 10;  // intervals for sampling A and mu in solve output
};

struct RunConfig {
    EconomyParams economy;
    RootFindConfig rootfind;
    std::optional<SimConfig> sim;
    std::optional<SweepConfig> sweep;
    OutputConfig output;
};

namespace detail {

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParseError("missing required field " + where + "." + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("field " + where + "." + key + " has the wrong type: " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("field " + where + "." + key + " has the wrong type: " + e.what());
    }
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// Measure block. `base_dir` resolves a relative atom CSV path.
inline LevyMeasure parse_measure(const json& j, int dim, const std::string& base_dir = {}) {
    const auto type = detail::get_required<std::string>(j, "type", "measure");
    if (type == "gaussian") {
        GaussianCompoundPoisson g;
        g.intensity = detail::get_or<double>(j, "intensity", 1.0, "measure");
        if (j.contains("covariance")) {
            const auto rows = detail::get_required<std::vector<std::vector<double>>>(j, "covariance", "measure");
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.size()) throw ParseError("measure.covariance must be square");
                for (std::size_t c = 0; c < rows.size(); ++c)
                    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
            g.cov = {std::move(m), std::nullopt};
        } else {
            g.cov = JumpCovariance::flat(dim, detail::get_or<double>(j, "rho", 0.0, "measure"));
        }
        return g;
    }
    if (type == "atomic") {
        if (j.contains("csv")) {
            auto path = detail::get_required<std::string>(j, "csv", "measure");
            if (!path.empty() && path.front() != '/' && !base_dir.empty()) path = base_dir + "/" + path;
            std::ifstream in(path);
            if (!in) throw ParseError("cannot open atom CSV " + path);
            return read_atoms_csv(in);
        }
        if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ParseError("measure.atoms must be an array");
        AtomicMeasure a;
        for (const auto& item : j.at("atoms")) {
            Atom atom;
            atom.weight = detail::get_required<double>(item, "weight", "measure.atoms[]");
            atom.mark = detail::to_vector(detail::get_required<std::vector<double>>(item, "mark", "measure.atoms[]"));
            a.atoms.push_back(std::move(atom));
        }
        return a;
    }
    throw ParseError("measure.type must be gaussian or atomic, got " + type);
}

inline json measure_to_json(const LevyMeasure& m) {
    json j;
    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        j["type"] = "gaussian";
        j["intensity"] = g.intensity;
        if (g.cov.flat_rho) {
            j["rho"] = *g.cov.flat_rho;
        } else {
            json rows = json::array();
            for (Eigen::Index r = 0; r < g.cov.entries.rows(); ++r)
                rows.push_back(detail::to_std(g.cov.entries.row(r).transpose()));
            j["covariance"] = rows;
        }
        return j;
    }
    j["type"] = "atomic";
    json atoms = json::array();
    for (const auto& a : m.atomic().atoms) atoms.push_back({{"weight", a.weight}, {"mark", detail::to_std(a.mark)}});
    j["atoms"] = atoms;
    return j;
}

inline EconomyParams parse_economy(const json& j, const std::string& base_dir = {}) {
    if (!j.is_object()) throw ParseError("economy must be an object");
    const std::string w = "economy";
    EconomyParams p;
    p.tau = detail::get_required<std::vector<double>>(j, "tau", w);
    const auto n = p.tau.size();
    p.sigma = detail::get_required<std::vector<double>>(j, "sigma", w);
    p.mu = detail::get_or<std::vector<double>>(j, "mu", std::vector<double>(n, 0.0), w);
    p.sigma_D = detail::get_required<double>(j, "sigma_D", w);
    p.mu_D = detail::get_or<double>(j, "mu_D", 0.0, w);
    p.T = detail::get_required<double>(j, "T", w);
    p.D0 = detail::get_or<double>(j, "D0", 0.0, w);
    p.Y0 = detail::get_or<std::vector<double>>(j, "Y0", std::vector<double>(n, 0.0), w);
    p.endow_stock = detail::get_required<std::vector<double>>(j, "endow_stock", w);
    p.endow_bond = detail::get_required<std::vector<double>>(j, "endow_bond", w);
    if (!j.contains("measure")) throw ParseError("missing required field economy.measure");
    p.measure = parse_measure(j.at("measure"), static_cast<int>(n) + 1, base_dir);
    return p;
}

inline json economy_to_json(const EconomyParams& p) {
    return {{"tau", p.tau},       {"sigma", p.sigma},   {"mu", p.mu},
            {"sigma_D", p.sigma_D}, {"mu_D", p.mu_D},   {"T", p.T},
            {"D0", p.D0},         {"Y0", p.Y0},         {"endow_stock", p.endow_stock},
            {"endow_bond", p.endow_bond}, {"measure", measure_to_json(p.measure)}};
}

inline RunConfig parse_config(const json& j, const std::string& base_dir = {}) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    RunConfig cfg;
    if (!j.contains("economy")) throw ParseError("missing required section economy");
    cfg.economy = parse_economy(j.at("economy"), base_dir);

    if (j.contains("rootfind")) {
        const auto& r = j.at("rootfind");
        cfg.rootfind.abs_tol = detail::get_or<double>(r, "abs_tol", cfg.rootfind.abs_tol, "rootfind");
        cfg.rootfind.max_iter = detail::get_or<int>(r, "max_iter", cfg.rootfind.max_iter, "rootfind");
        cfg.rootfind.initial_bracket_halfwidth = detail::get_or<double>(
            r, "initial_bracket_halfwidth", cfg.rootfind.initial_bracket_halfwidth, "rootfind");
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        SimConfig sim;
        const auto paths = detail::get_or<long long>(s, "n_paths", static_cast<long long>(sim.n_paths), "sim");
        if (paths < 1) throw ParseError("sim.n_paths must be at least 1");
        sim.n_paths = static_cast<std::size_t>(paths);
        sim.n_grid = detail::get_or<int>(s, "n_grid", sim.n_grid, "sim");
        if (sim.n_grid < 1) throw ParseError("sim.n_grid must be at least 1");
        sim.seed = detail::get_or<std::uint64_t>(s, "seed", sim.seed, "sim");
        sim.perturb_psi = detail::get_or<double>(s, "perturb_psi", 0.0, "sim");
        cfg.sim = sim;
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        SweepConfig sw;
        sw.rho_min = detail::get_or<double>(s, "rho_min", sw.rho_min, "sweep");
        sw.rho_max = detail::get_or<double>(s, "rho_max", sw.rho_max, "sweep");
        sw.n_points = detail::get_or<int>(s, "n_points", sw.n_points, "sweep");
        sw.I_values = detail::get_or<std::vector<int>>(s, "I_values", sw.I_values, "sweep");
        sw.tau_values = detail::get_or<std::vector<double>>(s, "tau_values", sw.tau_values, "sweep");
        sw.sigma_D_per_investor =
            detail::get_or<double>(s, "sigma_D_per_investor", sw.sigma_D_per_investor, "sweep");
        sw.sigma_i = detail::get_or<double>(s, "sigma_i", sw.sigma_i, "sweep");
        sw.mu_i = detail::get_or<double>(s, "mu_i", sw.mu_i, "sweep");
        if (sw.n_points < 1) throw ParseError("sweep.n_points must be at least 1");
        cfg.sweep = sw;
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        cfg.output.format = detail::get_or<std::string>(o, "format", cfg.output.format, "output");
        cfg.output.path = detail::get_or<std::string>(o, "path", cfg.output.path, "output");
        cfg.output.time_points = detail::get_or<int>(o, "time_points", cfg.output.time_points, "output");
    }
    if (!cfg.output.format.empty() && cfg.output.format != "json" && cfg.output.format != "csv")
        throw ParseError("output.format must be json or csv");
    if (cfg.output.time_points < 1) throw ParseError("output.time_points must be at least 1");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    const auto slash = path.find_last_of('/');
    return parse_config(j, slash == std::string::npos ? std::string{} : path.substr(0, slash));
}

inline json config_to_json(const RunConfig& c) {
    json j;
    j["economy"] = economy_to_json(c.economy);
    j["rootfind"] = {{"abs_tol", c.rootfind.abs_tol},
                     {"max_iter", c.rootfind.max_iter},
                     {"initial_bracket_halfwidth", c.rootfind.initial_bracket_halfwidth}};
    if (c.sim)
        j["sim"] = {{"n_paths", c.sim->n_paths},
                    {"n_grid", c.sim->n_grid},
                    {"seed", c.sim->seed},
                    {"perturb_psi", c.sim->perturb_psi}};
    if (c.sweep)
        j["sweep"] = {{"rho_min", c.sweep->rho_min},
                      {"rho_max", c.sweep->rho_max},
                      {"n_points", c.sweep->n_points},
                      {"I_values", c.sweep->I_values},
                      {"tau_values", c.sweep->tau_values},
                      {"sigma_D_per_investor", c.sweep->sigma_D_per_investor},
                      {"sigma_i", c.sweep->sigma_i},
                      {"mu_i", c.sweep->mu_i}};
    j["output"] = {{"format", c.output.format}, {"path", c.output.path}, {"time_points", c.output.time_points}};
    return j;
}

/// Shortest round-trip decimal text, independent of the global locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return res.ec == std::errc{} ? std::string(buf, res.ptr) : std::string("nan");
}

// ---------------------------------------------------------------------------
// Validation

struct ConfigValidation {
    ValidationReport measure;
    std::vector<std::string> economy_problems;
    std::vector<std::string> other_problems;

    bool ok() const { return measure.ok() && economy_problems.empty() && other_problems.empty(); }
};

inline std::vector<std::string> sweep_problems(const RunConfig& c) {
    std::vector<std::string> out;
    if (!c.sweep) return out;
    const auto& m = c.economy.measure;
    if (!m.is_gaussian() || !m.gaussian().cov.flat_rho)
        out.emplace_back("sweep requires a gaussian measure with a flat rho");
    for (int I : c.sweep->I_values) {
        if (I < 1) {
            out.emplace_back("sweep I_values must be positive");
            continue;
        }
        const double lo = -1.0 / I;
        if (!(c.sweep->rho_min > lo && c.sweep->rho_max < 1.0 && c.sweep->rho_min <= c.sweep->rho_max))
            out.push_back("sweep rho range not positive definite for I=" + std::to_string(I));
    }
    for (double t : c.sweep->tau_values)
        if (!(t > 0.0)) out.emplace_back("sweep tau_values must be positive");
    if (!(c.sweep->sigma_D_per_investor > 0.0) || !(c.sweep->sigma_i > 0.0))
        out.emplace_back("sweep volatilities must be positive");
    return out;
}

inline ConfigValidation validate_config(const RunConfig& c) {
    ConfigValidation v;
    v.measure = validate_assumption1(c.economy.measure);
    v.economy_problems = c.economy.problems();
    try {
        c.rootfind.validate();
    } catch (const Error& e) {
        v.other_problems.emplace_back(e.what());
    }
    auto sw = sweep_problems(c);
    v.other_problems.insert(v.other_problems.end(), sw.begin(), sw.end());
    return v;
}

inline json validation_to_json(const ConfigValidation& v) {
    json conds = json::array();
    for (const auto& c : v.measure.conditions)
        conds.push_back({{"id", c.id}, {"passed", c.passed}, {"message", c.message}});
    return {{"ok", v.ok()},
            {"measure_conditions", conds},
            {"economy_problems", v.economy_problems},
            {"other_problems", v.other_problems}};
}

// ---------------------------------------------------------------------------
// Result documents

inline json solution_to_json(const EconomyParams& p, const Equilibrium& eq, const RepBenchmark& rep,
                             const ImpactReport& imp, int time_points) {
    json grid = json::array();
    for (int k = 0; k <= time_points; ++k) {
        const double t = p.T * k / time_points;
        grid.push_back({{"t", t},
                        {"A", eq.annuity(t)},
                        {"mu", eq.drift_mu(t)},
                        {"A_rep", rep.annuity_rep(t)},
                        {"mu_rep", rep.drift_mu_rep(t)}});
    }
    json psi_i = json::array();
    for (const auto& psi : eq.psi_i)
        psi_i.push_back({{"u0", psi.exponent.u0()}, {"ui", psi.exponent.ui()}});
    const auto d = diagnose(p, eq);
    return {
        {"economy", economy_to_json(p)},
        {"equilibrium",
         {{"lambda", eq.lambda},
          {"r", eq.r},
          {"theta_star", eq.theta_star},
          {"g", eq.g},
          {"mu_over_A", eq.mu_over_A()},
          {"sharpe_residual", eq.sharpe_residual},
          {"psi_star_exponent", eq.psi_star.exponent.u0()},
          {"psi_i_exponents", psi_i}}},
        {"benchmark",
         {{"r_rep", rep.r_rep},
          {"lambda_rep", rep.lambda_rep},
          {"tau_sigma", rep.tau_sigma},
          {"mu_over_A_rep", rep.drift_mu_rep.ratio()},
          {"psi_rep_exponent", detail::to_std(rep.psi_rep.exponent.dense_vector())}}},
        {"impacts",
         {{"delta_r", imp.delta_r}, {"delta_r_direct", imp.delta_r_direct}, {"delta_lambda", imp.delta_lambda}}},
        {"diagnostics",
         {{"stock_clearing", d.stock_clearing},
          {"sharpe_residual", d.sharpe_residual},
          {"drift_ratio_spread", d.drift_ratio_spread},
          {"annuity_at_horizon", d.annuity_at_horizon},
          {"psi_star_condition", d.psi_star_condition},
          {"psi_i_condition", d.psi_i_condition},
          {"clearing_identity", d.clearing_identity}}},
        {"time_grid", grid},
    };
}

inline json report_to_json(const VerificationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"statistic", c.statistic},
                          {"threshold", c.threshold},
                          {"detail", c.detail}});
    json zi = json::array();
    for (const auto& z : r.z_investor) zi.push_back({{"mean", z.mean}, {"std_error", z.std_error}});
    return {{"all_passed", r.all_passed()},
            {"n_paths", r.n_paths},
            {"seed", r.seed},
            {"perturb_psi", r.perturb_psi},
            {"checks", checks},
            {"z_star", {{"mean", r.z_star.mean}, {"std_error", r.z_star.std_error}}},
            {"z_investor", zi},
            {"price_gap_t0", {{"mean", r.price_gap_0.mean}, {"std_error", r.price_gap_0.std_error}}},
            {"price_gap_t_half", {{"mean", r.price_gap_mid.mean}, {"std_error", r.price_gap_mid.std_error}}},
            {"S_0", r.S_0},
            {"mean_S_t_half", r.mean_S_mid}};
}

// ---------------------------------------------------------------------------
// Correlation sweep

struct SweepRow {
    double rho = 0.0;
    int I = 0;
    double tau = 0.0;
    double r = 0.0, r_rep = 0.0, delta_r = 0.0;
    double lambda = 0.0, lambda_rep = 0.0, delta_lambda = 0.0;
    double delta_r_direct = 0.0;
};

/// Economy of the sweep family for one (rho, I, tau) cell.
inline EconomyParams sweep_economy(const EconomyParams& base, const SweepConfig& sw, double rho, int I, double tau) {
    EconomyParams p;
    const auto n = static_cast<std::size_t>(I);
    p.tau.assign(n, tau);
    p.sigma.assign(n, sw.sigma_i);
    p.mu.assign(n, sw.mu_i);
    p.sigma_D = sw.sigma_D_per_investor * I;
    p.mu_D = base.mu_D;
    p.T = base.T;
    p.D0 = base.D0;
    p.Y0.assign(n, 0.0);
    p.endow_stock.assign(n, 1.0 / I);
    p.endow_bond.assign(n, 0.0);
    const double intensity = base.measure.is_gaussian() ? base.measure.gaussian().intensity : 1.0;
    p.measure = GaussianCompoundPoisson{JumpCovariance::flat(I + 1, rho), intensity};
    return p;
}

inline SweepRow solve_cell(const EconomyParams& p, double rho, double tau, const RootFindConfig& rf) {
    const auto eq = solve_equilibrium(p, rf);
    const auto rep = solve_rep(p);
    const auto imp = impacts(p, eq, rep);
    return {rho, p.investors(), tau, imp.r, imp.r_rep, imp.delta_r, imp.lambda, imp.lambda_rep, imp.delta_lambda,
            imp.delta_r_direct};
}

/// All cells, ordered by (tau, I, rho) with tau and I in configuration order.
inline std::vector<SweepRow> run_sweep(const EconomyParams& base, const SweepConfig& sw, const RootFindConfig& rf) {
    struct Cell {
        double rho;
        int I;
        double tau;
    };
    std::vector<Cell> cells;
    const auto rhos = sw.rho_grid();
    for (double tau : sw.tau_values)
        for (int I : sw.I_values)
            for (double rho : rhos) cells.push_back({rho, I, tau});
    std::vector<SweepRow> rows(cells.size());
    parallel_for(cells.size(), [&](std::size_t k) {
        const auto& c = cells[k];
        rows[k] = solve_cell(sweep_economy(base, sw, c.rho, c.I, c.tau), c.rho, c.tau, rf);
    });
    return rows;
}

inline constexpr const char* kSweepHeader = "rho,I,tau,r,r_rep,delta_r,lambda,lambda_rep,delta_lambda";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.rho) << ',' << std::to_string(r.I) << ',' << format_double(r.tau) << ',' << format_double(r.r) << ','
           << format_double(r.r_rep) << ',' << format_double(r.delta_r) << ',' << format_double(r.lambda) << ','
           << format_double(r.lambda_rep) << ',' << format_double(r.delta_lambda) << '\n';
    }
}

struct ConvergenceRow {
    double rho = 0.0;
    double tau = 0.0;
    int I = 0;
    std::string metric;
    double value_I = 0.0, value_2I = 0.0;
    double abs_change = 0.0, rel_change = 0.0;
};

/// |metric(2I) - metric(I)| for every sweep cell and reported metric.
inline std::vector<ConvergenceRow> run_convergence(const EconomyParams& base, const SweepConfig& sw,
                                                   const RootFindConfig& rf) {
    SweepConfig doubled = sw;
    for (auto& I : doubled.I_values) I *= 2;
    const auto a = run_sweep(base, sw, rf);
    const auto b = run_sweep(base, doubled, rf);
    std::vector<ConvergenceRow> out;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& x = a[k];
        const auto& y = b[k];
        const std::pair<const char*, double SweepRow::*> metrics[] = {
            {"r", &SweepRow::r},           {"r_rep", &SweepRow::r_rep},
            {"delta_r", &SweepRow::delta_r}, {"lambda", &SweepRow::lambda},
            {"lambda_rep", &SweepRow::lambda_rep}, {"delta_lambda", &SweepRow::delta_lambda}};
        for (const auto& [name, field] : metrics) {
            ConvergenceRow row{x.rho, x.tau, x.I, name, x.*field, y.*field, 0.0, 0.0};
            row.abs_change = std::abs(row.value_2I - row.value_I);
            const double scale = std::abs(row.value_I);
            row.rel_change = scale > 0.0 ? row.abs_change / scale : (row.abs_change > 0.0 ? INFINITY : 0.0);
            out.push_back(row);
        }
    }
    return out;
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "rho,tau,I,metric,value_I,value_2I,abs_change,rel_change\n";
    for (const auto& r : rows)
        os << format_double(r.rho) << ',' << format_double(r.tau) << ',' << std::to_string(r.I) << ',' << r.metric << ','
           << format_double(r.value_I) << ',' << format_double(r.value_2I) << ',' << format_double(r.abs_change)
           << ',' << format_double(r.rel_change) << '\n';
}

}  // namespace levy_radner
