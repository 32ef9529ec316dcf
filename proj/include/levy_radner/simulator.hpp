#pragma once

// Exact event-driven simulation of compound-Poisson economies and Monte
// Carlo verification of the equilibrium: market clearing, the optimality
// condition, martingale densities, boundary conditions at the horizon, and
// the risk-neutral price representation.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levy_radner/equilibrium.hpp"
#include "levy_radner/errors.hpp"
#include "levy_radner/measure.hpp"
#include "levy_radner/parallel.hpp"
#include "levy_radner/rep_benchmark.hpp"

namespace levy_radner {

struct SimConfig {
    std::size_t n_paths = 10000;
    int n_grid = 256;  // grid intervals on [0, T]
    std::uint64_t seed = 1;
    double perturb_psi = 0.0;  // negative control; 0 disables

    void validate() const {
        if (n_paths < 1) throw StructuralError("n_paths must be at least 1");
        if (n_grid < 1) throw StructuralError("n_grid must be at least 1");
    }
};

struct JumpPath {
    std::vector<double> times;  // increasing, in (0, T)
    std::vector<Eigen::VectorXd> marks;
};

/// splitmix64 finaliser: independent per-path seeds from (seed, index).
inline std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Draws compound-Poisson jump paths: Poisson(kappa T) count, uniform order
/// statistics for the times, marks i.i.d. from nu / kappa.
class JumpSampler {
public:
    JumpSampler(const LevyMeasure& m, double T) : measure_(&m), T_(T) {
        const double mass = m.total_mass();
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw UnsupportedMeasure("exact simulation needs a measure with finite positive total mass");
        if (!(T > 0.0)) throw StructuralError("horizon must be positive");
        if (m.is_gaussian()) {
            Eigen::LLT<Eigen::MatrixXd> llt(m.gaussian().cov.entries);
            if (llt.info() != Eigen::Success) throw StructuralError("covariance not positive definite");
            chol_ = llt.matrixL();
        } else {
            for (const auto& a : m.atomic().atoms) weights_.push_back(a.weight);
        }
    }

    JumpSampler(LevyMeasure&&, double) = delete;

    JumpPath operator()(std::uint64_t seed) const {
        std::mt19937_64 rng(seed);
        std::poisson_distribution<long> count(measure_->total_mass() * T_);
        const long n = count(rng);
        JumpPath out;
        out.times.resize(static_cast<std::size_t>(n));
        std::uniform_real_distribution<double> unif(0.0, T_);
        for (auto& t : out.times) {
            do {
                t = unif(rng);
            } while (t <= 0.0);
        }
        std::sort(out.times.begin(), out.times.end());
        out.marks.reserve(static_cast<std::size_t>(n));
        if (measure_->is_gaussian()) {
            std::normal_distribution<double> normal;
            const auto d = chol_.rows();
            for (long k = 0; k < n; ++k) {
                Eigen::VectorXd e(d);
                for (Eigen::Index j = 0; j < d; ++j) e(j) = normal(rng);
                out.marks.push_back(chol_ * e);
            }
        } else {
            std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
            const auto& atoms = measure_->atomic().atoms;
            for (long k = 0; k < n; ++k) out.marks.push_back(atoms[pick(rng)].mark);
        }
        return out;
    }

private:
    const LevyMeasure* measure_;
    double T_;
    Eigen::MatrixXd chol_;
    std::vector<double> weights_;
};

inline JumpPath simulate_jumps(const LevyMeasure& m, double T, std::uint64_t seed) {
    return JumpSampler(m, T)(seed);
}

/// n intervals on [0, T], optionally forcing extra times onto the grid.
inline std::vector<double> make_grid(double T, int n, std::vector<double> extra = {}) {
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) g[static_cast<std::size_t>(k)] = T * k / n;
    g.back() = T;
    for (double t : extra) {
        if (!std::binary_search(g.begin(), g.end(), t)) g.insert(std::upper_bound(g.begin(), g.end(), t), t);
    }
    return g;
}

inline void check_grid(const std::vector<double>& grid, double T) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != T)
        throw GridError("grid must start at 0 and end at T");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw GridError("grid must be strictly increasing");
}

/// log Z^psi on the grid: -t int psi dnu + sum_{t_k <= t} log(1 + psi(z_k)).
/// The value at T is the left limit.
inline std::vector<double> log_density_path(const LevyMeasure& m, const ExpIntegrand& psi, const JumpPath& jumps,
                                            const std::vector<double>& grid) {
    const double mass = psi.mass(m);
    std::vector<double> out(grid.size());
    double jump_sum = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid[j];
        while (k < jumps.times.size() && jumps.times[k] <= t && jumps.times[k] < grid.back()) {
            const double arg = psi.exponent.dot(jumps.marks[k]);
            jump_sum += psi.shift == 0.0 ? arg : std::log(std::exp(arg) + psi.shift);
            ++k;
        }
        out[j] = -t * mass + jump_sum;
    }
    return out;
}

/// Z^psi on the grid (exact stochastic exponential for finite activity).
inline std::vector<double> density_path(const LevyMeasure& m, const ExpIntegrand& psi, const JumpPath& jumps,
                                        const std::vector<double>& grid) {
    if (!psi.above_minus_one()) throw StructuralError("integrand must stay above -1");
    auto z = log_density_path(m, psi, jumps, grid);
    for (auto& v : z) v = std::exp(v);
    return z;
}

enum class FlowMethod {
    Exact,     // closed-form flow of X/A between jumps
    Midpoint,  // second-order quadrature of the same flow, for convergence checks
};

struct PathBundle {
    std::vector<double> grid;
    JumpPath jumps;
    std::vector<double> D, S, S0;
    std::vector<double> Z;  // density of the integrand passed to evolve_paths
    std::vector<std::vector<double>> Y, X, c, bond;  // [investor][grid]
};

namespace detail {

struct FlowCoefficients {
    double beta_D = 0.0;                 // dividend drift between jumps
    std::vector<double> beta_Y;          // income drifts between jumps
    double mu_over_A = 0.0;
};

inline FlowCoefficients flow_coefficients(const EconomyParams& p, const Equilibrium& eq) {
    FlowCoefficients f;
    const double m0 = mean_z0(p.measure);
    f.beta_D = p.mu_D - p.sigma_D * m0;
    f.mu_over_A = eq.mu_over_A();
    for (int i = 1; i <= p.investors(); ++i) {
        const auto k = static_cast<std::size_t>(i - 1);
        f.beta_Y.push_back(p.mu[k] - p.sigma[k] * mean_coordinate(p.measure, i));
    }
    return f;
}

}  // namespace detail

/// Price from the conditional-expectation representation:
/// S_t = A(t) D_t + (mu_D - mu/A) H(t).
inline double price_from_dividend(const EconomyParams& p, const Equilibrium& eq, double t, double D) {
    return eq.annuity(t) * D + (p.mu_D - eq.mu_over_A()) * eq.annuity.ramp(t);
}

/// Evolves dividend, incomes, optimal wealth and consumption, bond holdings
/// and prices along one jump path. Optimal wealth is tracked through
/// w = X/A, whose drift between jumps is -tau g (H/A)' - tau g + theta
/// (mu/A - sigma_D m0) and which jumps by theta sigma_D z0.
inline PathBundle evolve_paths(const EconomyParams& p, const Equilibrium& eq, const JumpPath& jumps,
                               const std::vector<double>& grid, const ExpIntegrand& psi,
                               FlowMethod method = FlowMethod::Exact) {
    check_grid(grid, p.T);
    const int n = p.investors();
    const auto coef = detail::flow_coefficients(p, eq);
    const double m0 = mean_z0(p.measure);

    PathBundle out;
    out.grid = grid;
    out.jumps = jumps;
    const auto ng = grid.size();
    out.D.resize(ng);
    out.S.resize(ng);
    out.S0.resize(ng);
    out.Y.assign(static_cast<std::size_t>(n), std::vector<double>(ng));
    out.X = out.c = out.bond = out.Y;
    out.Z = density_path(p.measure, psi, jumps, grid);

    std::vector<ConsumptionPolicy> policy;
    for (int i = 1; i <= n; ++i) policy.push_back(consumption_policy(p, eq, i));

    const double S_0 = price_from_dividend(p, eq, 0.0, p.D0);
    const double A_0 = eq.annuity(0.0);
    std::vector<double> w0(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < w0.size(); ++k) w0[k] = (p.endow_bond[k] + p.endow_stock[k] * S_0) / A_0;

    // Closed-form deterministic part of w: F_i(t).
    auto flow = [&](std::size_t k, double t) {
        return -p.tau[k] * eq.g[k] * (eq.annuity.ramp_ratio(t) + t) +
               eq.theta_star[k] * (coef.mu_over_A - p.sigma_D * m0) * t;
    };
    // dw/dt = -tau g H/A^2 + theta (mu/A - sigma_D m0), evaluated inside (0, T).
    auto rate = [&](std::size_t k, double t) {
        const double a = eq.annuity(t);
        return -p.tau[k] * eq.g[k] * eq.annuity.ramp(t) / (a * a) +
               eq.theta_star[k] * (coef.mu_over_A - p.sigma_D * m0);
    };

    std::vector<double> w = w0;
    Eigen::VectorXd J = Eigen::VectorXd::Zero(n + 1);  // cumulative marks
    double now = 0.0;
    auto advance = [&](double to) {
        if (method == FlowMethod::Midpoint && to > now) {
            const double mid = 0.5 * (now + to);
            for (std::size_t k = 0; k < w.size(); ++k) w[k] += (to - now) * rate(k, mid);
        }
        now = to;
    };

    std::size_t next = 0;
    for (std::size_t j = 0; j < ng; ++j) {
        const double t = grid[j];
        while (next < jumps.times.size() && jumps.times[next] <= t && jumps.times[next] < p.T) {
            advance(jumps.times[next]);
            const auto& z = jumps.marks[next];
            J += z;
            for (std::size_t k = 0; k < w.size(); ++k) w[k] += eq.theta_star[k] * p.sigma_D * z(0);
            ++next;
        }
        advance(t);

        const double D = p.D0 + coef.beta_D * t + p.sigma_D * J(0);
        const double A = eq.annuity(t);
        const double S = price_from_dividend(p, eq, t, D);
        const double S0 = std::exp(eq.r * t);
        out.D[j] = D;
        out.S[j] = S;
        out.S0[j] = S0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const int i = static_cast<int>(k) + 1;
            double ratio = w[k];
            if (method == FlowMethod::Exact)
                ratio = w0[k] + flow(k, t) - flow(k, 0.0) + eq.theta_star[k] * p.sigma_D * J(0);
            const double X = A * ratio;
            out.Y[k][j] = p.Y0[k] + coef.beta_Y[k] * t + p.sigma[k] * J(i);
            out.X[k][j] = X;
            out.c[k][j] = policy[k].eval_ratio(t, ratio);
            out.bond[k][j] = (X - eq.theta_star[k] * S) / S0;
        }
    }
    return out;
}

inline PathBundle evolve_paths(const EconomyParams& p, const Equilibrium& eq, const JumpPath& jumps,
                               const std::vector<double>& grid, FlowMethod method = FlowMethod::Exact) {
    return evolve_paths(p, eq, jumps, grid, eq.psi_star, method);
}

/// int_t^T e^{-r(s-t)} D_s ds along a path; D is affine between jumps.
inline double discounted_dividends(const EconomyParams& p, const Equilibrium& eq, const JumpPath& jumps, double t) {
    const double beta = p.mu_D - p.sigma_D * mean_z0(p.measure);
    double J0 = 0.0;
    std::size_t k = 0;
    while (k < jumps.times.size() && jumps.times[k] <= t) J0 += jumps.marks[k++](0);
    double a = t;
    double total = 0.0;
    auto segment = [&](double from, double to) {
        const double Da = p.D0 + beta * from + p.sigma_D * J0;
        const double L = to - from;
        total += std::exp(-eq.r * (from - t)) *
                 (Da * annuity_factor(eq.r, L) + beta * discounted_ramp(eq.r, L));
    };
    for (; k < jumps.times.size(); ++k) {
        segment(a, jumps.times[k]);
        a = jumps.times[k];
        J0 += jumps.marks[k](0);
    }
    segment(a, p.T);
    return total;
}

/// Integrand used as the pricing measure. A non-zero perturbation shifts the
/// coordinate-0 exponent, which breaks the sigma-martingale condition.
inline ExpIntegrand pricing_integrand(const Equilibrium& eq, double perturb) {
    if (perturb == 0.0) return eq.psi_star;
    return {Tilt::coordinate0(eq.psi_star.exponent.u0() + perturb), 0.0};
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

inline MeanEstimate estimate_mean(const std::vector<double>& xs) {
    MeanEstimate e;
    if (xs.empty()) return e;
    const double n = static_cast<double>(xs.size());
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double perturb_psi = 0.0;
    std::vector<CheckResult> checks;

    MeanEstimate z_star;
    std::vector<MeanEstimate> z_investor;
    MeanEstimate price_gap_0;    // E[(Z_T/Z_t) PV_t - S_t] at t = 0
    MeanEstimate price_gap_mid;  // same at t = T/2
    double S_0 = 0.0;
    double mean_S_mid = 0.0;
    double max_goods_residual = 0.0;
    double max_bond_residual = 0.0;
    double max_terminal_wealth = 0.0;  // |X_T| / (1 + max |X|)
    double max_foc_deviation = 0.0;
    double max_terminal_price = 0.0;   // |S_T| / (1 + max |S|)

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }

    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

namespace detail {

struct PathStats {
    double goods = 0.0, bond = 0.0, terminal_wealth = 0.0, foc = 0.0, terminal_price = 0.0;
    double z_star = 0.0;
    std::vector<double> z_investor;
    double gap_0 = 0.0, gap_mid = 0.0, S_mid = 0.0;
};

inline CheckResult below(std::string name, double stat, double threshold, std::string detail = {}) {
    return {std::move(name), stat <= threshold, stat, threshold, std::move(detail)};
}

// |mean - target| within 3 standard errors; the floor absorbs rounding when
// the estimator is (numerically) deterministic.
inline CheckResult within_3se(std::string name, const MeanEstimate& e, double target, double floor) {
    const double dev = std::abs(e.mean - target);
    const double thr = 3.0 * e.std_error + floor;
    std::ostringstream os;
    os << "mean=" << e.mean << " se=" << e.std_error << " target=" << target;
    return {std::move(name), dev <= thr, dev, thr, os.str()};
}

}  // namespace detail

/// Simulates cfg.n_paths paths and checks every equilibrium property on
/// each path and in aggregate. Failures are reported, never thrown.
inline VerificationReport verify_equilibrium_mc(const EconomyParams& p, const Equilibrium& eq, const RepBenchmark& rep,
                                                const SimConfig& cfg) {
    (void)rep;
    cfg.validate();
    const int n = p.investors();
    const double T = p.T;
    const double t_mid = 0.5 * T;
    const auto grid = make_grid(T, cfg.n_grid, {t_mid});
    const auto j_mid = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t_mid) - grid.begin());
    const ExpIntegrand psi_q = pricing_integrand(eq, cfg.perturb_psi);
    const JumpSampler sampler(p.measure, T);
    const double S_0 = price_from_dividend(p, eq, 0.0, p.D0);

    std::vector<detail::PathStats> stats(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](std::size_t idx) {
        const JumpPath jumps = sampler(path_seed(cfg.seed, idx));
        const PathBundle b = evolve_paths(p, eq, jumps, grid, psi_q);
        auto& s = stats[idx];
        const auto ng = grid.size();
        double max_S = 0.0;
        for (std::size_t j = 0; j < ng; ++j) {
            double c_sum = 0.0, bond_sum = 0.0;
            for (int k = 0; k < n; ++k) {
                c_sum += b.c[static_cast<std::size_t>(k)][j];
                bond_sum += b.bond[static_cast<std::size_t>(k)][j];
            }
            s.goods = std::max(s.goods, std::abs(c_sum - b.D[j]));
            s.bond = std::max(s.bond, std::abs(bond_sum));
            max_S = std::max(max_S, std::abs(b.S[j]));
        }
        s.terminal_price = std::abs(b.S.back()) / (1.0 + max_S);

        s.z_investor.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const auto& X = b.X[ku];
            double max_X = 0.0;
            for (double x : X) max_X = std::max(max_X, std::abs(x));
            s.terminal_wealth = std::max(s.terminal_wealth, std::abs(X.back()) / (1.0 + max_X));

            // U'(c + Y) S0 / Z^{psi_i} must be constant along the path.
            const auto logz = log_density_path(p.measure, eq.psi_i[ku], jumps, grid);
            const double tau = p.tau[ku];
            auto level = [&](std::size_t j) { return -(b.c[ku][j] + b.Y[ku][j]) / tau + eq.r * grid[j] - logz[j]; };
            const double l0 = level(0);
            for (std::size_t j = 1; j < ng; ++j) s.foc = std::max(s.foc, std::abs(std::expm1(level(j) - l0)));
            s.z_investor[ku] = std::exp(logz.back());
        }

        s.z_star = b.Z.back();
        s.gap_0 = b.Z.back() * discounted_dividends(p, eq, jumps, 0.0) - b.S.front();
        s.gap_mid = b.Z.back() / b.Z[j_mid] * discounted_dividends(p, eq, jumps, t_mid) - b.S[j_mid];
        s.S_mid = b.S[j_mid];
    });

    VerificationReport rep_out;
    rep_out.n_paths = cfg.n_paths;
    rep_out.seed = cfg.seed;
    rep_out.perturb_psi = cfg.perturb_psi;
    rep_out.S_0 = S_0;

    std::vector<double> zs, g0, gm, smid;
    std::vector<std::vector<double>> zi(static_cast<std::size_t>(n));
    for (const auto& s : stats) {
        rep_out.max_goods_residual = std::max(rep_out.max_goods_residual, s.goods);
        rep_out.max_bond_residual = std::max(rep_out.max_bond_residual, s.bond);
        rep_out.max_terminal_wealth = std::max(rep_out.max_terminal_wealth, s.terminal_wealth);
        rep_out.max_foc_deviation = std::max(rep_out.max_foc_deviation, s.foc);
        rep_out.max_terminal_price = std::max(rep_out.max_terminal_price, s.terminal_price);
        zs.push_back(s.z_star);
        g0.push_back(s.gap_0);
        gm.push_back(s.gap_mid);
        smid.push_back(s.S_mid);
        for (std::size_t k = 0; k < zi.size(); ++k) zi[k].push_back(s.z_investor[k]);
    }
    rep_out.z_star = estimate_mean(zs);
    for (const auto& v : zi) rep_out.z_investor.push_back(estimate_mean(v));
    rep_out.price_gap_0 = estimate_mean(g0);
    rep_out.price_gap_mid = estimate_mean(gm);
    rep_out.mean_S_mid = estimate_mean(smid).mean;

    auto& checks = rep_out.checks;
    checks.push_back(detail::below("goods_clearing", rep_out.max_goods_residual, 1e-9, "max |sum c - D|"));
    const double stock = std::abs(std::accumulate(eq.theta_star.begin(), eq.theta_star.end(), 0.0) - 1.0);
    checks.push_back(detail::below("stock_clearing", stock, 1e-10, "|sum theta - 1|"));
    checks.push_back(detail::below("bond_clearing", rep_out.max_bond_residual, 1e-9, "max |sum theta0|"));
    checks.push_back(detail::below("terminal_wealth", rep_out.max_terminal_wealth, 1e-6, "max |X_T| / (1 + max|X|)"));
    checks.push_back(detail::below("foc_ratio", rep_out.max_foc_deviation, 1e-8, "max relative drift of U'(c+Y) S0 / Z"));
    checks.push_back(detail::within_3se("martingale_psi_star", rep_out.z_star, 1.0, 1e-12));
    for (int k = 0; k < n; ++k)
        checks.push_back(detail::within_3se("martingale_psi_" + std::to_string(k + 1),
                                            rep_out.z_investor[static_cast<std::size_t>(k)], 1.0, 1e-12));
    checks.push_back(detail::below("terminal_price", rep_out.max_terminal_price, 1e-6, "|S_T-| / (1 + max|S|)"));
    const double price_floor = 1e-12 * (1.0 + std::abs(S_0));
    checks.push_back(detail::within_3se("price_t0", rep_out.price_gap_0, 0.0, price_floor));
    checks.push_back(detail::within_3se("price_t_half", rep_out.price_gap_mid, 0.0, price_floor));

    // Sigma-martingale condition for the pricing integrand and each psi_i.
    const double target = -eq.mu_over_A() / p.sigma_D;
    double c3 = std::abs(psi_q.z0_moment(p.measure) - target);
    for (const auto& psi : eq.psi_i) c3 = std::max(c3, std::abs(psi.z0_moment(p.measure) - target));
    checks.push_back(detail::below("sigma_martingale_condition", c3, 1e-8, "max |int psi z0 dnu + mu/(sigma_D A)|"));
    return rep_out;
}

/// Wealth of the linear bridge dX = ((r - 1/A) X + m) dt + A c int z0 dN~
/// at time t < T, in closed form up to two smooth quadratures.
///
/// X_t = A(t) [X_0/A(0) + int_0^t m/A du + sum c(t_k) z0_k - m0 int_0^t c du]
/// with int_0^t du/A = r t + log(A(0)/A(t)).
inline double bridge_wealth(double r, double T, const std::function<double(double)>& m,
                            const std::function<double(double)>& c, double m0, double x0, const JumpPath& jumps,
                            double t) {
    if (!(t >= 0.0 && t < T)) throw DomainError("bridge evaluated outside [0, T)");
    const Annuity A{r, T};
    const double mT = m(T);
    // Composite Simpson on smooth integrands.
    auto simpson = [&](auto&& f) {
        const int panels = 2000;
        const double h = t / panels;
        double s = f(0.0) + f(t);
        for (int k = 1; k < panels; ++k) s += (k % 2 ? 4.0 : 2.0) * f(k * h);
        return s * h / 3.0;
    };
    const double smooth = t > 0.0 ? simpson([&](double u) {
        const double a = A(u);
        return a > 0.0 ? (m(u) - mT) / a : 0.0;
    }) : 0.0;
    const double log_part = mT * (r * t + std::log(A(0.0) / A(t)));
    const double comp = t > 0.0 ? simpson(c) : 0.0;
    double jumps_sum = 0.0;
    for (std::size_t k = 0; k < jumps.times.size() && jumps.times[k] <= t; ++k)
        jumps_sum += c(jumps.times[k]) * jumps.marks[k](0);
    return A(t) * (x0 / A(0.0) + smooth + log_part + jumps_sum - m0 * comp);
}

/// One row per grid time: path, t, D, S, S0, Z, then Y_i, X_i, c_i, theta0_i.
inline void write_path_csv_header(std::ostream& os, std::size_t investors) {
    os << "path,t,D,S,S0,Z";
    for (const char* q : {"Y", "X", "c", "theta0"})
        for (std::size_t k = 0; k < investors; ++k) os << ',' << q << (k + 1);
    os << '\n';
}

inline void write_path_csv(std::ostream& os, const PathBundle& b, std::size_t path_index) {
    const auto n = b.Y.size();
    const auto old_precision = os.precision(17);
    for (std::size_t j = 0; j < b.grid.size(); ++j) {
        os << path_index << ',' << b.grid[j] << ',' << b.D[j] << ',' << b.S[j] << ',' << b.S0[j] << ',' << b.Z[j];
        for (const auto* q : {&b.Y, &b.X, &b.c, &b.bond})
            for (std::size_t k = 0; k < n; ++k) os << ',' << (*q)[k][j];
        os << '\n';
    }
    os.precision(old_precision);
}

}  // namespace levy_radner
