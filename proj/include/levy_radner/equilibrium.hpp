#pragma once

// Closed-form Radner equilibrium for exponential investors: Sharpe ratio,
// stock holdings, interest rate, annuity, drift, and the martingale-measure
// integrands of the individual and aggregate problems.

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "levy_radner/errors.hpp"
#include "levy_radner/measure.hpp"
#include "levy_radner/tilt_inverse.hpp"

namespace levy_radner {

struct EconomyParams {
    std::vector<double> tau;    // risk tolerances
    std::vector<double> sigma;  // income volatilities
    std::vector<double> mu;     // income drifts
    double sigma_D = 1.0;
    double mu_D = 0.0;
    double T = 1.0;
    double D0 = 0.0;
    std::vector<double> Y0;
    std::vector<double> endow_stock;  // sums to 1
    std::vector<double> endow_bond;   // sums to 0
    LevyMeasure measure = GaussianCompoundPoisson{JumpCovariance::identity(2), 1.0};

    int investors() const { return static_cast<int>(tau.size()); }
    double tau_sigma() const { return std::accumulate(tau.begin(), tau.end(), 0.0); }

    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        const auto n = tau.size();
        if (n == 0) out.emplace_back("economy needs at least one investor");
        auto same = [&](const std::vector<double>& v, const char* name) {
            if (v.size() != n) out.push_back(std::string(name) + " must have one entry per investor");
        };
        same(sigma, "sigma");
        same(mu, "mu");
        same(Y0, "Y0");
        same(endow_stock, "endow_stock");
        same(endow_bond, "endow_bond");
        for (double t : tau)
            if (!(t > 0.0) || !std::isfinite(t)) {
                out.emplace_back("tau entries must be positive");
                break;
            }
        for (double s : sigma)
            if (!(s > 0.0) || !std::isfinite(s)) {
                out.emplace_back("sigma entries must be positive");
                break;
            }
        if (!(sigma_D > 0.0) || !std::isfinite(sigma_D)) out.emplace_back("sigma_D must be positive");
        if (!(T > 0.0) || !std::isfinite(T)) out.emplace_back("horizon T must be positive");
        if (endow_stock.size() == n &&
            std::abs(std::accumulate(endow_stock.begin(), endow_stock.end(), 0.0) - 1.0) > 1e-12)
            out.emplace_back("stock endowments must sum to 1");
        if (endow_bond.size() == n && std::abs(std::accumulate(endow_bond.begin(), endow_bond.end(), 0.0)) > 1e-12)
            out.emplace_back("bond endowments must sum to 0");
        if (measure.dim() != static_cast<int>(n) + 1)
            out.emplace_back("jump measure dimension must equal investors + 1");
        return out;
    }

    void require_valid() const {
        auto p = problems();
        if (!p.empty()) {
            std::string msg = "invalid economy:";
            for (const auto& s : p) msg += " " + s + ";";
            throw StructuralError(msg);
        }
        levy_radner::require_valid(measure);
    }
};

// ---------------------------------------------------------------------------
// Discounting kernels on the remaining horizon h = T - t.

/// int_0^h e^{-r v} dv.
inline double annuity_factor(double r, double h) {
    if (std::abs(r) <= 1e-10) return h;
    return -std::expm1(-r * h) / r;
}

/// int_0^h e^{-r v} v dv.
inline double discounted_ramp(double r, double h) {
    const double x = r * h;
    if (std::abs(x) < 0.5) {
        // sum_k (-x)^k / (k! (k+2)) times h^2
        double term = 1.0, sum = 0.5;
        for (int k = 1; k < 40; ++k) {
            term *= -x / k;
            const double add = term / (k + 2);
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum * h * h;
    }
    return (-std::expm1(-x) - x * std::exp(-x)) / (r * r);
}

/// A(t) = int_t^T e^{-r(s-t)} ds.
struct Annuity {
    double r = 0.0;
    double T = 1.0;

    double operator()(double t) const {
        if (t > T * (1.0 + 1e-14)) throw DomainError("annuity evaluated past the horizon");
        return annuity_factor(r, std::max(T - t, 0.0));
    }

    /// H(t) = int_t^T e^{-r(s-t)} (s-t) ds.
    double ramp(double t) const {
        if (t > T * (1.0 + 1e-14)) throw DomainError("annuity evaluated past the horizon");
        return discounted_ramp(r, std::max(T - t, 0.0));
    }

    /// H(t)/A(t), extended by its limit 0 at t = T.
    double ramp_ratio(double t) const {
        const double h = std::max(T - t, 0.0);
        if (h == 0.0) return 0.0;
        return discounted_ramp(r, h) / annuity_factor(r, h);
    }
};

inline Annuity annuity(double r, double T) { return {r, T}; }

/// mu(t) = lambda sqrt(s2) sigma_D A(t).
struct DriftMu {
    double lambda = 0.0;
    double sqrt_s2 = 1.0;
    double sigma_D = 1.0;
    Annuity A;

    double operator()(double t) const { return ratio() * A(t); }
    /// The constant mu(t)/A(t).
    double ratio() const { return lambda * sqrt_s2 * sigma_D; }
};

inline DriftMu drift_mu(double lambda, double sigma_D, double s2, const Annuity& A) {
    return {lambda, std::sqrt(s2), sigma_D, A};
}

/// psi(z) = e^{b.z} - 1 + shift, a martingale-measure integrand.
struct ExpIntegrand {
    Tilt exponent = Tilt::coordinate0(0.0);
    double shift = 0.0;

    double operator()(const Eigen::VectorXd& z) const { return std::expm1(exponent.dot(z)) + shift; }

    /// int psi dnu.
    double mass(const LevyMeasure& m) const {
        const double k = m.total_mass();
        return exponential_moment(m, exponent) - k + shift * k;
    }

    /// int psi(z) z^(0) nu(dz).
    double z0_moment(const LevyMeasure& m) const {
        const double m0 = mean_z0(m);
        return tilted_mean_z0(m, exponent) - m0 + shift * m0;
    }

    /// Infimum of psi over the support, for the psi > -1 condition.
    bool above_minus_one() const { return shift >= 0.0; }
};

/// Investor i's tilt b_i = -(theta_i sigma_D e_0 + sigma_i e_i) / tau_i.
inline Tilt investor_tilt(const EconomyParams& p, double theta_i, int i) {
    const double tau = p.tau[static_cast<std::size_t>(i - 1)];
    return Tilt::pair(-theta_i * p.sigma_D / tau, i, -p.sigma[static_cast<std::size_t>(i - 1)] / tau);
}

inline MonotoneTiltMap investor_tilt_map(const EconomyParams& p, int i) {
    return MonotoneTiltMap(p.measure, i, -p.sigma[static_cast<std::size_t>(i - 1)] / p.tau[static_cast<std::size_t>(i - 1)]);
}

struct SharpeSolution {
    double lambda = 0.0;
    double residual = 0.0;  // sigma_D + sum tau_i f^i(...) at lambda
};

/// lambda solving sigma_D + sum_i tau_i f^i(-lambda sqrt(s2) + m0) = 0.
///
/// The left side is strictly decreasing in lambda, so the root is bracketed
/// from +-10 by doubling and bisected to full double precision. Each
/// evaluation inverts every investor's tilt map at cfg.abs_tol.
inline SharpeSolution solve_sharpe(const EconomyParams& p, const RootFindConfig& cfg = {}) {
    cfg.validate();
    p.require_valid();
    const double s2 = second_moment_z0(p.measure);
    const double m0 = mean_z0(p.measure);
    const double sqrt_s2 = std::sqrt(s2);

    std::vector<MonotoneTiltMap> maps;
    maps.reserve(p.tau.size());
    for (int i = 1; i <= p.investors(); ++i) maps.push_back(investor_tilt_map(p, i));

    auto lhs = [&](double lambda) {
        const double y = -lambda * sqrt_s2 + m0;
        double s = p.sigma_D;
        for (std::size_t k = 0; k < maps.size(); ++k) s += p.tau[k] * phi_invert(maps[k], y, cfg);
        return s;
    };
    const double lambda =
        solve_increasing([&](double l) { return -lhs(l); }, 0.0, 10.0, 0.0, std::max(cfg.max_iter, 200));
    return {lambda, lhs(lambda)};
}

/// theta*_i = -(tau_i / sigma_D) f^i(-lambda sqrt(s2) + m0).
inline std::vector<double> solve_theta_star(const EconomyParams& p, double lambda, const RootFindConfig& cfg = {}) {
    const double y = -lambda * std::sqrt(second_moment_z0(p.measure)) + mean_z0(p.measure);
    std::vector<double> theta;
    theta.reserve(p.tau.size());
    for (int i = 1; i <= p.investors(); ++i) {
        const auto map = investor_tilt_map(p, i);
        theta.push_back(-p.tau[static_cast<std::size_t>(i - 1)] / p.sigma_D * phi_invert(map, y, cfg));
    }
    return theta;
}

/// r = (mu_D + sum mu_i - sum tau_i K(b_i)) / tau_Sigma.
inline double solve_rate(const EconomyParams& p, const std::vector<double>& theta) {
    double s = p.mu_D;
    for (int i = 1; i <= p.investors(); ++i) {
        const auto k = static_cast<std::size_t>(i - 1);
        s += p.mu[k] - p.tau[k] * convexity_integral(p.measure, investor_tilt(p, theta[k], i));
    }
    return s / p.tau_sigma();
}

/// g_i = -r + theta_i (mu/A) / tau_i + mu_i / tau_i - K(b_i).
inline std::vector<double> solve_g(const EconomyParams& p, double r, const DriftMu& mu,
                                   const std::vector<double>& theta) {
    std::vector<double> g;
    g.reserve(theta.size());
    for (int i = 1; i <= p.investors(); ++i) {
        const auto k = static_cast<std::size_t>(i - 1);
        g.push_back(-r + theta[k] * mu.ratio() / p.tau[k] + p.mu[k] / p.tau[k] -
                    convexity_integral(p.measure, investor_tilt(p, theta[k], i)));
    }
    return g;
}

/// psi_i(z) = e^{b_i.z} - 1.
inline ExpIntegrand psi_i_integrand(const EconomyParams& p, double theta_i, int i) {
    return {investor_tilt(p, theta_i, i), 0.0};
}

/// Optimal consumption in excess of income,
/// c = X/A(t) + tau_i G(t)/A(t) with G(t) = g_i H(t).
struct ConsumptionPolicy {
    int investor = 1;
    double r = 0.0;
    double T = 1.0;
    double tau_i = 1.0;
    double g_i = 0.0;

    /// The income term tau_i G(t)/A(t); tends to 0 as t -> T.
    double annuity_term(double t) const {
        if (t > T) throw DomainError("consumption evaluated past the horizon");
        return tau_i * g_i * Annuity{r, T}.ramp_ratio(t);
    }

    double eval(double t, double wealth) const {
        if (t > T) throw DomainError("consumption evaluated past the horizon");
        const double a = Annuity{r, T}(t);
        if (!(a > 0.0)) throw DomainError("X/A is a limit at the horizon; use eval_ratio");
        return wealth / a + annuity_term(t);
    }

    /// Same policy parameterised by X/A, continuous up to t = T.
    double eval_ratio(double t, double wealth_over_annuity) const {
        return wealth_over_annuity + annuity_term(t);
    }
};

struct Equilibrium {
    double lambda = 0.0;
    double r = 0.0;
    std::vector<double> theta_star;
    std::vector<double> g;
    Annuity annuity;
    DriftMu drift_mu;
    ExpIntegrand psi_star;
    std::vector<ExpIntegrand> psi_i;
    double sharpe_residual = 0.0;
    double m0 = 0.0;  // int z0 dnu
    double s2 = 1.0;  // int z0^2 dnu

    double mu_over_A() const { return drift_mu.ratio(); }
};

/// psi*(z) = e^{f(-mu/(sigma_D A) + m0) z0} - 1 with f the inverse of the
/// coordinate-0 tilt map. Time independent since mu/A is constant.
inline ExpIntegrand psi_star_integrand(const EconomyParams& p, const Equilibrium& eq, const RootFindConfig& cfg = {}) {
    const MonotoneTiltMap map(p.measure, std::nullopt);
    const double y = -eq.mu_over_A() / p.sigma_D + eq.m0;
    return {Tilt::coordinate0(phi_invert(map, y, cfg)), 0.0};
}

inline ConsumptionPolicy consumption_policy(const EconomyParams& p, const Equilibrium& eq, int i) {
    const auto k = static_cast<std::size_t>(i - 1);
    return {i, eq.r, p.T, p.tau[k], eq.g[k]};
}

namespace detail {

template <class Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
    const std::string pre = std::string(stage) + ": ";
    try {
        return fn();
    } catch (const DegenerateMeasure& e) {
        throw DegenerateMeasure(pre + e.what());
    } catch (const OverflowGuard& e) {
        throw OverflowGuard(pre + e.what());
    } catch (const BracketFailure& e) {
        throw BracketFailure(pre + e.what());
    } catch (const MaxIterExceeded& e) {
        throw MaxIterExceeded(pre + e.what());
    } catch (const StructuralError& e) {
        throw StructuralError(pre + e.what());
    } catch (const DomainError& e) {
        throw DomainError(pre + e.what());
    }
}

}  // namespace detail

/// Full equilibrium in the order lambda -> theta* -> r -> A -> mu -> g -> psi.
inline Equilibrium solve_equilibrium(const EconomyParams& p, const RootFindConfig& cfg = {}) {
    Equilibrium eq;
    eq.s2 = detail::staged("second moment", [&] { return second_moment_z0(p.measure); });
    detail::staged("validate", [&] {
        p.require_valid();
        return 0;
    });
    eq.m0 = mean_z0(p.measure);
    const auto sharpe = detail::staged("sharpe ratio", [&] { return solve_sharpe(p, cfg); });
    eq.lambda = sharpe.lambda;
    eq.sharpe_residual = sharpe.residual;
    eq.theta_star = detail::staged("stock holdings", [&] { return solve_theta_star(p, eq.lambda, cfg); });
    eq.r = detail::staged("interest rate", [&] { return solve_rate(p, eq.theta_star); });
    eq.annuity = annuity(eq.r, p.T);
    eq.drift_mu = drift_mu(eq.lambda, p.sigma_D, eq.s2, eq.annuity);
    eq.g = detail::staged("income constants", [&] { return solve_g(p, eq.r, eq.drift_mu, eq.theta_star); });
    for (int i = 1; i <= p.investors(); ++i)
        eq.psi_i.push_back(psi_i_integrand(p, eq.theta_star[static_cast<std::size_t>(i - 1)], i));
    eq.psi_star = detail::staged("aggregate integrand", [&] { return psi_star_integrand(p, eq, cfg); });
    return eq;
}

/// Residuals of the defining identities of a solved equilibrium.
struct EquilibriumDiagnostics {
    double stock_clearing = 0.0;       // |sum theta - 1|
    double sharpe_residual = 0.0;
    double drift_ratio_spread = 0.0;   // relative spread of mu/A over a time grid
    double annuity_at_horizon = 0.0;
    double psi_star_condition = 0.0;   // |int psi* z0 dnu + mu/(sigma_D A)|
    double psi_i_condition = 0.0;      // max over investors
    double clearing_identity = 0.0;    // |-sum tau g - (mu_D - mu/A)|
};

inline EquilibriumDiagnostics diagnose(const EconomyParams& p, const Equilibrium& eq, int n_times = 100) {
    EquilibriumDiagnostics d;
    d.stock_clearing = std::abs(std::accumulate(eq.theta_star.begin(), eq.theta_star.end(), 0.0) - 1.0);
    d.sharpe_residual = std::abs(eq.sharpe_residual);
    d.annuity_at_horizon = std::abs(eq.annuity(p.T));

    const double ref = eq.mu_over_A();
    const double t_end = p.T - 1e-6 * p.T;
    for (int k = 0; k < n_times; ++k) {
        const double t = t_end * k / std::max(n_times - 1, 1);
        const double ratio = eq.drift_mu(t) / eq.annuity(t);
        const double scale = std::max(std::abs(ref), 1e-300);
        d.drift_ratio_spread = std::max(d.drift_ratio_spread, std::abs(ratio - ref) / scale);
    }
    const double target = -ref / p.sigma_D;
    d.psi_star_condition = std::abs(eq.psi_star.z0_moment(p.measure) - target);
    for (const auto& psi : eq.psi_i)
        d.psi_i_condition = std::max(d.psi_i_condition, std::abs(psi.z0_moment(p.measure) - target));

    double lhs = 0.0;
    for (std::size_t k = 0; k < eq.g.size(); ++k) lhs -= p.tau[k] * eq.g[k];
    d.clearing_identity = std::abs(lhs - (p.mu_D - ref));
    return d;
}

}  // namespace levy_radner
