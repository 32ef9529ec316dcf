#pragma once

// Representative-agent (complete market) benchmark and the incompleteness
// impacts on the interest rate and the Sharpe ratio.

#include <cmath>
#include <vector>

#include "levy_radner/equilibrium.hpp"
#include "levy_radner/measure.hpp"

namespace levy_radner {

struct RepBenchmark {
    double r_rep = 0.0;
    double lambda_rep = 0.0;
    double tau_sigma = 1.0;
    Annuity annuity_rep;
    DriftMu drift_mu_rep;
    ExpIntegrand psi_rep;  // e^{a.z} - 1
};

/// a = -(sigma_D, sigma_1, ..., sigma_I) / tau_Sigma.
inline Eigen::VectorXd representative_tilt(const EconomyParams& p) {
    const int n = p.investors();
    Eigen::VectorXd a(n + 1);
    a(0) = p.sigma_D;
    for (int i = 1; i <= n; ++i) a(i) = p.sigma[static_cast<std::size_t>(i - 1)];
    return -a / p.tau_sigma();
}

inline RepBenchmark solve_rep(const EconomyParams& p) {
    p.require_valid();
    RepBenchmark rep;
    rep.tau_sigma = p.tau_sigma();
    const Tilt a = Tilt::dense(representative_tilt(p));

    double drift = p.mu_D;
    for (double m : p.mu) drift += m;
    rep.r_rep = drift / rep.tau_sigma - convexity_integral(p.measure, a);

    const double s2 = second_moment_z0(p.measure);
    rep.psi_rep = {a, 0.0};
    rep.lambda_rep = -rep.psi_rep.z0_moment(p.measure) / std::sqrt(s2);
    rep.annuity_rep = annuity(rep.r_rep, p.T);
    rep.drift_mu_rep = drift_mu(rep.lambda_rep, p.sigma_D, s2, rep.annuity_rep);
    return rep;
}

struct ImpactReport {
    double delta_r = 0.0;          // r_rep - r
    double delta_r_direct = 0.0;   // sum (tau_i/tau_Sigma) K(b_i) - K(a)
    double delta_lambda = 0.0;     // lambda - lambda_rep
    double r = 0.0, r_rep = 0.0, lambda = 0.0, lambda_rep = 0.0;
    int investors = 0;
    double tau_sigma = 0.0;
    double sigma_D = 0.0;
};

/// Impacts of incompleteness. delta_r is computed twice: as the difference
/// of the two solved rates and directly as the convexity gap, which is
/// non-negative by Jensen once sum theta* = 1.
inline ImpactReport impacts(const EconomyParams& p, const Equilibrium& eq, const RepBenchmark& rep) {
    ImpactReport out;
    out.r = eq.r;
    out.r_rep = rep.r_rep;
    out.lambda = eq.lambda;
    out.lambda_rep = rep.lambda_rep;
    out.delta_r = rep.r_rep - eq.r;
    out.delta_lambda = eq.lambda - rep.lambda_rep;
    out.investors = p.investors();
    out.tau_sigma = rep.tau_sigma;
    out.sigma_D = p.sigma_D;

    double gap = -convexity_integral(p.measure, rep.psi_rep.exponent);
    for (int i = 1; i <= p.investors(); ++i) {
        const auto k = static_cast<std::size_t>(i - 1);
        gap += p.tau[k] / rep.tau_sigma * convexity_integral(p.measure, eq.psi_i[k].exponent);
    }
    out.delta_r_direct = gap;
    return out;
}

/// Max-norm of a - sum (tau_i/tau_Sigma) b_i; zero whenever stock clears.
inline double tilt_mixture_residual(const EconomyParams& p, const Equilibrium& eq) {
    const int dim = p.investors() + 1;
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(dim);
    const double ts = p.tau_sigma();
    for (int i = 1; i <= p.investors(); ++i)
        mix += p.tau[static_cast<std::size_t>(i - 1)] / ts * eq.psi_i[static_cast<std::size_t>(i - 1)].exponent.to_dense(dim);
    return (representative_tilt(p) - mix).cwiseAbs().maxCoeff();
}

}  // namespace levy_radner
