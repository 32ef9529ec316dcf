#pragma once

// Closed forms for the symmetric Gaussian economy (tau_i = tau, sigma_i =
// sigma, flat correlation rho, intensity kappa). See docs/closed_forms.md.

#include <cmath>

namespace oracle {

struct SymmetricEconomy {
    int I = 1;
    double tau = 0.5;
    double sigma = 0.1;
    double sigma_D = 0.2;
    double rho = 0.0;
    double kappa = 1.0;
    double mu = 0.0;    // per-investor income drift
    double mu_D = 0.0;
};

struct SymmetricValues {
    double lambda = 0.0;
    double r = 0.0;
    double lambda_rep = 0.0;
    double r_rep = 0.0;
};

inline SymmetricValues symmetric_closed_form(const SymmetricEconomy& e) {
    const double I = e.I;
    const double u0 = -e.sigma_D / (I * e.tau);
    const double ui = -e.sigma / e.tau;
    const double q = u0 * u0 + 2.0 * e.rho * u0 * ui + ui * ui;
    const double ts = I * e.tau;
    const double aSa = (e.sigma_D * e.sigma_D + 2.0 * e.rho * e.sigma_D * I * e.sigma + I * e.sigma * e.sigma +
                        I * (I - 1.0) * e.rho * e.sigma * e.sigma) /
                       (ts * ts);
    SymmetricValues v;
    v.lambda = std::sqrt(e.kappa) * (e.sigma_D / ts + e.rho * e.sigma / e.tau) * std::exp(q / 2.0);
    v.r = (e.mu_D + I * e.mu) / ts - e.kappa * std::expm1(q / 2.0);
    v.r_rep = (e.mu_D + I * e.mu) / ts - e.kappa * std::expm1(aSa / 2.0);
    v.lambda_rep = std::sqrt(e.kappa) * (e.sigma_D + e.rho * I * e.sigma) / ts * std::exp(aSa / 2.0);
    return v;
}

}  // namespace oracle
