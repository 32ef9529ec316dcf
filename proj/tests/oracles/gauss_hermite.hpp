#pragma once

// Gauss-Hermite nodes by Newton iteration on the orthonormal Hermite
// recurrence, and bivariate standard-normal expectations built on them.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

struct HermiteRule {
    std::vector<double> x;  // nodes for weight e^{-x^2}
    std::vector<double> w;
};

inline HermiteRule gauss_hermite(int n) {
    HermiteRule rule;
    rule.x.assign(static_cast<std::size_t>(n), 0.0);
    rule.w.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = std::pow(std::numbers::pi, -0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.x[1];
        else
            z = 2.0 * z - rule.x[static_cast<std::size_t>(i - 2)];
        double pp = 0.0;
        int it = 0;
        for (; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        if (it == 100) throw std::runtime_error("Gauss-Hermite Newton iteration did not converge");
        rule.x[static_cast<std::size_t>(i)] = z;
        rule.x[static_cast<std::size_t>(n - 1 - i)] = -z;
        rule.w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        rule.w[static_cast<std::size_t>(n - 1 - i)] = rule.w[static_cast<std::size_t>(i)];
    }
    return rule;
}

/// E[f(X, Y)] for standard normals with correlation rho, using the
/// factorisation X = a, Y = rho a + sqrt(1 - rho^2) b.
template <class F>
double bivariate_normal_expectation(F&& f, double rho, int n = 64) {
    static const HermiteRule rule = gauss_hermite(64);
    const HermiteRule& gh = n == 64 ? rule : gauss_hermite(n);
    const double s = std::sqrt(1.0 - rho * rho);
    double total = 0.0;
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
        const double a = std::numbers::sqrt2 * gh.x[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < gh.x.size(); ++j) {
            const double b = std::numbers::sqrt2 * gh.x[j];
            inner += gh.w[j] * f(a, rho * a + s * b);
        }
        total += gh.w[i] * inner;
    }
    return total / std::numbers::pi;
}

}  // namespace oracle
