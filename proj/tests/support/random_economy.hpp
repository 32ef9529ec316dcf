#pragma once

#include <random>

#include "levy_radner/equilibrium.hpp"
#include "levy_radner/measure.hpp"

namespace testing_support {

using levy_radner::EconomyParams;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random unit-diagonal correlation matrix from normalised Gram products.
inline Eigen::MatrixXd random_correlation(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> n01;
    Eigen::MatrixXd a(dim, dim + 2);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim + 2; ++c) a(r, c) = n01(rng);
    Eigen::MatrixXd s = a * a.transpose();
    const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
    s = d.asDiagonal() * s * d.asDiagonal();
    s.diagonal().setOnes();
    return s;
}

/// Atoms with both signs of z0 present and marks of moderate size.
inline levy_radner::AtomicMeasure random_atomic(std::mt19937_64& rng, int dim, int atoms = 6) {
    levy_radner::AtomicMeasure m;
    for (int k = 0; k < atoms; ++k) {
        levy_radner::Atom a;
        a.weight = uniform(rng, 0.05, 1.0);
        a.mark = Eigen::VectorXd(dim);
        for (int j = 0; j < dim; ++j) a.mark(j) = uniform(rng, -1.5, 1.5);
        a.mark(0) = (k % 2 == 0 ? 1.0 : -1.0) * uniform(rng, 0.1, 1.5);
        m.atoms.push_back(a);
    }
    return m;
}

enum class MeasureKind { FlatGaussian, DenseGaussian, Atomic };

/// tau in [0.1, 2], sigma in [0.01, 0.5], flat rho in (-1/I, 0.95),
/// I in {1, ..., max_I}, random drifts, endowments and initial levels.
inline EconomyParams random_economy(std::mt19937_64& rng, int min_I = 1, int max_I = 8,
                                    MeasureKind kind = MeasureKind::FlatGaussian) {
    EconomyParams p;
    const int I = std::uniform_int_distribution<int>(min_I, max_I)(rng);
    const auto n = static_cast<std::size_t>(I);
    p.tau.resize(n);
    p.sigma.resize(n);
    p.mu.resize(n);
    p.Y0.resize(n);
    p.endow_stock.resize(n);
    p.endow_bond.resize(n);
    double stock = 0.0, bond = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p.tau[k] = uniform(rng, 0.1, 2.0);
        p.sigma[k] = uniform(rng, 0.01, 0.5);
        p.mu[k] = uniform(rng, -0.05, 0.1);
        p.Y0[k] = uniform(rng, -1.0, 1.0);
        p.endow_stock[k] = uniform(rng, 0.0, 1.0);
        p.endow_bond[k] = uniform(rng, -1.0, 1.0);
        stock += p.endow_stock[k];
        bond += p.endow_bond[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
        p.endow_stock[k] /= stock;
        p.endow_bond[k] -= bond / I;
    }
    p.sigma_D = uniform(rng, 0.01, 1.0);
    p.mu_D = uniform(rng, -0.05, 0.1);
    p.T = uniform(rng, 0.5, 10.0);
    p.D0 = uniform(rng, 0.5, 2.0);
    const double kappa = uniform(rng, 0.5, 2.0);
    switch (kind) {
        case MeasureKind::FlatGaussian: {
            const double lo = -1.0 / I;
            const double rho = uniform(rng, lo + 0.05 * (0.95 - lo), 0.95);
            p.measure = levy_radner::GaussianCompoundPoisson{levy_radner::JumpCovariance::flat(I + 1, rho), kappa};
            break;
        }
        case MeasureKind::DenseGaussian:
            p.measure = levy_radner::GaussianCompoundPoisson{
                levy_radner::JumpCovariance{random_correlation(rng, I + 1), std::nullopt}, kappa};
            break;
        case MeasureKind::Atomic:
            p.measure = random_atomic(rng, I + 1);
            break;
    }
    return p;
}

}  // namespace testing_support
