#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "levy_radner/measure.hpp"
#include "oracles/gauss_hermite.hpp"

using namespace levy_radner;

namespace {

LevyMeasure gaussian(int dim, double rho, double kappa = 1.0) {
    return GaussianCompoundPoisson{JumpCovariance::flat(dim, rho), kappa};
}

AtomicMeasure atoms(std::initializer_list<std::pair<double, std::vector<double>>> list) {
    AtomicMeasure m;
    for (const auto& [w, z] : list) m.atoms.push_back({w, Eigen::Map<const Eigen::VectorXd>(z.data(), z.size())});
    return m;
}

}  // namespace

TEST(Validation, GaussianIdentityPassesEverything) {
    const auto rep = validate_assumption1(GaussianCompoundPoisson{JumpCovariance::identity(3), 1.0});
    EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Validation, SymmetricTwoAtomsPass) {
    const auto rep = validate_assumption1(atoms({{1.0, {0.5, 0.0}}, {1.0, {-0.5, 0.0}}}));
    EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Validation, OneSidedAtomFailsSignCondition) {
    const auto rep = validate_assumption1(atoms({{1.0, {0.5, 0.0}}}));
    EXPECT_FALSE(rep.ok());
    ASSERT_NE(rep.find("ass1:pm"), nullptr);
    EXPECT_FALSE(rep.find("ass1:pm")->passed);
}

TEST(Validation, AtomAtOriginOrNonPositiveWeightRejected) {
    EXPECT_FALSE(validate_assumption1(atoms({{1.0, {0.0, 0.0}}, {1.0, {1.0, 0.0}}, {1.0, {-1.0, 0.0}}})).ok());
    EXPECT_FALSE(validate_assumption1(atoms({{0.0, {1.0, 0.0}}, {1.0, {-1.0, 0.0}}})).ok());
}

TEST(Validation, CovarianceOutsideFlatBoundsRejected) {
    EXPECT_FALSE(validate_assumption1(gaussian(3, 1.1)).ok());
    EXPECT_FALSE(validate_assumption1(gaussian(3, -0.5)).ok());
    EXPECT_TRUE(validate_assumption1(gaussian(3, -0.49)).ok());
    EXPECT_THROW(require_valid(gaussian(3, 1.0)), StructuralError);
}

TEST(Validation, NonUnitDiagonalRejected) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    m(1, 1) = 2.0;
    EXPECT_FALSE(validate_assumption1(GaussianCompoundPoisson{JumpCovariance{m, std::nullopt}, 1.0}).ok());
}

TEST(Moments, MeanExamples) {
    EXPECT_EQ(mean_z0(gaussian(2, 0.3, 2.5)), 0.0);
    EXPECT_EQ(mean_z0(atoms({{1.0, {1.0, 0.0}}, {1.0, {-1.0, 0.0}}})), 0.0);
    EXPECT_DOUBLE_EQ(mean_z0(atoms({{2.0, {0.5, 0.0}}, {1.0, {0.25, 0.0}}})), 1.25);
}

TEST(Moments, SecondMomentExamples) {
    EXPECT_DOUBLE_EQ(second_moment_z0(GaussianCompoundPoisson{JumpCovariance::identity(2), 1.0}), 1.0);
    EXPECT_DOUBLE_EQ(second_moment_z0(GaussianCompoundPoisson{JumpCovariance::identity(2), 2.0}), 2.0);
    EXPECT_DOUBLE_EQ(second_moment_z0(atoms({{1.0, {0.5, 0.0}}})), 0.25);
    EXPECT_THROW(second_moment_z0(atoms({{1.0, {0.0, 1.0}}})), DegenerateMeasure);
}

TEST(TiltedMean, ZeroTiltIsMean) {
    const auto a = atoms({{2.0, {0.5, 0.1}}, {1.0, {-0.25, 0.3}}});
    EXPECT_DOUBLE_EQ(tilted_mean_z0(a, Tilt::coordinate0(0.0)), mean_z0(a));
    EXPECT_EQ(tilted_mean_z0(gaussian(2, 0.4), Tilt::coordinate0(0.0)), 0.0);
}

TEST(TiltedMean, GaussianClosedFormExamples) {
    EXPECT_NEAR(tilted_mean_z0(gaussian(2, 0.0), Tilt::pair(-0.4, 1, -0.2)), -0.4 * std::exp(0.1), 1e-15);
    EXPECT_NEAR(tilted_mean_z0(gaussian(2, 0.5), Tilt::pair(1.0, 1, 0.0)), std::exp(0.5), 1e-15);
}

TEST(TiltedMean, SingleAtom) {
    EXPECT_NEAR(tilted_mean_z0(atoms({{1.0, {1.0, 0.0}}}), Tilt::coordinate0(std::log(2.0))), 2.0, 1e-15);
}

TEST(Convexity, Examples) {
    EXPECT_EQ(convexity_integral(gaussian(3, 0.2), Tilt::coordinate0(0.0)), 0.0);
    // b' Sigma b = 0.2 with rho = 0.
    EXPECT_NEAR(convexity_integral(gaussian(2, 0.0), Tilt::pair(-0.4, 1, -0.2)), std::expm1(0.1), 1e-15);
    EXPECT_NEAR(convexity_integral(atoms({{1.0, {1.0, 0.0}}}), Tilt::coordinate0(std::log(2.0))),
                1.0 - std::log(2.0), 1e-15);
}

TEST(Convexity, NonNegativeForRandomTilts) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const LevyMeasure specs[] = {gaussian(4, 0.3), gaussian(4, -0.2, 1.7),
                                 atoms({{0.3, {1.0, -0.5, 0.2, 0.1}}, {0.7, {-0.4, 0.3, 0.9, -1.0}}})};
    for (const auto& m : specs)
        for (int k = 0; k < 1000; ++k) {
            Eigen::VectorXd b(4);
            for (int j = 0; j < 4; ++j) b(j) = u(rng);
            EXPECT_GE(convexity_integral(m, Tilt::dense(b)), 0.0);
        }
}

TEST(Overflow, HugeExponentRaises) {
    EXPECT_THROW(exponential_moment(gaussian(2, 0.0), Tilt::coordinate0(60.0)), OverflowGuard);
    EXPECT_THROW(tilted_mean_z0(atoms({{1.0, {1.0, 0.0}}}), Tilt::coordinate0(800.0)), OverflowGuard);
}

TEST(Quadrature, GaussianFormsMatchHermiteOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uu(-5.0, 5.0), ur(-0.45, 0.95);
    for (int k = 0; k < 100; ++k) {
        double u0 = uu(rng), ui = uu(rng);
        const double n = std::hypot(u0, ui);
        if (n > 5.0) u0 *= 5.0 / n, ui *= 5.0 / n;
        const double rho = ur(rng);
        const auto m = gaussian(3, rho);
        const Tilt t = Tilt::pair(u0, 2, ui);
        const double q_phi = oracle::bivariate_normal_expectation(
            [&](double x, double y) { return x * std::exp(u0 * x + ui * y); }, rho);
        EXPECT_NEAR(tilted_mean_z0(m, t) / q_phi, 1.0, 1e-6) << u0 << ' ' << ui << ' ' << rho;
    }
}

TEST(Derivative, FiniteDifferenceOfExponentialMoment) {
    const double h = 1e-5;
    const LevyMeasure specs[] = {gaussian(3, 0.4),
                                 atoms({{0.5, {1.0, 0.2, -0.1}}, {0.8, {-0.7, 0.5, 0.3}}, {0.1, {0.2, 0.0, 1.0}}})};
    for (const auto& m : specs)
        for (double u0 = -2.0; u0 <= 2.0; u0 += 0.25) {
            const auto at = [&](double x) { return exponential_moment(m, Tilt::pair(x, 1, -0.3)); };
            const double fd = (at(u0 + h) - at(u0 - h)) / (2.0 * h);
            const double exact = tilted_mean_z0(m, Tilt::pair(u0, 1, -0.3));
            EXPECT_NEAR(fd, exact, 1e-4 * std::max(1.0, std::abs(exact)));
        }
}

TEST(Monotone, TiltedMeanIncreasingInU0) {
    const LevyMeasure specs[] = {gaussian(3, 0.9), gaussian(3, -0.4),
                                 atoms({{0.5, {1.0, 0.2, -0.1}}, {0.8, {-0.7, 0.5, 0.3}}})};
    for (const auto& m : specs) {
        double prev = -INFINITY;
        for (double u0 = -4.0; u0 <= 4.0; u0 += 0.05) {
            const double v = tilted_mean_z0(m, Tilt::pair(u0, 2, 0.7));
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(Linearity, DoublingIntensityDoublesFunctionals) {
    const LevyMeasure specs[] = {gaussian(3, 0.25, 1.3),
                                 atoms({{0.5, {1.0, 0.2, -0.1}}, {0.8, {-0.7, 0.5, 0.3}}})};
    for (const auto& m : specs) {
        const auto m2 = m.scaled(2.0);
        const Tilt t = Tilt::pair(0.3, 1, -0.8);
        EXPECT_EQ(2.0 * tilted_mean_z0(m, t), tilted_mean_z0(m2, t));
        EXPECT_EQ(2.0 * convexity_integral(m, t), convexity_integral(m2, t));
        EXPECT_EQ(2.0 * exponential_moment(m, t), exponential_moment(m2, t));
        EXPECT_EQ(2.0 * second_moment_z0(m), second_moment_z0(m2));
        EXPECT_EQ(2.0 * m.total_mass(), m2.total_mass());
    }
}

TEST(AtomCsv, ParsesAndRejects) {
    std::istringstream ok("weight,z0,z1\n0.5,1.0,0.25\n1.5,-2,3e-1\n");
    const auto m = read_atoms_csv(ok);
    ASSERT_EQ(m.atoms.size(), 2u);
    EXPECT_DOUBLE_EQ(m.atoms[1].mark(1), 0.3);
    std::istringstream bad_header("w,z0\n1,1\n");
    EXPECT_THROW(read_atoms_csv(bad_header), ParseError);
    std::istringstream bad_row("weight,z0,z1\n1,abc,2\n");
    EXPECT_THROW(read_atoms_csv(bad_row), ParseError);
}
