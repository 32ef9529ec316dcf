#pragma once

// Jump measures on R^(I+1) and the integral functionals the equilibrium
// formulas consume. Coordinate 0 drives the dividend, coordinate i the
// income of investor i.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "levy_radner/errors.hpp"

namespace levy_radner {

/// Largest exponent accepted before an exponential moment is declared an overflow.
inline constexpr double kExponentCap = 700.0;

/// Correlation matrix of the Gaussian jump marks (unit diagonal).
struct JumpCovariance {
    Eigen::MatrixXd entries;
    std::optional<double> flat_rho;

    static JumpCovariance identity(int dim) {
        return {Eigen::MatrixXd::Identity(dim, dim), std::nullopt};
    }

    /// Sigma_ij = rho off the diagonal. Not validated here; see problems().
    static JumpCovariance flat(int dim, double rho) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(dim, dim, rho);
        m.diagonal().setOnes();
        return {std::move(m), rho};
    }

    int dim() const { return static_cast<int>(entries.rows()); }

    /// Empty when symmetric, unit-diagonal and positive definite.
    std::vector<std::string> problems() const {
        std::vector<std::string> out;
        const auto d = entries.rows();
        if (d < 1 || entries.cols() != d) {
            out.emplace_back("covariance must be a non-empty square matrix");
            return out;
        }
        if (!entries.allFinite()) {
            out.emplace_back("covariance has non-finite entries");
            return out;
        }
        if (flat_rho) {
            const double lo = d > 1 ? -1.0 / static_cast<double>(d - 1) : -1.0;
            if (!(*flat_rho > lo && *flat_rho < 1.0)) {
                std::ostringstream msg;
                msg << "flat correlation rho=" << *flat_rho << " outside (" << lo
                    << ", 1): covariance not positive definite";
                out.push_back(msg.str());
            }
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            if (std::abs(entries(i, i) - 1.0) > 1e-12) {
                out.emplace_back("covariance diagonal must be 1");
                break;
            }
        }
        if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            out.emplace_back("covariance must be symmetric");
        if (out.empty()) {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(entries);
            const bool pd = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 1e-14).all();
            if (!pd) out.emplace_back("covariance not positive definite");
        }
        return out;
    }
};

struct GaussianCompoundPoisson {
    JumpCovariance cov;
    double intensity = 1.0;
};

struct Atom {
    double weight = 0.0;
    Eigen::VectorXd mark;
};

struct AtomicMeasure {
    std::vector<Atom> atoms;
};

/// The Levy measure nu: Gaussian compound Poisson or finitely many atoms.
class LevyMeasure {
public:
    using Variant = std::variant<GaussianCompoundPoisson, AtomicMeasure>;

    LevyMeasure(GaussianCompoundPoisson g) : v_(std::move(g)) {}
    LevyMeasure(AtomicMeasure a) : v_(std::move(a)) {}

    const Variant& variant() const { return v_; }
    bool is_gaussian() const { return std::holds_alternative<GaussianCompoundPoisson>(v_); }
    const GaussianCompoundPoisson& gaussian() const { return std::get<GaussianCompoundPoisson>(v_); }
    const AtomicMeasure& atomic() const { return std::get<AtomicMeasure>(v_); }

    int dim() const {
        if (is_gaussian()) return gaussian().cov.dim();
        const auto& atoms = atomic().atoms;
        return atoms.empty() ? 0 : static_cast<int>(atoms.front().mark.size());
    }

    double total_mass() const {
        if (is_gaussian()) return gaussian().intensity;
        double m = 0.0;
        for (const auto& a : atomic().atoms) m += a.weight;
        return m;
    }

    /// Same measure with every weight (or the intensity) multiplied by c.
    LevyMeasure scaled(double c) const {
        if (is_gaussian()) {
            auto g = gaussian();
            g.intensity *= c;
            return g;
        }
        auto a = atomic();
        for (auto& atom : a.atoms) atom.weight *= c;
        return a;
    }

private:
    Variant v_;
};

/// Exponent vector u in e^{u.z}. Either a pair (u0 on coordinate 0, ui on the
/// coordinate of one investor) or a dense vector over all I+1 coordinates.
class Tilt {
public:
    static Tilt coordinate0(double u0) { return Tilt(u0, std::nullopt, 0.0); }

    static Tilt pair(double u0, int investor, double ui) {
        if (investor < 1) throw StructuralError("tilt investor index must be >= 1");
        return Tilt(u0, investor, ui);
    }

    static Tilt dense(Eigen::VectorXd u) {
        Tilt t(0.0, std::nullopt, 0.0);
        t.dense_ = std::move(u);
        return t;
    }

    bool is_dense() const { return dense_.has_value(); }
    double u0() const { return dense_ ? (*dense_)(0) : u0_; }
    double ui() const { return ui_; }
    std::optional<int> investor() const { return investor_; }
    const Eigen::VectorXd& dense_vector() const { return *dense_; }

    double dot(const Eigen::VectorXd& z) const {
        if (dense_) return dense_->dot(z);
        double s = u0_ * z(0);
        if (investor_) s += ui_ * z(*investor_);
        return s;
    }

    Eigen::VectorXd to_dense(int dim) const {
        if (dense_) return *dense_;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
        u(0) = u0_;
        if (investor_) u(*investor_) = ui_;
        return u;
    }

    std::string describe() const {
        std::ostringstream os;
        if (dense_) {
            os << "dense(" << dense_->transpose() << ")";
        } else {
            os << "u0=" << u0_;
            if (investor_) os << ", u" << *investor_ << "=" << ui_;
        }
        return os.str();
    }

private:
    Tilt(double u0, std::optional<int> investor, double ui) : u0_(u0), ui_(ui), investor_(investor) {}

    double u0_;
    double ui_;
    std::optional<int> investor_;
    std::optional<Eigen::VectorXd> dense_;
};

struct ConditionResult {
    std::string id;
    bool passed = false;
    std::string message;
};

struct ValidationReport {
    std::vector<ConditionResult> conditions;

    bool ok() const {
        for (const auto& c : conditions)
            if (!c.passed) return false;
        return true;
    }

    const ConditionResult* find(const std::string& id) const {
        for (const auto& c : conditions)
            if (c.id == id) return &c;
        return nullptr;
    }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& c : conditions)
            if (!c.passed) os << c.id << ": " << c.message << "; ";
        return os.str();
    }
};

/// Checks the structural invariants and the four regularity conditions on nu:
/// usual Levy properties, integrable small z^(0) jumps, finite exponential
/// moments, and mass on both signs of z^(0).
inline ValidationReport validate_assumption1(const LevyMeasure& m) {
    ValidationReport rep;
    auto add = [&](std::string id, bool ok, std::string msg) {
        rep.conditions.push_back({std::move(id), ok, std::move(msg)});
    };

    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        auto issues = g.cov.problems();
        if (!(g.intensity > 0.0) || !std::isfinite(g.intensity))
            issues.emplace_back("intensity must be positive and finite");
        if (g.cov.dim() < 2) issues.emplace_back("dimension must be at least 2 (dividend + one investor)");
        std::string msg;
        for (const auto& s : issues) msg += s + "; ";
        const bool ok = issues.empty();
        add("structure", ok, ok ? "ok" : msg);
        // Finite Gaussian mass: all moment conditions hold, and the z0
        // marginal charges both half-lines.
        const std::string dep = ok ? "gaussian compound Poisson" : "structure invalid";
        add("ass1:usual", ok, dep);
        add("ass1:smalljumps", ok, dep);
        add("ass1:bigjumps", ok, dep);
        add("ass1:pm", ok, dep);
        return rep;
    }

    const auto& atoms = m.atomic().atoms;
    std::vector<std::string> issues;
    if (atoms.empty()) issues.emplace_back("atomic measure has no atoms");
    const auto dim = atoms.empty() ? 0 : atoms.front().mark.size();
    if (!atoms.empty() && dim < 2) issues.emplace_back("mark dimension must be at least 2");
    bool at_origin = false;
    for (const auto& a : atoms) {
        if (a.mark.size() != dim) {
            issues.emplace_back("atoms have inconsistent mark dimensions");
            break;
        }
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
            issues.emplace_back("atom weights must be positive and finite");
            break;
        }
        if (!a.mark.allFinite()) {
            issues.emplace_back("atom marks must be finite");
            break;
        }
        if (a.mark.isZero(0.0)) at_origin = true;
    }
    const bool structural = issues.empty();
    std::string msg;
    for (const auto& s : issues) msg += s + "; ";
    add("structure", structural, structural ? "ok" : msg);

    add("ass1:usual", structural && !at_origin,
        at_origin ? "atom at the origin" : (structural ? "finite atomic measure" : "structure invalid"));
    add("ass1:smalljumps", structural, structural ? "finitely many atoms" : "structure invalid");
    add("ass1:bigjumps", structural, structural ? "finitely many atoms" : "structure invalid");

    bool pos = false, neg = false;
    for (const auto& a : atoms) {
        if (a.mark.size() == 0) continue;
        pos = pos || a.mark(0) > 0.0;
        neg = neg || a.mark(0) < 0.0;
    }
    add("ass1:pm", pos && neg,
        pos && neg ? "mass on both signs of z0"
                   : std::string("no ") + (pos ? "negative" : "positive") + " z0 mass");
    return rep;
}

inline void require_valid(const LevyMeasure& m) {
    const auto rep = validate_assumption1(m);
    if (!rep.ok()) throw StructuralError("invalid jump measure: " + rep.summary());
}

namespace detail {

inline void guard_exponent(double arg, const Tilt& t) {
    if (arg > kExponentCap || std::isnan(arg))
        throw OverflowGuard("exponential moment overflows at tilt " + t.describe());
}

// (Sigma u)_0 and u' Sigma u for the Gaussian branch.
inline std::pair<double, double> gaussian_forms(const JumpCovariance& cov, const Tilt& t) {
    const auto& s = cov.entries;
    if (t.is_dense()) {
        const auto& u = t.dense_vector();
        const Eigen::VectorXd su = s * u;
        return {su(0), u.dot(su)};
    }
    const double u0 = t.u0();
    if (!t.investor()) return {s(0, 0) * u0, s(0, 0) * u0 * u0};
    const int i = *t.investor();
    const double ui = t.ui();
    return {s(0, 0) * u0 + s(0, i) * ui, s(0, 0) * u0 * u0 + 2.0 * s(0, i) * u0 * ui + s(i, i) * ui * ui};
}

}  // namespace detail

/// int z^(j) nu(dz).
inline double mean_coordinate(const LevyMeasure& m, int j) {
    if (m.is_gaussian()) return 0.0;
    double s = 0.0;
    for (const auto& a : m.atomic().atoms) s += a.weight * a.mark(j);
    return s;
}

inline double mean_z0(const LevyMeasure& m) { return mean_coordinate(m, 0); }

/// int (z^(0))^2 nu(dz); zero means the Sharpe ratio is undefined.
inline double second_moment_z0(const LevyMeasure& m) {
    double s = 0.0;
    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        s = g.intensity * g.cov.entries(0, 0);
    } else {
        for (const auto& a : m.atomic().atoms) s += a.weight * a.mark(0) * a.mark(0);
    }
    if (!(s > 0.0)) throw DegenerateMeasure("measure has no mass off z0 = 0; Sharpe ratio undefined");
    return s;
}

/// int e^{u.z} nu(dz).
inline double exponential_moment(const LevyMeasure& m, const Tilt& t) {
    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        const auto [su0, q] = detail::gaussian_forms(g.cov, t);
        (void)su0;
        detail::guard_exponent(0.5 * q, t);
        return g.intensity * std::exp(0.5 * q);
    }
    double s = 0.0;
    for (const auto& a : m.atomic().atoms) {
        const double arg = t.dot(a.mark);
        detail::guard_exponent(arg, t);
        s += a.weight * std::exp(arg);
    }
    return s;
}

/// int z^(0) e^{u.z} nu(dz), the partial derivative of exponential_moment in u0.
inline double tilted_mean_z0(const LevyMeasure& m, const Tilt& t) {
    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        const auto [su0, q] = detail::gaussian_forms(g.cov, t);
        detail::guard_exponent(0.5 * q, t);
        return g.intensity * su0 * std::exp(0.5 * q);
    }
    double s = 0.0;
    for (const auto& a : m.atomic().atoms) {
        const double arg = t.dot(a.mark);
        detail::guard_exponent(arg, t);
        s += a.weight * a.mark(0) * std::exp(arg);
    }
    return s;
}

/// K(b) = int (e^{b.z} - 1 - b.z) nu(dz) >= 0.
inline double convexity_integral(const LevyMeasure& m, const Tilt& t) {
    if (m.is_gaussian()) {
        const auto& g = m.gaussian();
        const auto [su0, q] = detail::gaussian_forms(g.cov, t);
        (void)su0;
        detail::guard_exponent(0.5 * q, t);
        return g.intensity * std::expm1(0.5 * q);
    }
    double s = 0.0;
    for (const auto& a : m.atomic().atoms) {
        const double arg = t.dot(a.mark);
        detail::guard_exponent(arg, t);
        s += a.weight * (std::expm1(arg) - arg);
    }
    return s;
}

/// Reads atoms from CSV with header "weight,z0,z1,...,zI".
inline AtomicMeasure read_atoms_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("atom CSV is empty");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            out.push_back(cell);
        }
        return out;
    };
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "weight")
        throw ParseError("atom CSV header must be weight,z0,z1,...");
    for (std::size_t k = 1; k < header.size(); ++k)
        if (header[k] != "z" + std::to_string(k - 1))
            throw ParseError("atom CSV column " + std::to_string(k) + " must be z" + std::to_string(k - 1));

    AtomicMeasure out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw ParseError("atom CSV line " + std::to_string(lineno) + " has wrong column count");
        Atom a;
        a.mark.resize(static_cast<Eigen::Index>(cells.size() - 1));
        try {
            a.weight = std::stod(cells[0]);
            for (std::size_t k = 1; k < cells.size(); ++k)
                a.mark(static_cast<Eigen::Index>(k - 1)) = std::stod(cells[k]);
        } catch (const std::exception&) {
            throw ParseError("atom CSV line " + std::to_string(lineno) + " is not numeric");
        }
        out.atoms.push_back(std::move(a));
    }
    return out;
}

}  // namespace levy_radner
