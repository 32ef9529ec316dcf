#pragma once

// Monotone tilt maps u0 -> int z0 e^{u0 z0 + ui zi} nu(dz) and their inverses.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "levy_radner/errors.hpp"
#include "levy_radner/measure.hpp"

namespace levy_radner {

struct RootFindConfig {
    double abs_tol = 1e-12;  // bracket width on the argument
    int max_iter = 200;
    double initial_bracket_halfwidth = 1.0;

    void validate() const {
        if (!(abs_tol > 0.0) || max_iter < 1 || !(initial_bracket_halfwidth > 0.0))
            throw StructuralError("root-find tolerances must be strictly positive");
    }
};

/// Bracket doublings allowed before giving up on a sign change.
inline constexpr int kMaxBracketDoublings = 64;

/// Solves f(x) = target for a strictly increasing f on R.
///
/// The bracket starts at [-halfwidth, halfwidth] and the offending end is
/// doubled until it straddles the target. Bisection then runs until the
/// bracket is narrower than `tol` (or cannot shrink in floating point) and a
/// final secant step inside the bracket polishes the answer. Pass tol = 0 to
/// bisect to full precision.
template <class F>
double solve_increasing(F&& f, double target, double halfwidth, double tol, int max_iter) {
    double lo = -halfwidth, hi = halfwidth;
    double flo = f(lo), fhi = f(hi);

    int doublings = 0;
    while (flo > target) {
        if (++doublings > kMaxBracketDoublings) {
            std::ostringstream os;
            os << "no sign change below target " << target << " after " << kMaxBracketDoublings << " doublings";
            throw BracketFailure(os.str());
        }
        hi = lo;
        fhi = flo;
        lo *= 2.0;
        flo = f(lo);
    }
    doublings = 0;
    while (fhi < target) {
        if (++doublings > kMaxBracketDoublings) {
            std::ostringstream os;
            os << "no sign change above target " << target << " after " << kMaxBracketDoublings << " doublings";
            throw BracketFailure(os.str());
        }
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    if (flo == target) return lo;
    if (fhi == target) return hi;

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        if (hi - lo <= tol) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == target) return mid;
        if (fm < target) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if (iter == max_iter && hi - lo > tol) {
        std::ostringstream os;
        os << "bisection did not reach width " << tol << " in " << max_iter << " iterations";
        throw MaxIterExceeded(os.str());
    }
    if (!(fhi > flo)) return 0.5 * (lo + hi);
    const double x = lo + (target - flo) * (hi - lo) / (fhi - flo);
    return std::clamp(x, lo, hi);
}

/// u0 -> int z0 e^{u0 z0 + ui zi} nu(dz) with ui frozen. With no investor the
/// map only tilts coordinate 0.
class MonotoneTiltMap {
public:
    MonotoneTiltMap(const LevyMeasure& measure, std::optional<int> investor, double fixed_ui = 0.0)
        : measure_(&measure), investor_(investor), fixed_ui_(investor ? fixed_ui : 0.0) {
        if (investor && (*investor < 1 || *investor >= measure.dim()))
            throw StructuralError("investor index out of range for the measure dimension");
        const double a = (*this)(-1.0), b = (*this)(0.0), c = (*this)(1.0);
        if (a == b && b == c)
            throw DegenerateMeasure("tilt map is constant: measure has no mass off z0 = 0");
        if (!(a < b && b < c)) throw StructuralError("tilt map is not strictly increasing");
    }

    // The map keeps a reference to the measure, so temporaries are refused.
    MonotoneTiltMap(LevyMeasure&&, std::optional<int>, double = 0.0) = delete;

    double operator()(double u0) const { return tilted_mean_z0(*measure_, tilt(u0)); }

    Tilt tilt(double u0) const {
        return investor_ ? Tilt::pair(u0, *investor_, fixed_ui_) : Tilt::coordinate0(u0);
    }

    const LevyMeasure& measure() const { return *measure_; }
    std::optional<int> investor() const { return investor_; }
    double fixed_ui() const { return fixed_ui_; }

private:
    const LevyMeasure* measure_;
    std::optional<int> investor_;
    double fixed_ui_;
};

inline double phi_eval(const MonotoneTiltMap& map, double u0) { return map(u0); }

/// Inverse of the tilt map: the u0 with phi_eval(map, u0) = y.
inline double phi_invert(const MonotoneTiltMap& map, double y, const RootFindConfig& cfg = {}) {
    cfg.validate();
    return solve_increasing(map, y, cfg.initial_bracket_halfwidth, cfg.abs_tol, cfg.max_iter);
}

}  // namespace levy_radner
