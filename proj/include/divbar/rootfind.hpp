#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "divbar/errors.hpp"

namespace divbar {

struct RootResult {
    double x = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

/**
 * @brief Bracketed bisection on a continuous function with f(lo), f(hi) of
 *        opposite sign; runs until the bracket width is below xtol or the
 *        iteration budget is spent.
 *
 * Deterministic: pure function of the inputs.
 * @throws NoBracket      if the initial values do not straddle zero
 * @throws NoConvergence  if the budget is exhausted before reaching xtol
 */
template <class F>
RootResult bisect(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw NoBracket("bisect: no sign change on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
    }
    for (int i = 1; i <= max_iter; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || hi - lo < xtol) return {mid, fm, i};
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    throw NoConvergence("bisect: budget exhausted, bracket [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
}

/**
 * @brief Newton polish after a bracketing solve: a few damped Newton steps that
 *        never leave [lo, hi]; falls back to the input if the derivative is bad.
 */
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x0, double lo, double hi, double xtol,
                     int max_iter = 8) {
    double x = x0;
    for (int i = 0; i < max_iter; ++i) {
        const double d = df(x);
        if (!(std::fabs(d) > 0.0) || !std::isfinite(d)) break;
        const double step = f(x) / d;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) break;
        x = xn;
        if (std::fabs(step) < xtol) break;
    }
    return x;
}

/// Grows `hi` geometrically from `lo` until pred(hi) holds or the cap is hit.
/// @throws NoBracket if the cap is exceeded first.
template <class P>
double grow_until(P&& pred, double lo, double factor, double cap) {
    double hi = lo;
    for (int i = 0; i < 200; ++i) {
        if (pred(hi)) return hi;
        if (hi >= cap) break;
        hi = std::min(hi * factor, cap);
    }
    if (pred(cap)) return cap;
    throw NoBracket("grow_until: predicate not satisfied up to cap " + std::to_string(cap));
}

}  // namespace divbar
