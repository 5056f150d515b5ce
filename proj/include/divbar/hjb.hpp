#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "divbar/errors.hpp"
#include "divbar/model.hpp"
#include "divbar/quadrature.hpp"
#include "divbar/rootfind.hpp"

namespace divbar {

/**
 * @brief Closed-form solution of the dividend/reinsurance HJB at a fixed
 *        barrier: regime tag, coefficients, and the data needed to evaluate
 *        the value function and the optimal retention control.
 *
 * Immutable after construction; evaluators are pure functions of it.
 */
struct HjbSolution {
    ModelParams params;
    Regime regime = Regime::CheapHeavy;
    double b = 0.0;      // dividend barrier this solution is built for, b >= b0
    double zeta1 = 0.0;  // positive root of (sigma^2/2) z^2 + mu z - c = 0
    double zeta2 = 0.0;  // negative root
    double b0 = 0.0;     // unconstrained optimal barrier (smooth-fit point)
    double C0 = 0.0;     // scale of the exponential piece, full-retention branch

    // Interior-regime block (lambda < 2 mu); zero otherwise.
    double alpha = 0.0;  // lambda^2 / (2 sigma^2)
    double z1 = 0.0;     // marginal value f'(m) at the switching level
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
    double C4 = 0.0;
    double m = 0.0;      // switching level: partial reinsurance below, full above
    double Delta = 0.0;  // b - m
    double z_max = 0.0;  // X(z_max) <= 0; upper bracket for X-inversion
};

/// Roots of (sigma^2/2) zeta^2 + mu zeta - c = 0; zeta1 > 0 > zeta2.
inline std::pair<double, double> compute_zetas(const ModelParams& p) {
    const double s = std::sqrt(p.mu * p.mu + 2.0 * p.sigma2() * p.c);
    return {(-p.mu + s) / p.sigma2(), (-p.mu - s) / p.sigma2()};
}

/**
 * @brief Unconstrained optimal barrier: the unique root of the smooth-fit
 *        condition zeta1^2 e^{zeta1 b} = zeta2^2 e^{zeta2 b}.
 *
 * Closed form 2 ln|zeta2/zeta1| / (zeta1 - zeta2), positive iff mu > 0
 * (|zeta2| > zeta1 exactly when the drift is positive).
 */
inline double compute_b0(const ModelParams& p) {
    const auto [zeta1, zeta2] = compute_zetas(p);
    return 2.0 * std::log(std::fabs(zeta2 / zeta1)) / (zeta1 - zeta2);
}

/// X(z) = C3 z^{-1-c/alpha} + C4 - (delta/(alpha+c)) ln z, strictly decreasing.
inline double X_of_z(const HjbSolution& sol, double z) {
    if (!(z > 0.0)) throw DomainError("X(z) requires z > 0, got " + std::to_string(z));
    const ModelParams& p = sol.params;
    return sol.C3 * std::pow(z, -1.0 - p.c / sol.alpha) + sol.C4 -
           p.delta() / (sol.alpha + p.c) * std::log(z);
}

/// dX/dz, used by the control formula and Newton polish.
inline double X_deriv(const HjbSolution& sol, double z) {
    const ModelParams& p = sol.params;
    return -(1.0 + p.c / sol.alpha) * sol.C3 * std::pow(z, -2.0 - p.c / sol.alpha) -
           p.delta() / ((sol.alpha + p.c) * z);
}

/**
 * @brief Inverts X on [z1, z_max] by bracketed bisection plus Newton polish.
 *
 * X is strictly decreasing there with X(z1) = m and X(z_max) <= 0, so any
 * y in [0, m] has a unique preimage.
 * @throws DomainError if y lies outside [0, m]
 */
inline double X_inverse(const HjbSolution& sol, double y) {
    if (!(y >= 0.0 && y <= sol.m)) {
        throw DomainError("X_inverse: y=" + std::to_string(y) + " outside [0, m]");
    }
    if (y == sol.m) return sol.z1;
    auto f = [&](double z) { return X_of_z(sol, z) - y; };
    const double xtol = 1e-13 * sol.z_max;
    RootResult r = bisect(f, sol.z1, sol.z_max, xtol);
    return newton_polish(f, [&](double z) { return X_deriv(sol, z); }, r.x, sol.z1, sol.z_max,
                         1e-15 * sol.z_max);
}

namespace detail {

inline double z1_of_Delta(const ModelParams& p, double zeta1, double zeta2, double Delta) {
    const double l = p.lambda / p.sigma2();
    return (zeta1 - zeta2) /
           ((-zeta2 - l) * std::exp(zeta1 * Delta) + (zeta1 + l) * std::exp(zeta2 * Delta));
}

/// Fills C1..C4 from a given z1 (the printed coefficient formulas).
inline void fill_interior_coeffs(HjbSolution& sol) {
    const ModelParams& p = sol.params;
    const double l = p.lambda / p.sigma2();
    const double al = sol.alpha;
    const double d = p.delta();
    sol.C1 = sol.z1 * (-sol.zeta2 - l) / (sol.zeta1 - sol.zeta2);
    sol.C2 = sol.z1 * (sol.zeta1 + l) / (sol.zeta1 - sol.zeta2);
    sol.C3 = std::pow(sol.z1, 1.0 + p.c / al) * p.lambda *
             (p.c + al * (2.0 * p.mu / p.lambda - 1.0)) / (2.0 * (al + p.c) * (al + p.c));
    sol.C4 = -d * p.c / ((al + p.c) * (al + p.c)) +
             d * al / ((al + p.c) * (al + p.c)) * std::log(sol.C3) +
             d * al / ((al + p.c) * (al + p.c)) *
                 std::log((al + p.c) * (al + p.c) / (d * p.c));
}

}  // namespace detail

/**
 * @brief Solves the joint system {z1 = z1(b - m), C3,C4 = C(z1), m = X(z1)}
 *        of the partial-reinsurance branch at barrier b.
 *
 * One-dimensional root problem F(m) = X(z1(b-m)) - m on (0, b): bracketed
 * bisection, then secant polish; residual checked to 1e-9.
 * @throws NoConvergence if the residual tolerance cannot be met
 */
inline HjbSolution solve_interior_coefficients(const ModelParams& p, double b) {
    HjbSolution sol;
    sol.params = p;
    sol.regime = Regime::Interior;
    sol.b = b;
    std::tie(sol.zeta1, sol.zeta2) = compute_zetas(p);
    sol.b0 = compute_b0(p);
    sol.alpha = p.alpha();

    auto F = [&](double m) {
        HjbSolution trial = sol;
        trial.z1 = detail::z1_of_Delta(p, sol.zeta1, sol.zeta2, b - m);
        detail::fill_interior_coeffs(trial);
        return X_of_z(trial, trial.z1) - m;
    };
    const double lo = 1e-8 * b;
    const double hi = b * (1.0 - 1e-12);
    RootResult r = bisect(F, lo, hi, 1e-6 * b);
    // F is nearly linear in m; a secant step or two reaches machine accuracy
    double m = r.x;
    for (int i = 0; i < 20; ++i) {
        const double h = 1e-6 * std::max(1.0, m);
        const double dF = (F(m + h) - F(m - h)) / (2.0 * h);
        if (!(std::fabs(dF) > 0.0)) break;
        const double step = F(m) / dF;
        if (!(m - step > lo && m - step < hi)) break;
        m -= step;
        if (std::fabs(step) < 1e-13 * std::max(1.0, m)) break;
    }
    sol.m = m;
    sol.Delta = b - m;
    sol.z1 = detail::z1_of_Delta(p, sol.zeta1, sol.zeta2, sol.Delta);
    detail::fill_interior_coeffs(sol);
    const double resid = std::fabs(X_of_z(sol, sol.z1) - sol.m);
    if (!(resid <= 1e-9 * std::max(1.0, sol.m))) {
        throw NoConvergence("interior coefficient solve: residual " + std::to_string(resid));
    }
    if (!(sol.m > 0.0 && sol.m < b)) {
        throw NoConvergence("interior coefficient solve: m outside (0,b)");
    }
    // upper bracket for X-inversion: grow until X(z) <= 0
    double zm = sol.z1;
    for (int i = 0; i < 600 && X_of_z(sol, zm) > 0.0; ++i) zm *= 2.0;
    sol.z_max = zm;
    // full-retention scale is still well-defined (used by glue checks)
    sol.C0 = 1.0 / (sol.zeta1 * std::exp(sol.zeta1 * b) - sol.zeta2 * std::exp(sol.zeta2 * b));
    return sol;
}

/**
 * @brief Builds the closed-form HJB solution at barrier b (>= b0) for either
 *        regime; b defaults to b0 when omitted.
 */
inline HjbSolution solve_hjb(const ModelParams& p, double b) {
    validate(p);
    const double b0 = compute_b0(p);
    if (!(b0 > 0.0)) {
        throw DomainError("smooth-fit barrier is not positive (needs mu > 0)");
    }
    if (!(b >= b0 * (1.0 - 1e-12))) {
        throw DomainError("barrier b=" + std::to_string(b) + " below b0=" + std::to_string(b0));
    }
    if (classify(p) == Regime::Interior) return solve_interior_coefficients(p, b);
    HjbSolution sol;
    sol.params = p;
    sol.regime = Regime::CheapHeavy;
    sol.b = b;
    std::tie(sol.zeta1, sol.zeta2) = compute_zetas(p);
    sol.b0 = b0;
    sol.C0 = 1.0 / (sol.zeta1 * std::exp(sol.zeta1 * b) - sol.zeta2 * std::exp(sol.zeta2 * b));
    return sol;
}

inline HjbSolution solve_hjb(const ModelParams& p) { return solve_hjb(p, compute_b0(p)); }

/**
 * @brief Optimal retention A*(x) in [0,1]: fraction of risk kept at reserve x.
 *
 * Full retention everywhere in the cheap-heavy regime; in the interior regime
 * partial reinsurance -(lambda/sigma^2) z X'(z), z = X^{-1}(x), below the
 * switching level m (the x = m point takes the right-limit value 1).
 */
inline double control_A(const HjbSolution& sol, double x) {
    if (x < 0.0) throw DomainError("control_A: x must be >= 0");
    if (sol.regime == Regime::CheapHeavy || x >= sol.m) return 1.0;
    const double z = X_inverse(sol, x);
    return -(sol.params.lambda / sol.params.sigma2()) * z * X_deriv(sol, z);
}

namespace detail {

// piecewise derivative evaluators used by value_g and the residual audit
struct ValueDerivs {
    double v;
    double v1;
    double v2;
};

inline ValueDerivs eval_cheapheavy(const HjbSolution& sol, double x) {
    const double e1 = std::exp(sol.zeta1 * x);
    const double e2 = std::exp(sol.zeta2 * x);
    if (x <= sol.b) {
        return {sol.C0 * (e1 - e2), sol.C0 * (sol.zeta1 * e1 - sol.zeta2 * e2),
                sol.C0 * (sol.zeta1 * sol.zeta1 * e1 - sol.zeta2 * sol.zeta2 * e2)};
    }
    const double eb1 = std::exp(sol.zeta1 * sol.b);
    const double eb2 = std::exp(sol.zeta2 * sol.b);
    return {x - sol.b + sol.C0 * (eb1 - eb2), 1.0, 0.0};
}

inline ValueDerivs eval_f4(const HjbSolution& sol, double x) {
    const double e1 = std::exp(sol.zeta1 * (x - sol.m));
    const double e2 = std::exp(sol.zeta2 * (x - sol.m));
    return {sol.C1 / sol.zeta1 * e1 + sol.C2 / sol.zeta2 * e2, sol.C1 * e1 + sol.C2 * e2,
            sol.C1 * sol.zeta1 * e1 + sol.C2 * sol.zeta2 * e2};
}

inline ValueDerivs eval_interior(const HjbSolution& sol, double x) {
    if (x <= sol.m) {
        // f3(x) = integral of X^{-1} from 0 to x; f3' = X^{-1}, f3'' = 1/X'(z)
        const double z = X_inverse(sol, x);
        const double v = integrate([&](double y) { return X_inverse(sol, y); }, 0.0, x, 1e-10);
        return {v, z, 1.0 / X_deriv(sol, z)};
    }
    if (x <= sol.b) return eval_f4(sol, x);
    const ValueDerivs at_b = eval_f4(sol, sol.b);
    return {x - sol.b + at_b.v, 1.0, 0.0};
}

inline ValueDerivs eval_value(const HjbSolution& sol, double x) {
    if (x < 0.0) throw DomainError("value evaluation requires x >= 0");
    return sol.regime == Regime::CheapHeavy ? eval_cheapheavy(sol, x) : eval_interior(sol, x);
}

}  // namespace detail

/// Value of the barrier-b policy, g(x, b); equals f(x) when b = b0.
inline double value_g(const HjbSolution& sol, double x) {
    return detail::eval_value(sol, x).v;
}

/// g'(x, b), analytic on every piece.
inline double value_g_deriv1(const HjbSolution& sol, double x) {
    return detail::eval_value(sol, x).v1;
}

/// g''(x, b), analytic on every piece.
inline double value_g_deriv2(const HjbSolution& sol, double x) {
    return detail::eval_value(sol, x).v2;
}

/**
 * @brief Unconstrained value function f(x); the solution must be built at the
 *        smooth-fit barrier b0.
 */
inline double value_f(const HjbSolution& sol, double x) {
    if (std::fabs(sol.b - sol.b0) > 1e-9 * std::max(1.0, sol.b0)) {
        throw DomainError("value_f requires a solution built at b = b0");
    }
    return value_g(sol, x);
}

/// Audit record of one HJB evaluation point.
struct HjbResidual {
    double at_optimal = 0.0;    // L_a v(x) at a = A*(x); should be ~0
    double max_over_grid = 0.0; // max over the retention grid; should be <= ~0
};

/**
 * @brief Evaluates max_a [ (sigma^2/2) a^2 v'' + (mu - (1-a) lambda) v' - c v ]
 *        over a uniform retention grid joined with A*(x), using the analytic
 *        piecewise derivatives.
 *
 * The value function solves the HJB, so the maximum is attained (=0) at
 * a = A*(x) and the expression is nonpositive elsewhere.
 */
inline HjbResidual hjb_residual(const HjbSolution& sol, double x, int a_grid = 400) {
    if (!(x > 0.0 && x < sol.b)) throw DomainError("hjb_residual wants 0 < x < b");
    const ModelParams& p = sol.params;
    const auto d = detail::eval_value(sol, x);
    auto op = [&](double a) {
        return 0.5 * p.sigma2() * a * a * d.v2 + (p.mu - (1.0 - a) * p.lambda) * d.v1 -
               p.c * d.v;
    };
    const double astar = control_A(sol, x);
    HjbResidual r;
    r.at_optimal = op(astar);
    r.max_over_grid = r.at_optimal;
    for (int i = 0; i <= a_grid; ++i) {
        r.max_over_grid = std::max(r.max_over_grid, op(static_cast<double>(i) / a_grid));
    }
    return r;
}

/**
 * @brief Closure binding an HjbSolution to the x -> A*(x) evaluator, the shape
 *        the PDE and Monte Carlo engines consume.
 */
class ControlFunction {
public:
    explicit ControlFunction(const HjbSolution& sol) : sol_(&sol) {}
    double operator()(double x) const { return control_A(*sol_, x); }
    const HjbSolution& solution() const { return *sol_; }

private:
    const HjbSolution* sol_;
};

}  // namespace divbar
