#pragma once

#include <cmath>

#include "divbar/errors.hpp"
#include "divbar/hjb.hpp"
#include "divbar/model.hpp"
#include "divbar/ruin.hpp"

namespace divbar {

/**
 * @brief Outcome of the solvency check at risk level epsilon.
 *
 * Either the unconstrained barrier b0 already satisfies
 * P[ruin by T | start at b0] <= epsilon, or the company must hold the larger
 * barrier b* at which the constraint binds. value_at and control_at evaluate
 * the value function and retention fraction of the chosen policy.
 */
struct PolicyDecision {
    double chosen_barrier = 0.0;
    bool constrained = false;
    double attained_ruin_prob = 0.0;  // at the chosen barrier, started from it
    HjbSolution solution;             // solved at chosen_barrier

    double value_at(double x) const { return value_g(solution, x); }
    double control_at(double x) const { return control_A(solution, x); }
};

/// Stopping rule for the b* search: |ruin - epsilon| <= tol_eps within budget.
struct BStarOptions {
    double tol_eps = 1e-4;
    int max_iter = 60;
    double b_hi_cap_factor = 64.0;  // growth stops at this multiple of b0
};

namespace detail {

struct BStarResult {
    double b_star = 0.0;
    double attained = 0.0;
};

/// Bisection for the barrier where the start-at-barrier ruin probability
/// equals epsilon. psi0 is that probability at b0 and must exceed epsilon.
inline BStarResult find_b_star(const ModelParams& p, double b0, double psi0,
                               const PdeGrid& grid, const BStarOptions& opt) {
    auto psi = [&](double b) { return 1.0 - u_of_b(p, p.T, b, grid); };
    double lo = b0;
    double hi = b0;
    double psi_hi = psi0;
    const double cap = opt.b_hi_cap_factor * b0;
    while (psi_hi > p.epsilon) {
        if (hi >= cap) {
            throw NoBracket("solve_b_star: ruin stays above epsilon up to the barrier cap");
        }
        lo = hi;
        hi = std::min(2.0 * hi, cap);
        psi_hi = psi(hi);
    }
    if (std::abs(psi_hi - p.epsilon) <= opt.tol_eps) return {hi, psi_hi};
    for (int it = 0; it < opt.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pm = psi(mid);
        if (std::abs(pm - p.epsilon) <= opt.tol_eps) return {mid, pm};
        (pm > p.epsilon ? lo : hi) = mid;  // psi decreases in b
    }
    throw NoConvergence("solve_b_star: bisection budget exhausted");
}

}  // namespace detail

/**
 * @brief Smallest barrier meeting the ruin constraint when b0 does not.
 *
 * Grows the upper end geometrically from b0 until the constraint holds
 * (the start-at-barrier ruin probability vanishes as b grows, so a bracket
 * exists unless the cap intervenes), then bisects; monotonicity and
 * continuity of the ruin probability in b make the root unique.
 */
inline double solve_b_star(const ModelParams& params, const PdeGrid& grid = {},
                           const BStarOptions& opt = {}) {
    validate(params);
    const double b0 = compute_b0(params);
    const double psi0 = 1.0 - u_of_b(params, params.T, b0, grid);
    if (psi0 <= params.epsilon) {
        throw DomainError("solve_b_star: b0 already meets the constraint");
    }
    return detail::find_b_star(params, b0, psi0, grid, opt).b_star;
}

/// Risk level attained by holding barrier b with full initial capital b.
inline double epsilon_of_b(const ModelParams& params, double b, const PdeGrid& grid = {}) {
    return 1.0 - u_of_b(params, params.T, b, grid);
}

/**
 * @brief Decide between the unconstrained optimum b0 and the bound b*.
 *
 * Evaluates the ruin probability at (b0, start b0, horizon T); if it is
 * within epsilon the unconstrained policy stands, otherwise the barrier is
 * pushed up to b* where the constraint just binds.
 */
inline PolicyDecision decide_policy(const ModelParams& params, const PdeGrid& grid = {},
                                    const BStarOptions& opt = {}) {
    validate(params);
    PolicyDecision out;
    HjbSolution sol0 = solve_hjb(params);
    const double psi0 =
        solve_survival_pde(params, ControlFunction(sol0), sol0.b, params.T, grid).ruin_at(sol0.b);
    if (psi0 <= params.epsilon) {
        out.chosen_barrier = sol0.b;
        out.constrained = false;
        out.attained_ruin_prob = psi0;
        out.solution = sol0;
        return out;
    }
    const detail::BStarResult r = detail::find_b_star(params, sol0.b0, psi0, grid, opt);
    out.chosen_barrier = r.b_star;
    out.constrained = true;
    out.attained_ruin_prob = r.attained;
    out.solution = solve_hjb(params, r.b_star);
    return out;
}

/**
 * @brief Least initial capital x with ruin probability at most epsilon,
 * read off an already-solved survival field (the field does not depend on
 * epsilon, so sweeps reuse one solve).
 *
 * Bisection in x on the final row; the ruin probability is 1 at x = 0 and
 * nonincreasing in x.
 */
inline double risk_capital(const SurvivalField& field, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw RiskOutOfRange("risk_capital: epsilon must lie in (0, 1)");
    }
    if (field.ruin_at(field.b) > epsilon) {
        throw Unattainable("risk_capital: even full capital b cannot meet epsilon");
    }
    double lo = 0.0;        // ruin(lo) > epsilon
    double hi = field.b;    // ruin(hi) <= epsilon
    for (int it = 0; it < 200 && hi - lo > 1e-12 * field.b; ++it) {
        const double mid = 0.5 * (lo + hi);
        (field.ruin_at(mid) > epsilon ? lo : hi) = mid;
    }
    return hi;
}

/// Convenience form: solves the PDE at barrier b, then inverts in x.
inline double risk_capital(const ModelParams& params, double b, const PdeGrid& grid = {}) {
    validate(params);
    const HjbSolution sol = solve_hjb(params, b);
    const SurvivalField field =
        solve_survival_pde(params, ControlFunction(sol), b, params.T, grid);
    return risk_capital(field, params.epsilon);
}

}  // namespace divbar
