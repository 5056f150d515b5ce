#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "divbar/errors.hpp"
#include "divbar/hjb.hpp"
#include "divbar/model.hpp"
#include "divbar/parallel.hpp"
#include "divbar/quadrature.hpp"
#include "divbar/tridiag.hpp"

namespace divbar {

/**
 * @brief Space/time resolution for the survival PDE.
 *
 * nt = 0 picks the step from the positivity target dt = hmin^2 / (2 a_max),
 * which keeps the Crank-Nicolson explicit half-step nonnegative and hence the
 * discrete maximum principle intact. store_rows bounds how many time slices
 * are retained (plus the final one); the full history at default resolution
 * would be hundreds of megabytes.
 */
struct PdeGrid {
    int ny = 400;
    int nt = 0;           // 0 = automatic from the positivity target
    double tol_clip = 1e-8;
    int store_rows = 201;
};

/**
 * @brief Discrete survival probability phi(t, y) on [0, T] x [0, b].
 *
 * Rows are a decimated subset of the time levels (times[i] gives the stamp of
 * values[i]); the final row t = T is always present. Invariants: values lie in
 * [0, 1] up to tol_clip, values[i][0] = 0 for times[i] > 0, the initial row is
 * 1 away from the origin, and rows are nonincreasing in t at fixed y.
 */
struct SurvivalField {
    double b = 0.0;
    double T = 0.0;
    int ny = 0;
    int nt = 0;
    std::vector<double> y;                    // ny spatial nodes, y[0] = 0, y[ny-1] = b
    std::vector<double> times;                // retained time stamps, ascending
    std::vector<std::vector<double>> values;  // values[i][j] = phi(times[i], y[j])

    const std::vector<double>& final_row() const { return values.back(); }

    /// phi(T, x), linear in y between nodes.
    double survival_at(double x) const {
        if (!(x >= 0.0 && x <= b)) throw DomainError("survival_at: x must lie in [0, b]");
        const std::vector<double>& row = values.back();
        auto it = std::upper_bound(y.begin(), y.end(), x);
        if (it == y.begin()) return row.front();
        if (it == y.end()) return row.back();
        const std::size_t j = static_cast<std::size_t>(it - y.begin());
        const double w = (x - y[j - 1]) / (y[j] - y[j - 1]);
        return row[j - 1] + w * (row[j] - row[j - 1]);
    }

    double ruin_at(double x) const { return 1.0 - survival_at(x); }
};

/// Samples of b -> ruin probability started at b, for monotonicity sweeps.
struct RuinCurve {
    std::vector<double> b;
    std::vector<double> ruin;  // 1 - u(b[i])
};

namespace detail {

/// Spatial nodes on [0, b]; when the control has a kink at m in (0, b) the
/// grid is two uniform segments joined exactly at m.
inline std::vector<double> pde_nodes(const HjbSolution& sol, double b, int ny) {
    std::vector<double> y(static_cast<std::size_t>(ny));
    const double m = sol.m;
    if (sol.regime == Regime::Interior && m > 0.0 && m < b) {
        int k = static_cast<int>(std::lround((ny - 1) * m / b));
        k = std::clamp(k, 2, ny - 3);
        const double h1 = m / k;
        const double h2 = (b - m) / (ny - 1 - k);
        for (int j = 0; j <= k; ++j) y[j] = h1 * j;
        for (int j = k + 1; j < ny; ++j) y[j] = m + h2 * (j - k);
        y[k] = m;
    } else {
        const double h = b / (ny - 1);
        for (int j = 0; j < ny; ++j) y[j] = h * j;
    }
    y[0] = 0.0;
    y[static_cast<std::size_t>(ny) - 1] = b;
    return y;
}

}  // namespace detail

/**
 * @brief Crank-Nicolson solve of phi_t = a(y) phi_yy + mu(y) phi_y.
 *
 * a(y) = (sigma A*(y))^2 / 2 and mu(y) = lambda A*(y) - delta come from the
 * control; boundary conditions are phi(t, 0) = 0, phi_y(t, b) = 0 (second
 * order ghost node) and phi(0, y) = 1 away from the origin. The first two
 * time steps are replaced by four backward Euler half steps, which damps the
 * initial-corner oscillation without touching the implicit factorization:
 * a half step's matrix I - (dt/2) L equals the Crank-Nicolson one.
 */
inline SurvivalField solve_survival_pde(const ModelParams& params,
                                        const ControlFunction& control, double b, double T,
                                        const PdeGrid& grid = {}) {
    validate(params);
    if (!(b > 0.0) || !(T > 0.0)) throw ConfigError("solve_survival_pde: need b > 0, T > 0");
    if (grid.ny < 3 || (grid.nt != 0 && grid.nt < 3)) {
        throw GridError("solve_survival_pde: need at least 3 nodes along each axis");
    }
    const HjbSolution& sol = control.solution();
    const int ny = grid.ny;
    const std::size_t N = static_cast<std::size_t>(ny) - 1;  // unknowns j = 1..ny-1

    SurvivalField field;
    field.b = b;
    field.T = T;
    field.ny = ny;
    field.y = detail::pde_nodes(sol, b, ny);
    const std::vector<double>& y = field.y;

    std::vector<double> a(N), mu(N);
    double a_max = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double A = control_A(sol, y[i + 1]);
        a[i] = 0.5 * params.sigma2() * A * A;
        mu[i] = params.lambda * A - params.delta();
        a_max = std::max(a_max, a[i]);
    }
    double h_min = y[1] - y[0];
    for (int j = 2; j < ny; ++j) h_min = std::min(h_min, y[j] - y[j - 1]);

    int nt = grid.nt;
    if (nt == 0) {
        const double dt_target = h_min * h_min / (2.0 * a_max);
        nt = std::max(3, static_cast<int>(std::ceil(T / dt_target - 1e-9)));
    }
    field.nt = nt;
    const double dt = T / nt;

    // spatial operator L on the unknowns; row N-1 carries the Neumann ghost
    std::vector<double> Ll(N), Ld(N), Lu(N);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const std::size_t j = i + 1;
        const double hm = y[j] - y[j - 1];
        const double hp = y[j + 1] - y[j];
        const double wm = 2.0 / (hm * (hm + hp));
        const double wp = 2.0 / (hp * (hm + hp));
        Ll[i] = a[i] * wm - mu[i] * hp / (hm * (hm + hp));
        Ld[i] = -a[i] * (wm + wp) + mu[i] * (hp - hm) / (hm * hp);
        Lu[i] = a[i] * wp + mu[i] * hm / (hp * (hm + hp));
    }
    {
        const double h = y[ny - 1] - y[ny - 2];
        Ll[N - 1] = 2.0 * a[N - 1] / (h * h);
        Ld[N - 1] = -2.0 * a[N - 1] / (h * h);
        Lu[N - 1] = 0.0;
    }

    std::vector<double> il(N), id(N), iu(N);
    for (std::size_t i = 0; i < N; ++i) {
        il[i] = -0.5 * dt * Ll[i];
        id[i] = 1.0 - 0.5 * dt * Ld[i];
        iu[i] = -0.5 * dt * Lu[i];
    }
    const TridiagFactor M(il, id, iu);

    std::vector<double> u(N, 1.0), rhs(N);

    const int slices = std::max(1, grid.store_rows - 1);
    const int stride = std::max(1, (nt + slices - 1) / slices);  // <= store_rows kept slices
    auto store = [&](int step) {
        std::vector<double> row(static_cast<std::size_t>(ny), 0.0);
        if (step == 0) {
            std::fill(row.begin() + 1, row.end(), 1.0);
        } else {
            std::copy(u.begin(), u.end(), row.begin() + 1);
        }
        field.times.push_back(step * dt);
        field.values.push_back(std::move(row));
    };
    auto check = [&](int step) {
        for (double v : u) {
            if (!(v >= -grid.tol_clip && v <= 1.0 + grid.tol_clip)) {
                throw InstabilityError("solve_survival_pde: solution left [0, 1] at step " +
                                       std::to_string(step) + "; refine the grid");
            }
        }
    };

    store(0);
    // Rannacher startup: backward Euler half steps through t = 2 dt
    for (int h = 0; h < 4; ++h) {
        M.solve(u);
        if (h % 2 == 1) {
            const int step = (h + 1) / 2;
            check(step);
            if (step % stride == 0) store(step);
        }
    }
    for (int step = 3; step <= nt; ++step) {
        for (std::size_t i = 0; i < N; ++i) {
            const double lo = i == 0 ? 0.0 : u[i - 1];  // Dirichlet phi = 0 below
            const double hi = i + 1 < N ? u[i + 1] : 0.0;
            rhs[i] = u[i] + 0.5 * dt * (Ll[i] * lo + Ld[i] * u[i] + Lu[i] * hi);
        }
        u.swap(rhs);
        M.solve(u);
        check(step);
        if (step % stride == 0 || step == nt) store(step);
    }
    return field;
}

/// Probability of ruin before T starting from x under the barrier-b policy.
inline double ruin_probability(const ModelParams& params, const ControlFunction& control,
                               double b, double T, double x, const PdeGrid& grid = {}) {
    if (!(x >= 0.0 && x <= b)) throw DomainError("ruin_probability: x must lie in [0, b]");
    return solve_survival_pde(params, control, b, T, grid).ruin_at(x);
}

/// Survival probability at the barrier itself, u(b) = phi^b(T, b).
inline double u_of_b(const ModelParams& params, double T, double b, const PdeGrid& grid = {}) {
    const HjbSolution sol = solve_hjb(params, b);
    return solve_survival_pde(params, ControlFunction(sol), b, T, grid).final_row().back();
}

/// b -> ruin probability at b, over a barrier grid; solves run independently.
inline RuinCurve ruin_curve(const ModelParams& params, double T,
                            const std::vector<double>& barriers, const PdeGrid& grid = {},
                            int threads = 1) {
    RuinCurve curve;
    curve.b = barriers;
    curve.ruin.resize(barriers.size());
    parallel_for(barriers.size(), threads, [&](std::size_t i) {
        curve.ruin[i] = 1.0 - u_of_b(params, T, barriers[i], grid);
    });
    return curve;
}

/**
 * @brief P[a Brownian motion with drift mu and volatility sigma, started at
 * x > 0, reaches 0 by time T], via the first-passage density integral
 * x / (sqrt(2 pi) sigma) * int_0^T t^{-3/2} exp(-(x + mu t)^2 / (2 sigma^2 t)) dt.
 *
 * The integrable t^{-3/2} endpoint is removed by the substitution t = s^2;
 * the transformed integrand vanishes to all orders at s = 0.
 */
inline double hitting_probability(double mu, double sigma, double x, double T) {
    if (!(sigma > 0.0) || !(x > 0.0) || !(T > 0.0)) {
        throw DomainError("hitting_probability: need sigma, x, T > 0");
    }
    const double s2 = sigma * sigma;
    auto g = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double t = s * s;
        const double num = x + mu * t;
        return 2.0 / t * std::exp(-num * num / (2.0 * s2 * t));
    };
    const double integral = integrate(g, 0.0, std::sqrt(T), 1e-12);
    return x / (std::sqrt(2.0 * M_PI) * sigma) * integral;
}

/**
 * @brief Analytic positive lower bound on the ruin probability at b0.
 *
 * Returns the smaller of an exponential-moment bound, 4 [1 - Phi(x / (d sigma
 * sqrt(T)))]^2 exp(-(2/sigma^2)(lambda^2 + delta^2) T) with d = A*(0), and
 * the probability that a Brownian motion with drift mu ever reaches -x by T.
 */
inline double epsilon0_lower_bound(const ModelParams& params, double x, double T) {
    validate(params);
    const double b0 = compute_b0(params);
    if (!(x > 0.0 && x <= b0)) throw DomainError("epsilon0_lower_bound: need 0 < x <= b0");
    if (!(T > 0.0)) throw DomainError("epsilon0_lower_bound: need T > 0");
    const double sig = params.sigma;
    const double d = std::min(1.0, 2.0 * (params.lambda - params.mu) / params.lambda);
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };

    const double tail = 1.0 - Phi(x / (d * sig * std::sqrt(T)));
    const double expo = (2.0 / params.sigma2()) *
                        (params.lambda * params.lambda + params.delta() * params.delta()) * T;
    const double term1 = 4.0 * tail * tail * std::exp(-expo);
    const double term2 = hitting_probability(params.mu, sig, x, T);
    return std::min(term1, term2);
}

}  // namespace divbar
