#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "divbar/errors.hpp"
#include "divbar/hjb.hpp"
#include "divbar/simulate.hpp"

using namespace divbar;

namespace {

ModelParams params(double lambda, double T) {
    return {2.0, lambda, std::sqrt(50.0), 0.05, T, 0.3};
}

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P[BM with drift mu, vol sigma, started at x > 0, hits 0 by T] (reflection
/// principle; independent oracle for the path engine).
double fpt_closed_form(double mu, double sigma, double x, double T) {
    const double s = sigma * std::sqrt(T);
    return phi((-x - mu * T) / s) + std::exp(-2.0 * mu * x / (sigma * sigma)) *
                                        phi((-x + mu * T) / s);
}

TEST(Simulate, ConfigValidation) {
    ModelParams p = params(6.0, 5.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 10;
    EXPECT_THROW(simulate_path(p, A, sol.b, sol.b + 1.0, cfg, 0), ConfigError);  // x0 > b
    EXPECT_THROW(simulate_path(p, A, sol.b, -0.1, cfg, 0), ConfigError);
    EXPECT_THROW(SimEngine(p, A, -1.0, cfg), ConfigError);
    SimConfig bad = cfg;
    bad.dt = 10.0;  // exceeds the T=5 horizon
    EXPECT_THROW(SimEngine(p, A, sol.b, bad), ConfigError);
    bad = cfg;
    bad.n_paths = 0;
    EXPECT_THROW(SimEngine(p, A, sol.b, bad), ConfigError);
}

TEST(Simulate, StartingBrokeIsImmediateRuin) {
    ModelParams p = params(6.0, 5.0);
    HjbSolution sol = solve_hjb(p);
    SimConfig cfg;
    PathResult r = simulate_path(p, ControlFunction(sol), sol.b, 0.0, cfg, 3);
    EXPECT_TRUE(r.ruined);
    EXPECT_EQ(r.ruin_time, 0.0);
    EXPECT_EQ(r.survival_weight, 0.0);
    EXPECT_EQ(r.discounted_dividends, 0.0);
}

TEST(Simulate, DefaultsAreResolvedInTheConfig) {
    ModelParams p = params(3.0, 50.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;  // dt = 0, horizon = 0
    SimEngine ruin_engine(p, A, sol.b, cfg, /*value_horizon=*/false);
    EXPECT_DOUBLE_EQ(ruin_engine.config().horizon, 50.0);
    const double dt_cap = 1e-2 * p.sigma2() / (p.lambda * p.lambda);
    EXPECT_DOUBLE_EQ(ruin_engine.config().dt, std::min(1e-3 * 50.0, dt_cap));
    SimEngine value_engine(p, A, sol.b, cfg, /*value_horizon=*/true);
    EXPECT_DOUBLE_EQ(value_engine.config().horizon, std::log(1e6) / p.c);
}

TEST(Simulate, DeterministicAcrossCallsAndThreadCounts) {
    ModelParams p = params(3.0, 20.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.dt = 0.05;
    cfg.seed = 99;
    SimEngine engine(p, A, sol.b, cfg);
    PathResult a = engine.simulate_path(10.0, 17);
    PathResult b = engine.simulate_path(10.0, 17);
    EXPECT_EQ(a.survival_weight, b.survival_weight);
    EXPECT_EQ(a.discounted_dividends, b.discounted_dividends);
    EXPECT_EQ(a.ruin_time, b.ruin_time);

    PathBatch ref;
    for (int threads : {1, 2, 4}) {
        SimConfig c2 = cfg;
        c2.threads = threads;
        PathBatch batch = estimate_ruin_prob(p, A, sol.b, 10.0, c2);
        if (threads == 1) {
            ref = batch;
            continue;
        }
        ASSERT_EQ(batch.paths.size(), ref.paths.size());
        for (std::size_t i = 0; i < batch.paths.size(); ++i) {
            EXPECT_EQ(batch.paths[i].survival_weight, ref.paths[i].survival_weight) << i;
            EXPECT_EQ(batch.paths[i].discounted_dividends, ref.paths[i].discounted_dividends);
        }
        EXPECT_EQ(batch.ruin_prob, ref.ruin_prob);
        EXPECT_EQ(batch.value, ref.value);
    }
}

TEST(Simulate, SeedChangesTheSample) {
    ModelParams p = params(3.0, 20.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig a, b;
    a.n_paths = b.n_paths = 300;
    a.dt = b.dt = 0.05;
    a.seed = 1;
    b.seed = 2;
    EXPECT_NE(estimate_ruin_prob(p, A, sol.b, 10.0, a).ruin_prob,
              estimate_ruin_prob(p, A, sol.b, 10.0, b).ruin_prob);
}

TEST(Simulate, FirstPassageMatchesClosedFormForDriftedBrownianMotion) {
    // cheap-heavy keeps full retention, so with the barrier far away the
    // reserve is exactly a Brownian motion with drift mu
    ModelParams p = params(6.0, 5.0);
    HjbSolution sol = solve_hjb(p, 1e6);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 0.005;
    cfg.seed = 12345;
    const double x = 10.0;
    PathBatch batch = estimate_ruin_prob(p, A, 1e6, x, cfg);
    const double exact = fpt_closed_form(p.mu, p.sigma, x, 5.0);
    EXPECT_NEAR(batch.ruin_prob, exact, 3.0 * batch.ruin_stderr + 0.003);
    // far barrier is never touched: no dividends on any path
    for (const PathResult& pr : batch.paths) EXPECT_EQ(pr.discounted_dividends, 0.0);
}

TEST(Simulate, ProjectionSchemeIsBiasedLowAtTheBarrier) {
    ModelParams p = params(3.0, 50.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.dt = 0.05;
    cfg.seed = 7;
    PathBatch bridge = estimate_ruin_prob(p, A, sol.b, sol.b, cfg);
    cfg.scheme = SimConfig::Scheme::projection;
    PathBatch proj = estimate_ruin_prob(p, A, sol.b, sol.b, cfg);
    // crossing the ruin boundary or the barrier between monitoring times is
    // invisible to the projection scheme, so it undercounts ruin
    EXPECT_LT(proj.ruin_prob, bridge.ruin_prob - 0.02);
    for (const PathResult& pr : proj.paths) {
        EXPECT_TRUE(pr.survival_weight == 0.0 || pr.survival_weight == 1.0);
    }
    EXPECT_NEAR(proj.ruin_stderr,
                std::sqrt(proj.ruin_prob * (1.0 - proj.ruin_prob) / cfg.n_paths), 1e-15);
}

TEST(Simulate, CoupledPathsOrderedByInitialCapital) {
    // same seed, no reflection: the higher-started path dominates pathwise
    ModelParams p = params(6.0, 5.0);
    HjbSolution sol = solve_hjb(p, 1e6);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 0.01;
    cfg.seed = 31;
    PathBatch low = estimate_ruin_prob(p, A, 1e6, 5.0, cfg);
    PathBatch high = estimate_ruin_prob(p, A, 1e6, 8.0, cfg);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        EXPECT_GE(high.paths[i].survival_weight, low.paths[i].survival_weight) << i;
        if (high.paths[i].ruined) {
            EXPECT_TRUE(low.paths[i].ruined) << i;
        }
    }
    EXPECT_LE(high.ruin_prob, low.ruin_prob);
}

TEST(Simulate, ValueEstimateMatchesClosedForm) {
    ModelParams p = params(6.0, 50.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.dt = 0.02;
    cfg.seed = 11;
    const double x = 0.5 * sol.b0;
    PathBatch batch = estimate_value(p, A, sol.b, x, cfg);
    const double f = value_f(sol, x);
    EXPECT_NEAR(batch.value, f, 3.0 * batch.value_stderr + 0.02 * f);
    EXPECT_GT(batch.value_stderr, 0.0);
}

TEST(Simulate, RuinBookkeeping) {
    ModelParams p = params(3.0, 50.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 200;
    cfg.dt = 0.05;
    cfg.seed = 5;
    PathBatch batch = estimate_ruin_prob(p, A, sol.b, 2.0, cfg);
    int ruined = 0;
    double weight_sum = 0.0, div_sum = 0.0;
    for (const PathResult& pr : batch.paths) {
        if (pr.ruined) {
            ++ruined;
            EXPECT_EQ(pr.survival_weight, 0.0);
            EXPECT_GT(pr.ruin_time, 0.0);
            EXPECT_LE(pr.ruin_time, 50.0);
        } else {
            EXPECT_EQ(pr.ruin_time, std::numeric_limits<double>::infinity());
        }
        weight_sum += pr.survival_weight;
        div_sum += pr.discounted_dividends;
    }
    EXPECT_GT(ruined, 0);  // starting at x = 2 over T = 50, some paths must fail
    EXPECT_DOUBLE_EQ(batch.ruin_prob, 1.0 - weight_sum / cfg.n_paths);
    EXPECT_DOUBLE_EQ(batch.value, div_sum / cfg.n_paths);
}

TEST(Simulate, PartialFinalStepIsHandled) {
    ModelParams p = params(6.0, 1.0);
    HjbSolution sol = solve_hjb(p);
    ControlFunction A(sol);
    SimConfig cfg;
    cfg.n_paths = 50;
    cfg.dt = 0.4;  // 1.0 / 0.4 is not an integer
    cfg.seed = 2;
    PathBatch a = estimate_ruin_prob(p, A, sol.b, sol.b, cfg);
    PathBatch b = estimate_ruin_prob(p, A, sol.b, sol.b, cfg);
    EXPECT_EQ(a.ruin_prob, b.ruin_prob);
    EXPECT_EQ(a.value, b.value);
}

}  // namespace
