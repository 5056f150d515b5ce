#include <gtest/gtest.h>

#include <cmath>

#include "divbar/errors.hpp"
#include "divbar/hjb.hpp"

using namespace divbar;

namespace {

// Figure-caption parameter set: mu=2, sigma^2=50, c=0.05, lambda regime-dependent.
ModelParams params(double lambda) {
    return {2.0, lambda, std::sqrt(50.0), 0.05, 50.0, 0.3};
}

TEST(Hjb, ZetaRootsClosedForm) {
    for (double lambda : {3.0, 6.0}) {
        auto [z1, z2] = compute_zetas(params(lambda));  // lambda plays no role here
        EXPECT_NEAR(z1, 0.02, 1e-12);
        EXPECT_NEAR(z2, -0.10, 1e-12);
        // roots of (sigma^2/2) z^2 + mu z - c
        EXPECT_NEAR(25.0 * z1 * z1 + 2.0 * z1 - 0.05, 0.0, 1e-14);
        EXPECT_NEAR(25.0 * z2 * z2 + 2.0 * z2 - 0.05, 0.0, 1e-14);
    }
}

TEST(Hjb, SmoothFitBarrier) {
    const double b0 = compute_b0(params(6.0));
    EXPECT_NEAR(b0, 26.823965207235, 1e-9);
    // b0 solves zeta1^2 e^{zeta1 b} = zeta2^2 e^{zeta2 b}
    auto [z1, z2] = compute_zetas(params(6.0));
    const double lhs = z1 * z1 * std::exp(z1 * b0);
    const double rhs = z2 * z2 * std::exp(z2 * b0);
    EXPECT_LE(std::fabs(lhs - rhs) / lhs, 1e-12);
}

TEST(Hjb, RequiresPositiveDrift) {
    ModelParams p{0.0, 1.0, std::sqrt(50.0), 0.05, 50.0, 0.3};
    EXPECT_THROW(solve_hjb(p), DomainError);  // b0 = 0 when mu = 0
    p.mu = -0.5;
    EXPECT_THROW(solve_hjb(p), DomainError);
}

TEST(Hjb, RejectsBarrierBelowB0) {
    ModelParams p = params(6.0);
    const double b0 = compute_b0(p);
    EXPECT_THROW(solve_hjb(p, 0.9 * b0), DomainError);
    EXPECT_NO_THROW(solve_hjb(p, b0 * (1.0 - 1e-13)));  // tolerance band
    EXPECT_NO_THROW(solve_hjb(p, 3.0 * b0));
}

// ------------------------------------------------------ cheap-heavy regime --

TEST(HjbCheapHeavy, ClosedFormValue) {
    HjbSolution sol = solve_hjb(params(6.0));
    EXPECT_EQ(sol.regime, Regime::CheapHeavy);
    EXPECT_NEAR(sol.C0, 24.366814485107216, 1e-9);
    EXPECT_EQ(value_f(sol, 0.0), 0.0);
    EXPECT_NEAR(value_f(sol, 0.5 * sol.b0), 25.490816, 1e-6);
    // the barrier value equals the perpetuity mu/c: smooth fit plus the ODE
    EXPECT_NEAR(value_f(sol, sol.b0), 2.0 / 0.05, 1e-9);
    EXPECT_NEAR(value_g_deriv1(sol, sol.b0), 1.0, 1e-12);
    EXPECT_NEAR(value_g_deriv2(sol, sol.b0), 0.0, 1e-12);
}

TEST(HjbCheapHeavy, ValueShape) {
    HjbSolution sol = solve_hjb(params(6.0));
    for (int i = 1; i <= 40; ++i) {
        const double x = sol.b0 * i / 40.0;
        EXPECT_GT(value_g_deriv1(sol, x), 0.99) << x;       // increasing, slope >= 1
        EXPECT_LE(value_g_deriv2(sol, x), 1e-12) << x;      // concave up to the barrier
    }
    // linear continuation with unit slope above the barrier
    EXPECT_NEAR(value_g(sol, sol.b + 2.0) - value_g(sol, sol.b + 1.0), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(value_g_deriv1(sol, sol.b + 1.0), 1.0);
    EXPECT_DOUBLE_EQ(value_g_deriv2(sol, sol.b + 1.0), 0.0);
}

TEST(HjbCheapHeavy, FullRetentionEverywhere) {
    HjbSolution sol = solve_hjb(params(6.0));
    for (int i = 0; i <= 100; ++i) {
        EXPECT_DOUBLE_EQ(control_A(sol, sol.b * i / 100.0), 1.0);
    }
    EXPECT_EQ(sol.m, 0.0);
}

// --------------------------------------------------------- interior regime --

TEST(HjbInterior, FrozenCoefficients) {
    HjbSolution sol = solve_hjb(params(3.0));
    EXPECT_EQ(sol.regime, Regime::Interior);
    EXPECT_NEAR(sol.alpha, 0.09, 1e-12);
    EXPECT_NEAR(sol.m, 7.591438079686275, 1e-9);
    EXPECT_NEAR(sol.z1, 1.7032268313084218, 1e-9);
    EXPECT_NEAR(sol.C1, 0.5677422771028073, 1e-9);
    EXPECT_NEAR(sol.C2, 1.1354845542056144, 1e-9);
    EXPECT_NEAR(sol.C3, 14.017881404165516, 1e-7);
    EXPECT_NEAR(sol.C4, 5.272736156823441, 1e-8);
}

TEST(HjbInterior, CoefficientIdentities) {
    HjbSolution sol = solve_hjb(params(3.0));
    const ModelParams& p = sol.params;
    EXPECT_NEAR(sol.C1 + sol.C2, sol.z1, 1e-12 * sol.z1);
    EXPECT_NEAR(X_of_z(sol, sol.z1), sol.m, 1e-10);
    EXPECT_NEAR(X_deriv(sol, sol.z1), -p.sigma2() / (p.lambda * sol.z1),
                1e-9 * std::fabs(X_deriv(sol, sol.z1)));
    // marginal value at the switching level
    EXPECT_NEAR(value_g_deriv1(sol, sol.m), sol.z1, 1e-10);
    // value there has the closed form z1 (2 mu - lambda) / (2 c)
    EXPECT_NEAR(value_g(sol, sol.m), sol.z1 * (2.0 * p.mu - p.lambda) / (2.0 * p.c), 1e-7);
}

TEST(HjbInterior, SwitchingLevelClosedForm) {
    // independent derivation: m = K - dc/(a+c)^2 + (da/(a+c)^2) ln(K (a+c)^2/(dc)),
    // K = (lambda c + alpha (2 mu - lambda)) / (2 (alpha+c)^2), d = delta
    HjbSolution sol = solve_hjb(params(3.0));
    const double al = sol.alpha, c = 0.05, d = 1.0, mu = 2.0, lam = 3.0;
    const double s = (al + c) * (al + c);
    const double K = (lam * c + al * (2.0 * mu - lam)) / (2.0 * s);
    const double m_ref = K - d * c / s + d * al / s * std::log(K * s / (d * c));
    EXPECT_NEAR(sol.m, m_ref, 1e-9);
}

TEST(HjbInterior, SwitchingLevelDoesNotDependOnBarrier) {
    ModelParams p = params(3.0);
    HjbSolution at_b0 = solve_hjb(p);
    HjbSolution wider = solve_hjb(p, 1.5 * at_b0.b0);
    HjbSolution widest = solve_hjb(p, 2.0 * at_b0.b0);
    EXPECT_NEAR(wider.m, at_b0.m, 1e-9);
    EXPECT_NEAR(widest.m, at_b0.m, 1e-9);
    // z1 does depend on Delta = b - m, and shrinks as the barrier moves out
    EXPECT_LT(wider.z1, at_b0.z1);
    EXPECT_LT(widest.z1, wider.z1);
}

TEST(HjbInterior, XInversionRoundTrip) {
    HjbSolution sol = solve_hjb(params(3.0));
    EXPECT_GT(sol.z_max, sol.z1);
    EXPECT_LE(X_of_z(sol, sol.z_max), 0.0);
    EXPECT_DOUBLE_EQ(X_inverse(sol, sol.m), sol.z1);
    for (int i = 0; i <= 50; ++i) {
        const double y = sol.m * i / 50.0;
        const double z = X_inverse(sol, y);
        EXPECT_GE(z, sol.z1);
        EXPECT_LE(z, sol.z_max);
        EXPECT_NEAR(X_of_z(sol, z), y, 1e-10) << "y = " << y;
    }
    EXPECT_THROW(X_inverse(sol, -0.1), DomainError);
    EXPECT_THROW(X_inverse(sol, sol.m * 1.001), DomainError);
    EXPECT_THROW(X_of_z(sol, 0.0), DomainError);
}

TEST(HjbInterior, ValueGlueAtSwitchingLevel) {
    HjbSolution sol = solve_hjb(params(3.0));
    const double m = sol.m;
    EXPECT_NEAR(value_g(sol, m * (1.0 - 1e-9)), value_g(sol, m * (1.0 + 1e-9)), 1e-6);
    EXPECT_NEAR(value_g_deriv1(sol, m * (1.0 - 1e-9)), value_g_deriv1(sol, m * (1.0 + 1e-9)),
                1e-6);
    EXPECT_NEAR(value_g_deriv2(sol, m * (1.0 - 1e-7)), value_g_deriv2(sol, m * (1.0 + 1e-7)),
                1e-5);
}

TEST(HjbInterior, BarrierBoundaryConditions) {
    for (double mult : {1.0, 1.5}) {
        HjbSolution sol = solve_hjb(params(3.0), mult * compute_b0(params(3.0)));
        EXPECT_NEAR(value_g_deriv1(sol, sol.b), 1.0, 1e-10) << mult;
        // the ODE (sigma^2/2) f'' + mu f' - c f = 0 holds just inside the barrier
        const double lhs = 25.0 * value_g_deriv2(sol, sol.b) + 2.0 * value_g_deriv1(sol, sol.b);
        EXPECT_NEAR(lhs, 0.05 * value_g(sol, sol.b), 1e-9) << mult;
    }
}

TEST(HjbInterior, MarginalValueNeverDipsFarBelowOne) {
    HjbSolution sol = solve_hjb(params(3.0));
    for (int i = 1; i <= 500; ++i) {
        const double x = sol.b * i / 500.0;
        EXPECT_GE(value_g_deriv1(sol, x), 1.0 - 1e-5) << x;
    }
}

// ------------------------------------------------------------- the control --

TEST(HjbControl, BoundsAndMonotonicity) {
    for (double lambda : {3.0, 6.0}) {
        ModelParams p = params(lambda);
        HjbSolution sol = solve_hjb(p);
        const double d = std::min(1.0, 2.0 * (p.lambda - p.mu) / p.lambda);
        double prev = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = sol.b * i / 1000.0;
            const double a = control_A(sol, x);
            EXPECT_GE(a, d - 1e-12) << "lambda " << lambda << " x " << x;
            EXPECT_LE(a, 1.0 + 1e-12) << "lambda " << lambda << " x " << x;
            if (i > 0) {
                EXPECT_GE(a, prev - 1e-12) << "lambda " << lambda << " x " << x;
            }
            prev = a;
        }
        EXPECT_NEAR(control_A(sol, 0.0), d, 1e-12);
        EXPECT_THROW(control_A(sol, -1e-9), DomainError);
    }
}

TEST(HjbControl, SwitchesToFullRetentionAtM) {
    HjbSolution sol = solve_hjb(params(3.0));
    EXPECT_DOUBLE_EQ(control_A(sol, sol.m), 1.0);           // right-limit convention
    EXPECT_NEAR(control_A(sol, sol.m * (1.0 - 1e-9)), 1.0, 1e-6);
    EXPECT_LT(control_A(sol, 0.5 * sol.m), 1.0);
}

TEST(HjbControl, FunctionObjectBindsSolution) {
    HjbSolution sol = solve_hjb(params(3.0));
    ControlFunction A(sol);
    EXPECT_EQ(&A.solution(), &sol);
    for (double x : {0.0, 1.0, sol.m, sol.b}) {
        EXPECT_DOUBLE_EQ(A(x), control_A(sol, x));
    }
}

// --------------------------------------------------------- residual audits --

TEST(HjbResidualAudit, ValueSolvesTheEquationInBothRegimes) {
    for (double lambda : {3.0, 6.0}) {
        HjbSolution sol = solve_hjb(params(lambda));
        for (int i = 1; i <= 50; ++i) {
            const double x = sol.b * (i - 0.5) / 50.0;
            HjbResidual r = hjb_residual(sol, x);
            EXPECT_LE(std::fabs(r.at_optimal), 1e-8) << "lambda " << lambda << " x " << x;
            EXPECT_LE(r.max_over_grid, 1e-6) << "lambda " << lambda << " x " << x;
            EXPECT_GE(r.max_over_grid, r.at_optimal - 1e-12);
        }
    }
}

TEST(HjbResidualAudit, RejectsBoundaryPoints) {
    HjbSolution sol = solve_hjb(params(6.0));
    EXPECT_THROW(hjb_residual(sol, 0.0), DomainError);
    EXPECT_THROW(hjb_residual(sol, sol.b), DomainError);
    EXPECT_THROW(hjb_residual(sol, sol.b + 1.0), DomainError);
}

TEST(Hjb, ValueFRequiresSmoothFitBarrier) {
    ModelParams p = params(3.0);
    HjbSolution wide = solve_hjb(p, 2.0 * compute_b0(p));
    EXPECT_THROW(value_f(wide, 1.0), DomainError);
    EXPECT_NO_THROW(value_g(wide, 1.0));
}

}  // namespace
