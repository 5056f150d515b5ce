#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "divbar/errors.hpp"
#include "divbar/model.hpp"

using namespace divbar;

namespace {

ModelParams base() { return {2.0, 3.0, std::sqrt(50.0), 0.05, 50.0, 0.3}; }

TEST(Model, DerivedQuantities) {
    ModelParams p = base();
    EXPECT_NEAR(p.sigma2(), 50.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.delta(), 1.0);
    EXPECT_NEAR(p.alpha(), 9.0 / 100.0, 1e-15);
}

TEST(Model, ValidateReturnsParams) {
    ModelParams p = base();
    ModelParams q = validate(p);
    EXPECT_EQ(q.mu, p.mu);
    EXPECT_EQ(q.lambda, p.lambda);
}

TEST(Model, RejectsNonPositiveScale) {
    ModelParams p = base();
    p.sigma = 0.0;
    EXPECT_THROW(validate(p), NonPositive);
    p = base();
    p.c = -0.01;
    EXPECT_THROW(validate(p), NonPositive);
    p = base();
    p.T = 0.0;
    EXPECT_THROW(validate(p), NonPositive);
}

TEST(Model, RejectsDegenerateLoading) {
    // reinsurance must cost something: lambda > mu
    ModelParams p = base();
    p.lambda = p.mu;
    EXPECT_THROW(validate(p), DegenerateCost);
    p.lambda = p.mu - 0.5;
    EXPECT_THROW(validate(p), DegenerateCost);
    p.lambda = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate(p), DegenerateCost);
    p.lambda = std::numeric_limits<double>::infinity();
    EXPECT_THROW(validate(p), DegenerateCost);
}

TEST(Model, RejectsRiskLevelOutsideUnitInterval) {
    for (double eps : {0.0, 1.0, -0.2, 1.7}) {
        ModelParams p = base();
        p.epsilon = eps;
        EXPECT_THROW(validate(p), RiskOutOfRange) << "epsilon = " << eps;
    }
}

TEST(Model, ValidationErrorsShareOneBase) {
    ModelParams p = base();
    p.epsilon = 2.0;
    EXPECT_THROW(validate(p), ValidationError);
    EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Model, RegimeClassification) {
    ModelParams p = base();
    EXPECT_EQ(classify(p), Regime::Interior);  // lambda = 3 < 2 mu = 4
    p.lambda = 6.0;
    EXPECT_EQ(classify(p), Regime::CheapHeavy);
    p.lambda = 4.0;  // boundary lambda = 2 mu counts as cheap-heavy
    EXPECT_EQ(classify(p), Regime::CheapHeavy);
}

TEST(Model, RegimeNames) {
    EXPECT_STREQ(to_string(Regime::CheapHeavy), "cheap-heavy");
    EXPECT_STREQ(to_string(Regime::Interior), "interior");
}

}  // namespace
