#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "divbar/errors.hpp"

namespace divbar {

/**
 * @brief Market/contract primitives of the controlled reserve model.
 *
 * mu     insurer premium drift (currency/time)
 * lambda reinsurer safety loading (currency/time); lambda > mu makes
 *        reinsurance costly (transaction cost delta = lambda - mu > 0)
 * sigma  diffusion volatility (currency/sqrt(time)), > 0
 * c      dividend discount rate (1/time), > 0
 * T      solvency horizon (time), > 0
 * epsilon acceptable ruin probability over the horizon, in (0,1)
 *
 * Immutable value type; derived quantities are computed on demand.
 */
struct ModelParams {
    double mu = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
    double c = 0.0;
    double T = 0.0;
    double epsilon = 0.0;

    double sigma2() const { return sigma * sigma; }
    double delta() const { return lambda - mu; }
    double alpha() const { return lambda * lambda / (2.0 * sigma2()); }
};

/// Which branch of the closed-form solution applies.
/// CheapHeavy: lambda >= 2 mu, full retention is always optimal.
/// Interior:   mu < lambda < 2 mu, partial reinsurance below the level m.
enum class Regime { CheapHeavy, Interior };

inline const char* to_string(Regime r) {
    return r == Regime::CheapHeavy ? "cheap-heavy" : "interior";
}

/**
 * @brief Validates every ModelParams invariant; returns the params unchanged.
 *
 * @throws DegenerateCost  if lambda <= mu (zero/negative transaction cost)
 * @throws NonPositive     if sigma, c or T is not strictly positive
 * @throws RiskOutOfRange  if epsilon is outside (0,1)
 */
inline ModelParams validate(const ModelParams& p) {
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        throw NonPositive("sigma must be > 0, got " + std::to_string(p.sigma));
    }
    if (!(p.c > 0.0) || !std::isfinite(p.c)) {
        throw NonPositive("c must be > 0, got " + std::to_string(p.c));
    }
    if (!(p.T > 0.0) || !std::isfinite(p.T)) {
        throw NonPositive("T must be > 0, got " + std::to_string(p.T));
    }
    if (!std::isfinite(p.mu) || !std::isfinite(p.lambda) || !(p.lambda > p.mu)) {
        std::ostringstream os;
        os << "need lambda > mu (positive transaction cost), got lambda=" << p.lambda
           << " mu=" << p.mu;
        throw DegenerateCost(os.str());
    }
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
        throw RiskOutOfRange("epsilon must lie in (0,1), got " + std::to_string(p.epsilon));
    }
    return p;
}

/// Regime classification; lambda == 2 mu belongs to CheapHeavy.
inline Regime classify(const ModelParams& p) {
    return p.lambda >= 2.0 * p.mu ? Regime::CheapHeavy : Regime::Interior;
}

}  // namespace divbar
