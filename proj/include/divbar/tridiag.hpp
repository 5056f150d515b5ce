#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "divbar/errors.hpp"

namespace divbar {

/**
 * @brief Tridiagonal system with a frozen matrix, factored once and solved for
 *        many right-hand sides (the Crank-Nicolson time loop).
 *
 * Thomas algorithm with the elimination multipliers precomputed; solve() is a
 * single forward/backward sweep with no divisions.
 */
class TridiagFactor {
public:
    /// lower[0] and upper[n-1] are ignored. Throws GridError on a zero pivot.
    TridiagFactor(const std::vector<double>& lower, const std::vector<double>& diag,
                  const std::vector<double>& upper)
        : n_(diag.size()), lower_(lower), cprime_(n_), inv_denom_(n_) {
        if (n_ < 1 || lower.size() != n_ || upper.size() != n_) {
            throw GridError("tridiagonal factor: inconsistent band sizes");
        }
        double denom = diag[0];
        if (denom == 0.0) throw GridError("tridiagonal factor: zero pivot at row 0");
        inv_denom_[0] = 1.0 / denom;
        cprime_[0] = upper[0] * inv_denom_[0];
        for (std::size_t i = 1; i < n_; ++i) {
            denom = diag[i] - lower[i] * cprime_[i - 1];
            if (denom == 0.0 || !std::isfinite(denom)) {
                throw GridError("tridiagonal factor: zero pivot at row " + std::to_string(i));
            }
            inv_denom_[i] = 1.0 / denom;
            cprime_[i] = upper[i] * inv_denom_[i];
        }
    }

    std::size_t size() const { return n_; }

    /// Solves in place: rhs becomes the solution vector.
    void solve(std::vector<double>& rhs) const {
        rhs[0] *= inv_denom_[0];
        for (std::size_t i = 1; i < n_; ++i) {
            rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_denom_[i];
        }
        for (std::size_t i = n_ - 1; i-- > 0;) {
            rhs[i] -= cprime_[i] * rhs[i + 1];
        }
    }

private:
    std::size_t n_;
    std::vector<double> lower_;
    std::vector<double> cprime_;
    std::vector<double> inv_denom_;
};

}  // namespace divbar
