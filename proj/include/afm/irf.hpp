#pragma once

#include "afm/model.hpp"

#include <Eigen/Core>

namespace afm {

/// Impulse responses on lags 0..h: `exact` from the Cauchy product, `asymptotic`
/// from the power-law tail (lag 0 holds the exact value 1).
struct IrfResult {
    Eigen::VectorXd exact;
    Eigen::VectorXd asymptotic;
    /// d = 0: the tail formula has no power law; asymptotic holds NaN past lag 0.
    bool asymptotic_degenerate = false;
};

/// R_j = sum_{i=0}^{j} psi_i eta_{j-i}, j = 0..h.
Eigen::VectorXd irf_exact(const ArfimaModel& model, Eigen::Index h);

/// R_j ~ j^{2d-1} / Gamma(2d) * Theta(1) / Phi(1) for j = 1..h, with R_0 = 1.
/// Throws std::domain_error when d = 0.
Eigen::VectorXd irf_asymptotic(const ArfimaModel& model, Eigen::Index h);

/// Both curves; d = 0 sets asymptotic_degenerate instead of throwing.
IrfResult impulse_response(const ArfimaModel& model, Eigen::Index h);

} // namespace afm
