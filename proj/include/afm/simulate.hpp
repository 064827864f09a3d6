#pragma once

#include "afm/model.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace afm {

/// Zero-mean Gaussian path of length n >= 1 with the exact autocovariance of
/// `model`, by the Durbin-Levinson recursion (O(n^2) time, O(n) memory)
/// driven by a seeded standard-normal stream. Throws numerical_error if a
/// prediction variance is not positive.
Eigen::VectorXd simulate_path(const ArfimaModel& model, Eigen::Index n, std::uint64_t seed);

/// simulate_path wrapped as a TimeSeries (n >= 2).
TimeSeries simulate(const ArfimaModel& model, Eigen::Index n, std::uint64_t seed);

/// Durbin-Levinson on a given autocovariance sequence gamma(0..n-1) with
/// supplied innovations e; y_t = sum_j phi_tj y_{t-j} + sqrt(v_t) e_t.
Eigen::VectorXd durbin_levinson_filter(const Eigen::Ref<const Eigen::VectorXd>& gamma,
                                       const Eigen::Ref<const Eigen::VectorXd>& innovations);

} // namespace afm
