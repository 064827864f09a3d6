#pragma once

#include <Eigen/Core>

#include <functional>

namespace afm {

/// Objective to minimise. Points outside the feasible region return +inf.
using Objective = std::function<double(const Eigen::VectorXd&)>;

struct MinimizeOptions {
    double gradient_tolerance = 1e-6;  // max-norm
    int max_iterations = 500;
    double max_step = 1.0;             // max-norm cap on a single trial step
};

enum class MinimizeStatus { gradient_converged, stalled, max_iterations };

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    Eigen::VectorXd gradient;
    int iterations = 0;
    MinimizeStatus status = MinimizeStatus::max_iterations;
};

/// Central differences with step 1e-6 * max(1, |x_i|). A side that lands on
/// an infeasible point falls back to the one-sided difference.
Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x, double fx);

/// BFGS with numeric gradients and a backtracking Armijo line search.
/// Infeasible trial points (+inf or NaN) are treated as a failed step.
MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& options = {});

} // namespace afm
