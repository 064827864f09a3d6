#include "afm/optimize.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace afm {

namespace {

bool feasible(double v) { return std::isfinite(v); }

} // namespace

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x, double fx) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + h;
        const double up = f(probe);
        probe(i) = x(i) - h;
        const double down = f(probe);
        probe(i) = x(i);
        if (feasible(up) && feasible(down)) {
            g(i) = (up - down) / (2.0 * h);
        } else if (feasible(up)) {
            g(i) = (up - fx) / h;
        } else if (feasible(down)) {
            g(i) = (fx - down) / h;
        } else {
            g(i) = 0.0;
        }
    }
    return g;
}

MinimizeResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const MinimizeOptions& options) {
    const Eigen::Index n = x0.size();
    MinimizeResult result;
    result.x = std::move(x0);
    result.value = f(result.x);
    if (!feasible(result.value)) throw std::invalid_argument("minimize_bfgs: infeasible starting point");
    result.gradient = numerical_gradient(f, result.x, result.value);

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    constexpr double armijo = 1e-4;
    constexpr int max_backtracks = 50;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter;
        if (n == 0 || result.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.status = MinimizeStatus::gradient_converged;
            return result;
        }

        Eigen::VectorXd direction = -inv_hessian * result.gradient;
        double slope = result.gradient.dot(direction);
        if (!(slope < 0.0)) {
            inv_hessian.setIdentity();
            direction = -result.gradient;
            slope = result.gradient.dot(direction);
        }
        const double longest = direction.lpNorm<Eigen::Infinity>();
        double alpha = longest > options.max_step ? options.max_step / longest : 1.0;

        Eigen::VectorXd trial;
        double trial_value = 0.0;
        bool accepted = false;
        for (int k = 0; k < max_backtracks; ++k) {
            trial = result.x + alpha * direction;
            trial_value = f(trial);
            if (feasible(trial_value) && trial_value <= result.value + armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!inv_hessian.isIdentity()) {
                // Retry once along steepest descent before giving up.
                inv_hessian.setIdentity();
                continue;
            }
            result.status = MinimizeStatus::stalled;
            return result;
        }

        const Eigen::VectorXd gradient = numerical_gradient(f, trial, trial_value);
        const Eigen::VectorXd s = trial - result.x;
        const Eigen::VectorXd y = gradient - result.gradient;
        const double sy = s.dot(y);

        result.x = trial;
        result.value = trial_value;
        result.gradient = gradient;

        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (iter == 0) inv_hessian *= sy / y.squaredNorm();
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            inv_hessian = (I - rho * s * y.transpose()) * inv_hessian * (I - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
    }
    result.iterations = options.max_iterations;
    result.status = result.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance
                        ? MinimizeStatus::gradient_converged
                        : MinimizeStatus::max_iterations;
    return result;
}

} // namespace afm
