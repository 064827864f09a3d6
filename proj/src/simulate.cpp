#include "afm/simulate.hpp"

#include "afm/acvf.hpp"
#include "afm/errors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace afm {

Eigen::VectorXd durbin_levinson_filter(const Eigen::Ref<const Eigen::VectorXd>& gamma,
                                       const Eigen::Ref<const Eigen::VectorXd>& innovations) {
    const Eigen::Index n = innovations.size();
    if (gamma.size() < n) throw std::invalid_argument("durbin_levinson_filter: need gamma(0..n-1)");
    if (n == 0) return {};
    if (!(gamma(0) > 0.0)) throw numerical_error("durbin_levinson_filter: gamma(0) is not positive");

    // y_rev holds y_{t-1}, ..., y_0 so both inner products run forwards.
    Eigen::VectorXd y(n);
    Eigen::VectorXd y_rev(n);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd gamma_rev(n);  // gamma(t-1), ..., gamma(1) in its last t-1 slots

    double v = gamma(0);
    y(0) = std::sqrt(v) * innovations(0);
    y_rev(n - 1) = y(0);
    for (Eigen::Index t = 1; t < n; ++t) {
        gamma_rev(n - t) = gamma(t);
        const Eigen::Index len = t - 1;
        const double num = gamma(t) - phi.head(len).dot(gamma_rev.tail(len));
        const double kappa = num / v;
        for (Eigen::Index i = 0, j = len - 1; i <= j; ++i, --j) {
            const double a = phi(i);
            const double b = phi(j);
            phi(i) = a - kappa * b;
            if (i != j) phi(j) = b - kappa * a;
        }
        phi(len) = kappa;
        v *= 1.0 - kappa * kappa;
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw numerical_error("durbin_levinson_filter: autocovariance not positive definite at lag " +
                                  std::to_string(t));
        }
        const double mean = phi.head(t).dot(y_rev.tail(t));
        y(t) = mean + std::sqrt(v) * innovations(t);
        y_rev(n - 1 - t) = y(t);
    }
    return y;
}

Eigen::VectorXd simulate_path(const ArfimaModel& model, Eigen::Index n, std::uint64_t seed) {
    require_valid(model, "simulate");
    if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");
    const Eigen::VectorXd gamma = acvf_sowell(model, n - 1).gamma;

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd e(n);
    for (Eigen::Index t = 0; t < n; ++t) e(t) = normal(engine);
    return durbin_levinson_filter(gamma, e);
}

TimeSeries simulate(const ArfimaModel& model, Eigen::Index n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("simulate: a TimeSeries needs n >= 2");
    return TimeSeries(simulate_path(model, n, seed));
}

} // namespace afm
