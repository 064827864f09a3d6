#include "afm/irf.hpp"

#include "afm/series.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace afm {

Eigen::VectorXd irf_exact(const ArfimaModel& model, Eigen::Index h) {
    if (h < 0) throw std::invalid_argument("irf_exact: h must be nonnegative");
    const Eigen::VectorXd psi = psi_coefficients(model, h);
    const Eigen::VectorXd eta = eta_coefficients(model.d(), h);
    return truncated_product(psi, eta, h);
}

Eigen::VectorXd irf_asymptotic(const ArfimaModel& model, Eigen::Index h) {
    require_valid(model, "irf_asymptotic");
    if (h < 0) throw std::invalid_argument("irf_asymptotic: h must be nonnegative");
    const double d = model.d();
    if (d == 0.0) throw std::domain_error("irf_asymptotic: d = 0 has no power-law tail (Gamma(0) pole)");

    // R = psi * eta has generating function (1 - z)^{-2d} Theta(z) / Phi(z).
    const double scale = model.ma_polynomial().sum() / model.ar_polynomial().sum() / std::tgamma(2.0 * d);
    Eigen::VectorXd out(h + 1);
    out(0) = 1.0;
    for (Eigen::Index j = 1; j <= h; ++j) out(j) = scale * std::pow(static_cast<double>(j), 2.0 * d - 1.0);
    return out;
}

IrfResult impulse_response(const ArfimaModel& model, Eigen::Index h) {
    IrfResult result;
    result.exact = irf_exact(model, h);
    if (model.d() == 0.0) {
        result.asymptotic_degenerate = true;
        result.asymptotic = Eigen::VectorXd::Constant(h + 1, std::numeric_limits<double>::quiet_NaN());
        result.asymptotic(0) = 1.0;
    } else {
        result.asymptotic = irf_asymptotic(model, h);
    }
    return result;
}

} // namespace afm
