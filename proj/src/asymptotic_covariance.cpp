#include "afm/asymptotic_covariance.hpp"

#include "afm/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace afm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryMargin = 1e-3;

// a_j cos((l - j) lambda) summed over the full polynomial (including the
// constant term), times two, over |poly(e^{i lambda})|^2.
void polynomial_gradient(const Eigen::VectorXd& poly, double lambda, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::Index order = poly.size() - 1;
    double gain = 0.0;
    for (Eigen::Index j = 0; j <= order; ++j) {
        for (Eigen::Index k = 0; k <= order; ++k) {
            gain += poly(j) * poly(k) * std::cos(static_cast<double>(j - k) * lambda);
        }
    }
    for (Eigen::Index l = 1; l <= order; ++l) {
        double num = 0.0;
        for (Eigen::Index j = 0; j <= order; ++j) num += poly(j) * std::cos(static_cast<double>(l - j) * lambda);
        out(l - 1) = 2.0 * num / gain;
    }
}

void gradient_unchecked(const ArfimaModel& model, double lambda, Eigen::Ref<Eigen::VectorXd> out) {
    // 2 (1 - cos x) = 4 sin^2(x/2); the log of the root avoids underflow as lambda -> 0.
    out(0) = -2.0 * std::log(2.0 * std::sin(0.5 * lambda));
    // d/dphi_l of -log|Phi|^2 with a_l = -phi_l flips the sign twice.
    polynomial_gradient(model.ar_polynomial(), lambda, out.segment(1, model.p()));
    polynomial_gradient(model.ma_polynomial(), lambda, out.tail(model.q()));
}

void require_interior(const ArfimaModel& model) {
    require_valid(model, "fisher_matrix");
    const StationarityReport report = check_parameters(model);
    auto near_unit = [](const Eigen::VectorXd& moduli) {
        return moduli.size() > 0 && moduli.minCoeff() < 1.0 + kBoundaryMargin;
    };
    if (near_unit(report.ar_root_moduli)) {
        throw std::domain_error("fisher_matrix: AR root within 1e-3 of the unit circle (phi near the boundary)");
    }
    if (near_unit(report.ma_root_moduli)) {
        throw std::domain_error("fisher_matrix: MA root within 1e-3 of the unit circle (theta near the boundary)");
    }
}

} // namespace

Eigen::VectorXd grad_log_spectrum(const ArfimaModel& model, double lambda) {
    if (!(lambda > 0.0 && lambda <= kPi)) {
        throw std::domain_error("grad_log_spectrum: frequency must lie in (0, pi]");
    }
    Eigen::VectorXd out(model.num_parameters());
    gradient_unchecked(model, lambda, out);
    return out;
}

CovarianceMatrix fisher_matrix(const ArfimaModel& model, const FisherOptions& options) {
    require_interior(model);
    const Eigen::Index k = model.num_parameters();

    CovarianceMatrix result;
    result.order = model.parameter_names();
    result.info = Eigen::MatrixXd::Zero(k, k);

    // Double-exponential nodes cluster at the log^2 singularity of lambda = 0
    // without ever evaluating it.
    boost::math::quadrature::tanh_sinh<double> integrator;
    Eigen::VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            auto integrand = [&](double lambda) {
                gradient_unchecked(model, lambda, g);
                return g(i) * g(j);
            };
            // The integrand is even in lambda: (1/4pi) * 2 * integral over (0, pi).
            const double value = integrator.integrate(integrand, 0.0, kPi, options.tolerance);
            result.info(i, j) = result.info(j, i) = value / (2.0 * kPi);
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(result.info);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "fisher_matrix: information matrix is not positive definite";
        const StationarityReport report = check_parameters(model);
        if (report.common_roots) msg << " (AR and MA polynomials share a root: phi/theta not identifiable)";
        Eigen::Index worst = 0;
        result.info.diagonal().minCoeff(&worst);
        msg << "; smallest diagonal entry belongs to " << result.order[static_cast<std::size_t>(worst)];
        throw numerical_error(msg.str());
    }
    result.cov = llt.solve(Eigen::MatrixXd::Identity(k, k));
    return result;
}

Eigen::VectorXd exact_stderr(const CovarianceMatrix& matrix, Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("exact_stderr: n must be positive");
    return (matrix.cov.diagonal() / static_cast<double>(n)).cwiseSqrt();
}

Eigen::VectorXd exact_stderr(const ArfimaModel& model, Eigen::Index n) {
    return exact_stderr(fisher_matrix(model), n);
}

} // namespace afm
