#include "afm/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace afm {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

double min_or_inf(const Eigen::VectorXd& v) {
    return v.size() == 0 ? std::numeric_limits<double>::infinity() : v.minCoeff();
}

bool roots_match(std::complex<double> a, std::complex<double> b, double tolerance) {
    return std::abs(a - b) < tolerance * std::max(1.0, std::abs(a));
}

} // namespace

ArfimaModel::ArfimaModel(double d, Eigen::VectorXd ar, Eigen::VectorXd ma, double sigma2)
    : d_(d), ar_(std::move(ar)), ma_(std::move(ma)), sigma2_(sigma2) {
    if (!std::isfinite(d_) || !all_finite(ar_) || !all_finite(ma_)) {
        throw std::invalid_argument("ArfimaModel: non-finite coefficient");
    }
    if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_)) {
        throw std::invalid_argument("ArfimaModel: innovation variance must be positive");
    }
}

ArfimaModel ArfimaModel::fractional_noise(double d, double sigma2) {
    return ArfimaModel(d, Eigen::VectorXd(), Eigen::VectorXd(), sigma2);
}

ArfimaModel ArfimaModel::from_parameters(const Eigen::Ref<const Eigen::VectorXd>& params, int p,
                                         double sigma2) {
    if (params.size() < 1 + p || p < 0) {
        throw std::invalid_argument("ArfimaModel::from_parameters: parameter vector too short");
    }
    const Eigen::Index q = params.size() - 1 - p;
    return ArfimaModel(params(0), params.segment(1, p), params.tail(q), sigma2);
}

Eigen::VectorXd ArfimaModel::parameters() const {
    Eigen::VectorXd out(num_parameters());
    out << d_, ar_, ma_;
    return out;
}

Eigen::VectorXd ArfimaModel::ar_polynomial() const {
    Eigen::VectorXd c(p() + 1);
    c << 1.0, -ar_;
    return c;
}

Eigen::VectorXd ArfimaModel::ma_polynomial() const {
    Eigen::VectorXd c(q() + 1);
    c << 1.0, ma_;
    return c;
}

ArfimaModel ArfimaModel::with_sigma2(double sigma2) const { return ArfimaModel(d_, ar_, ma_, sigma2); }

std::vector<std::string> ArfimaModel::parameter_names() const {
    std::vector<std::string> names{"d"};
    for (int i = 1; i <= p(); ++i) names.push_back("phi " + std::to_string(i));
    for (int i = 1; i <= q(); ++i) names.push_back("theta " + std::to_string(i));
    return names;
}

TimeSeries::TimeSeries(Eigen::VectorXd values, std::optional<double> mean) : values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("TimeSeries: need at least 2 observations");
    if (!values_.allFinite()) throw std::invalid_argument("TimeSeries: non-finite observation");
    if (mean) {
        if (!std::isfinite(*mean)) throw std::invalid_argument("TimeSeries: non-finite mean");
        mean_ = *mean;
        known_mean_ = true;
    } else {
        mean_ = values_.mean();
    }
}

TimeSeries TimeSeries::head(Eigen::Index count) const {
    if (count < 2 || count > size()) throw std::invalid_argument("TimeSeries::head: bad length");
    return TimeSeries(values_.head(count));
}

bool d_in_range(double d) { return d > -1.0 && d < 0.5; }

Eigen::VectorXd eta_coefficients(double d, Eigen::Index m) {
    if (!d_in_range(d)) throw std::domain_error("eta_coefficients: d must lie in (-1, 0.5)");
    if (m < 0) throw std::invalid_argument("eta_coefficients: negative length");
    return fractional_filter(d, m);
}

Eigen::VectorXd psi_coefficients(const ArfimaModel& model, Eigen::Index m) {
    require_valid(model, "psi_coefficients");
    if (m < 0) throw std::invalid_argument("psi_coefficients: negative length");
    const Eigen::VectorXd numer = truncated_product(fractional_filter(model.d(), m), model.ma_polynomial(), m);
    return truncated_quotient(numer, model.ar_polynomial(), m);
}

Eigen::VectorXd pi_coefficients(const ArfimaModel& model, Eigen::Index m) {
    if (!d_in_range(model.d())) throw std::domain_error("pi_coefficients: d must lie in (-1, 0.5)");
    const StationarityReport report = check_parameters(model);
    if (!report.ma_ok) throw std::domain_error("pi_coefficients: MA polynomial is not invertible");
    if (m < 0) throw std::invalid_argument("pi_coefficients: negative length");
    const Eigen::VectorXd numer = truncated_product(fractional_filter(-model.d(), m), model.ar_polynomial(), m);
    return truncated_quotient(numer, model.ma_polynomial(), m);
}

std::complex<double> evaluate_polynomial(const Eigen::Ref<const Eigen::VectorXd>& coeffs, std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = coeffs.size() - 1; i >= 0; --i) acc = acc * z + coeffs(i);
    return acc;
}

Eigen::VectorXcd polynomial_roots(const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
    Eigen::Index degree = coeffs.size() - 1;
    while (degree >= 0 && coeffs(degree) == 0.0) --degree;
    if (degree < 0) throw std::invalid_argument("polynomial_roots: zero polynomial");
    if (!coeffs.head(degree + 1).allFinite()) throw std::invalid_argument("polynomial_roots: non-finite coefficient");
    if (degree == 0) return Eigen::VectorXcd();

    const Eigen::VectorXd c = coeffs.head(degree + 1);
    const double lead = c(degree);

    // Companion matrix of the monic polynomial z^k + (c_{k-1}/c_k) z^{k-1} + ... .
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    companion.block(1, 0, degree - 1, degree - 1).setIdentity();
    companion.col(degree - 1) = -c.head(degree) / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("polynomial_roots: eigenvalue solver failed");
    Eigen::VectorXcd roots = solver.eigenvalues();

    Eigen::VectorXd deriv(degree);
    for (Eigen::Index i = 1; i <= degree; ++i) deriv(i - 1) = static_cast<double>(i) * c(i);

    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const std::complex<double> r = roots(i);
        const std::complex<double> value = evaluate_polynomial(c, r);
        const std::complex<double> slope = evaluate_polynomial(deriv, r);
        if (slope == 0.0) continue;
        const std::complex<double> refined = r - value / slope;
        // Keep the Newton step only when it improves the residual (it can
        // overshoot near multiple roots).
        if (std::abs(evaluate_polynomial(c, refined)) < std::abs(value)) roots(i) = refined;
    }
    return roots;
}

StationarityReport check_parameters(const ArfimaModel& model) {
    StationarityReport report;
    report.d_ok = d_in_range(model.d());

    const Eigen::VectorXcd ar_roots = polynomial_roots(model.ar_polynomial());
    const Eigen::VectorXcd ma_roots = polynomial_roots(model.ma_polynomial());
    report.ar_root_moduli = ar_roots.cwiseAbs();
    report.ma_root_moduli = ma_roots.cwiseAbs();
    report.ar_ok = min_or_inf(report.ar_root_moduli) > 1.0;
    report.ma_ok = min_or_inf(report.ma_root_moduli) > 1.0;

    for (Eigen::Index i = 0; i < ar_roots.size(); ++i) {
        for (Eigen::Index j = 0; j < ma_roots.size(); ++j) {
            if (roots_match(ar_roots(i), ma_roots(j), kRootMatchTolerance)) report.common_roots = true;
        }
        for (Eigen::Index j = i + 1; j < ar_roots.size(); ++j) {
            if (roots_match(ar_roots(i), ar_roots(j), kRepeatedRootTolerance)) report.repeated_ar_roots = true;
        }
    }
    return report;
}

void require_valid(const ArfimaModel& model, const char* context) {
    const StationarityReport report = check_parameters(model);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << context << ": ";
    if (!report.d_ok) {
        msg << "d = " << model.d() << " outside (-1, 0.5)";
    } else if (!report.ar_ok) {
        msg << "AR polynomial has a root on or inside the unit circle (min modulus "
            << report.ar_root_moduli.minCoeff() << ")";
    } else {
        msg << "MA polynomial has a root on or inside the unit circle (min modulus "
            << report.ma_root_moduli.minCoeff() << ")";
    }
    throw std::domain_error(msg.str());
}

} // namespace afm
