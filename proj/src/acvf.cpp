#include "afm/acvf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace afm {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;
// Below this |d| the Sowell hypergeometric terms approach the c = 1 - d - h
// poles; the ARMA autocovariance is convolved with gamma_0 instead.
constexpr double kSmallD = 1e-5;
constexpr double kImagTolerance = 1e-8;
constexpr Eigen::Index kMaxArmaTerms = 20000;

Eigen::VectorXd trim_trailing_zeros(const Eigen::VectorXd& v) {
    Eigen::Index n = v.size();
    while (n > 0 && v(n - 1) == 0.0) --n;
    return v.head(n);
}

void require_fd_arguments(double d, double sigma2, const char* context) {
    if (!d_in_range(d)) throw std::domain_error(std::string(context) + ": d must lie in (-1, 0.5)");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument(std::string(context) + ": sigma2 must be positive");
    }
}

// Unit-variance gamma_0 on lags -(span)..span, stored at offset span.
class FdTable {
public:
    FdTable(double d, Eigen::Index span) : span_(span), g_(acvf_fd_sequence(d, 1.0, span)) {}
    double operator()(Eigen::Index h) const { return g_(h < 0 ? -h : h); }
    Eigen::Index span() const { return span_; }

private:
    Eigen::Index span_;
    Eigen::VectorXd g_;
};

// psi(i) = sum_k theta_k theta_{k - i}, theta_0 = 1, for i = 0..q.
Eigen::VectorXd ma_autocovariance(const Eigen::VectorXd& theta) {
    const Eigen::Index q = theta.size() - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(q + 1);
    for (Eigen::Index i = 0; i <= q; ++i) {
        for (Eigen::Index k = i; k <= q; ++k) out(i) += theta(k) * theta(k - i);
    }
    return out;
}

// beta(h) = F(d + h, 1; 1 - d + h; rho) for h in [lo, hi]. The top value is
// summed directly; the contiguous relation
//   F(a, 1; c; rho) = 1 + (a / c) rho F(a + 1, 1; c + 1; rho)
// then runs downwards, which contracts errors since |rho| < 1.
std::vector<cd> beta_range(double d, cd rho, Eigen::Index lo, Eigen::Index hi) {
    std::vector<cd> out(static_cast<std::size_t>(hi - lo + 1));
    const double top = static_cast<double>(hi);
    out.back() = hypergeometric_2f1(d + top, 1.0, 1.0 - d + top, rho);
    for (Eigen::Index h = hi - 1; h >= lo; --h) {
        const double hh = static_cast<double>(h);
        const std::size_t at = static_cast<std::size_t>(h - lo);
        out[at] = 1.0 + rho * ((d + hh) / (1.0 - d + hh)) * out[at + 1];
    }
    return out;
}

void require_distinct(const Eigen::VectorXcd& rho) {
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
        for (Eigen::Index j = i + 1; j < rho.size(); ++j) {
            if (std::abs(rho(i) - rho(j)) <= kRepeatedRootTolerance) {
                throw numerical_error("acvf_sowell: repeated AR root, multiplicity one violated");
            }
        }
    }
}

// gamma(h) = sigma2 sum_i psi(i) sum_j xi_j C(d, p + i - h, rho_j).
Eigen::VectorXd sowell_sum(double d, const Eigen::VectorXd& phi_poly, const Eigen::VectorXd& theta,
                           double sigma2, Eigen::Index h_max) {
    const Eigen::Index p = phi_poly.size() - 1;
    const Eigen::Index q = theta.size() - 1;

    Eigen::VectorXcd rho = polynomial_roots(phi_poly).cwiseInverse();
    require_distinct(rho);

    Eigen::VectorXcd xi(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        cd denom = rho(j);
        for (Eigen::Index i = 0; i < p; ++i) denom *= 1.0 - rho(i) * rho(j);
        for (Eigen::Index m = 0; m < p; ++m) {
            if (m != j) denom *= rho(j) - rho(m);
        }
        xi(j) = 1.0 / denom;
    }

    const Eigen::VectorXd psi = ma_autocovariance(theta);
    // C is evaluated at m = p + i - h for |i| <= q, 0 <= h <= h_max, and needs beta(m) and beta(-m).
    const Eigen::Index m_lo = p - q - h_max;
    const Eigen::Index m_hi = p + q;
    const Eigen::Index span = std::max(std::abs(m_lo), std::abs(m_hi));
    const FdTable g0(d, span);

    Eigen::VectorXcd gamma = Eigen::VectorXcd::Zero(h_max + 1);
    for (Eigen::Index j = 0; j < p; ++j) {
        const std::vector<cd> beta = beta_range(d, rho(j), -span, span);
        const cd rho2p = std::pow(rho(j), static_cast<int>(2 * p));
        auto c_term = [&](Eigen::Index m) {
            const cd b_pos = beta[static_cast<std::size_t>(m + span)];
            const cd b_neg = beta[static_cast<std::size_t>(-m + span)];
            return g0(m) * (rho2p * b_pos + b_neg - 1.0);
        };
        for (Eigen::Index h = 0; h <= h_max; ++h) {
            cd acc = 0.0;
            for (Eigen::Index i = -q; i <= q; ++i) acc += psi(std::abs(i)) * c_term(p + i - h);
            gamma(h) += xi(j) * acc;
        }
    }

    const double scale = std::max(1.0, std::abs(gamma(0)));
    if (gamma.imag().cwiseAbs().maxCoeff() > kImagTolerance * scale) {
        throw numerical_error("acvf_sowell: complex roots did not cancel to a real autocovariance");
    }
    return sigma2 * gamma.real();
}

// sum_i psi(i) gamma_0(h - i), the p = 0 form.
Eigen::VectorXd ma_fd_sum(double d, const Eigen::VectorXd& theta, double sigma2, Eigen::Index h_max) {
    const Eigen::Index q = theta.size() - 1;
    const Eigen::VectorXd psi = ma_autocovariance(theta);
    const FdTable g0(d, h_max + q);
    Eigen::VectorXd gamma(h_max + 1);
    for (Eigen::Index h = 0; h <= h_max; ++h) {
        double acc = 0.0;
        for (Eigen::Index i = -q; i <= q; ++i) acc += psi(std::abs(i)) * g0(h - i);
        gamma(h) = sigma2 * acc;
    }
    return gamma;
}

// Near d = 0 with AR terms: autocovariance a(k) of the ARMA filter Theta/Phi,
// convolved with gamma_0. a(k) decays geometrically, so the sum is truncated
// once the ARMA weights fall below double resolution.
Eigen::VectorXd arma_fd_convolution(double d, const Eigen::VectorXd& phi_poly, const Eigen::VectorXd& theta,
                                    double sigma2, Eigen::Index h_max) {
    const double r = polynomial_roots(phi_poly).cwiseInverse().cwiseAbs().maxCoeff();
    Eigen::Index m = static_cast<Eigen::Index>(std::ceil(std::log(1e-17) / std::log(r))) + theta.size() + 10;
    m = std::min(std::max<Eigen::Index>(m, 50), kMaxArmaTerms);

    const Eigen::VectorXd w = truncated_quotient(theta, phi_poly, m);
    Eigen::VectorXd a(m + 1);
    for (Eigen::Index k = 0; k <= m; ++k) a(k) = w.head(m + 1 - k).dot(w.tail(m + 1 - k));

    Eigen::VectorXd gamma(h_max + 1);
    if (d == 0.0) {
        for (Eigen::Index h = 0; h <= h_max; ++h) gamma(h) = sigma2 * (h <= m ? a(h) : 0.0);
        return gamma;
    }
    const FdTable g0(d, h_max + m);
    for (Eigen::Index h = 0; h <= h_max; ++h) {
        double acc = a(0) * g0(h);
        for (Eigen::Index k = 1; k <= m; ++k) acc += a(k) * (g0(h - k) + g0(h + k));
        gamma(h) = sigma2 * acc;
    }
    return gamma;
}

} // namespace

double gauss_2F1(double a, double b, double c, double x) {
    return hypergeometric_2f1(a, b, c, x);
}

double acvf_fd(double d, double sigma2, Eigen::Index h) {
    require_fd_arguments(d, sigma2, "acvf_fd");
    if (h < 0) h = -h;
    if (d == 0.0) return h == 0 ? sigma2 : 0.0;
    if (h == 0) return sigma2 * std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
    // Gamma(1-d) Gamma(d) = pi / sin(pi d) removes the pole of Gamma(d) at d = 0.
    const double hh = static_cast<double>(h);
    return sigma2 * std::tgamma(1.0 - 2.0 * d) * std::sin(kPi * d) / kPi *
           std::exp(std::lgamma(hh + d) - std::lgamma(1.0 + hh - d));
}

Eigen::VectorXd acvf_fd_sequence(double d, double sigma2, Eigen::Index h_max) {
    require_fd_arguments(d, sigma2, "acvf_fd_sequence");
    if (h_max < 0) throw std::invalid_argument("acvf_fd_sequence: h_max must be nonnegative");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(h_max + 1);
    g(0) = acvf_fd(d, sigma2, 0);
    if (d == 0.0) return g;
    for (Eigen::Index h = 1; h <= h_max; ++h) {
        const double hh = static_cast<double>(h);
        g(h) = g(h - 1) * (hh - 1.0 + d) / (hh - d);
    }
    return g;
}

AcvfResult acvf_sowell(const ArfimaModel& model, Eigen::Index h_max) {
    require_valid(model, "acvf_sowell");
    if (h_max < 0) throw std::invalid_argument("acvf_sowell: h_max must be nonnegative");

    const Eigen::VectorXd phi_poly = trim_trailing_zeros(model.ar_polynomial());
    const Eigen::VectorXd theta = trim_trailing_zeros(model.ma_polynomial());
    const double d = model.d();

    AcvfResult result;
    result.lags = Eigen::VectorXi::LinSpaced(h_max + 1, 0, static_cast<int>(h_max));
    result.method_per_lag.assign(static_cast<std::size_t>(h_max + 1), AcvfMethod::exact);

    if (phi_poly.size() == 1) {
        result.gamma = ma_fd_sum(d, theta, model.sigma2(), h_max);
    } else if (std::abs(d) < kSmallD) {
        result.gamma = arma_fd_convolution(d, phi_poly, theta, model.sigma2(), h_max);
    } else {
        result.gamma = sowell_sum(d, phi_poly, theta, model.sigma2(), h_max);
    }
    return result;
}

double acvf_tail_constant(const ArfimaModel& model) {
    require_valid(model, "acvf_tail_constant");
    const double d = model.d();
    if (d == 0.0) return 0.0;
    const double ratio = model.ma_polynomial().sum() / model.ar_polynomial().sum();
    return model.sigma2() / kPi * std::tgamma(1.0 - 2.0 * d) * std::sin(kPi * d) * ratio * ratio;
}

double acvf_asymptotic(const ArfimaModel& model, Eigen::Index h) {
    if (h == 0) throw std::invalid_argument("acvf_asymptotic: the tail formula needs h != 0");
    const double c = acvf_tail_constant(model);
    if (c == 0.0) return 0.0;
    return c * std::pow(static_cast<double>(h < 0 ? -h : h), 2.0 * model.d() - 1.0);
}

AcvfResult acvf_hybrid(const ArfimaModel& model, Eigen::Index h_max, Eigen::Index switch_lag) {
    if (switch_lag < 0) throw std::invalid_argument("acvf_hybrid: switch_lag must be nonnegative");
    const Eigen::Index exact_top = std::min(h_max, switch_lag);
    AcvfResult exact = acvf_sowell(model, exact_top);
    if (h_max <= switch_lag) return exact;

    AcvfResult result;
    result.lags = Eigen::VectorXi::LinSpaced(h_max + 1, 0, static_cast<int>(h_max));
    result.gamma.resize(h_max + 1);
    result.gamma.head(exact_top + 1) = exact.gamma;
    result.method_per_lag = exact.method_per_lag;
    const double c = acvf_tail_constant(model);
    for (Eigen::Index h = exact_top + 1; h <= h_max; ++h) {
        result.gamma(h) = c == 0.0 ? 0.0 : c * std::pow(static_cast<double>(h), 2.0 * model.d() - 1.0);
        result.method_per_lag.push_back(AcvfMethod::asymptotic);
    }
    return result;
}

double sample_mean_variance(const ArfimaModel& model, Eigen::Index n, bool exact) {
    if (n < 1) throw std::invalid_argument("sample_mean_variance: n must be positive");
    const double nn = static_cast<double>(n);
    if (!exact) {
        const double d = model.d();
        if (d == 0.0) throw std::domain_error("sample_mean_variance: asymptotic formula requires d != 0");
        return std::pow(nn, 2.0 * d - 1.0) * acvf_tail_constant(model) / (d * (2.0 * d + 1.0));
    }
    const Eigen::VectorXd g = acvf_sowell(model, n - 1).gamma;
    double acc = g(0);
    for (Eigen::Index j = 1; j < n; ++j) acc += 2.0 * (1.0 - static_cast<double>(j) / nn) * g(j);
    return acc / nn;
}

} // namespace afm
