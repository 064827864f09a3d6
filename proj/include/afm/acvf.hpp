#pragma once

#include "afm/errors.hpp"
#include "afm/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace afm {

enum class AcvfMethod { exact, asymptotic };

struct AcvfResult {
    Eigen::VectorXi lags;
    Eigen::VectorXd gamma;
    std::vector<AcvfMethod> method_per_lag;
};

inline constexpr long kHypergeometricMaxTerms = 100000;

/// Gauss hypergeometric series F(a, b; c; x) = sum_k (a)_k (b)_k / ((c)_k k!) x^k
/// for |x| < 1, stopped once |term| < 1e-14 |partial sum| (or the tail is
/// exactly zero). Arg may be real or complex; Real may be any floating type.
template <typename Real, typename Arg>
Arg hypergeometric_2f1(Real a, Real b, Real c, Arg x) {
    using std::abs;
    using std::floor;
    if (!(abs(x) < Real(1))) throw std::domain_error("gauss_2F1: series requires |x| < 1");
    if (c <= Real(0) && c == floor(c)) throw std::domain_error("gauss_2F1: c is a non-positive integer");

    Arg sum = Arg(1);
    Arg term = Arg(1);
    const Real tol = Real(1e-14);
    for (long k = 0; k < kHypergeometricMaxTerms; ++k) {
        const Real kk = Real(k);
        term *= x * ((a + kk) * (b + kk) / ((c + kk) * (kk + Real(1))));
        sum += term;
        if (term == Arg(0) || abs(term) < tol * abs(sum)) return sum;
    }
    throw numerical_error("gauss_2F1: series did not converge within the term cap");
}

double gauss_2F1(double a, double b, double c, double x);

/// FN(d) autocovariance gamma_0(h) = sigma2 Gamma(1-2d) Gamma(h+d) / (Gamma(1-d) Gamma(d) Gamma(1+h-d)),
/// evaluated with log-gamma; d = 0 is white noise. Negative h uses |h|.
double acvf_fd(double d, double sigma2, Eigen::Index h);

/// gamma_0(0..h_max) by the recurrence gamma_0(h) = gamma_0(h-1) (h-1+d) / (h-d).
Eigen::VectorXd acvf_fd_sequence(double d, double sigma2, Eigen::Index h_max);

/// Exact autocovariances gamma(0..h_max). p = 0 uses the closed form
/// sum_i psi(i) gamma_0(h - i); p > 0 uses the Sowell double sum over the
/// inverse AR roots in complex arithmetic. Throws numerical_error when two AR
/// roots coincide (multiplicity one violated).
AcvfResult acvf_sowell(const ArfimaModel& model, Eigen::Index h_max);

/// c_gamma = sigma2 / pi * Gamma(1 - 2d) sin(pi d) (Theta(1) / Phi(1))^2. Zero when d = 0.
double acvf_tail_constant(const ArfimaModel& model);

/// c_gamma |h|^{2d-1}; returns 0 for d = 0 (no hyperbolic tail).
double acvf_asymptotic(const ArfimaModel& model, Eigen::Index h);

/// Exact values up to switch_lag, asymptotic beyond.
AcvfResult acvf_hybrid(const ArfimaModel& model, Eigen::Index h_max, Eigen::Index switch_lag = 50);

/// Var(ybar). exact: (1/n)[gamma(0) + 2 sum_{j<n} (1 - j/n) gamma(j)];
/// asymptotic: n^{2d-1} c_gamma / (d (2d + 1)), which requires d != 0.
double sample_mean_variance(const ArfimaModel& model, Eigen::Index n, bool exact);

} // namespace afm
