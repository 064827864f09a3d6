#pragma once

// Reference computations for the test suites. Nothing here calls into the
// library except the TreeRing loader, which reuses the CLI file reader.

#include "afm/cli.hpp"
#include "afm/model.hpp"

#include <Eigen/Core>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace afm_test {

constexpr double kPi = std::numbers::pi;

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

/// f(lambda) = sigma2/(2 pi) |1 - e^{-i lambda}|^{-2d} |Theta(e^{-i lambda})|^2 / |Phi(e^{-i lambda})|^2.
inline double spectral_oracle(double d, const Eigen::VectorXd& ar, const Eigen::VectorXd& ma, double sigma2,
                              double lambda) {
    const std::complex<double> z = std::polar(1.0, -lambda);
    std::complex<double> phi = 1.0, theta = 1.0, zk = 1.0;
    for (Eigen::Index k = 0; k < std::max(ar.size(), ma.size()); ++k) {
        zk *= z;
        if (k < ar.size()) phi -= ar(k) * zk;
        if (k < ma.size()) theta += ma(k) * zk;
    }
    // |1 - z|^2 = 4 sin^2(lambda/2), without the cancellation near 0.
    const double s = 2.0 * std::sin(0.5 * lambda);
    return sigma2 / (2.0 * kPi) * std::pow(s, -2.0 * d) * std::norm(theta) / std::norm(phi);
}

/// gamma(h) = 2 integral_0^pi f(lambda) cos(h lambda) d lambda. The pole at 0
/// goes to tanh-sinh on (0, 0.1); the smooth remainder to adaptive Kronrod.
inline double acvf_quadrature(double d, const Eigen::VectorXd& ar, const Eigen::VectorXd& ma, double sigma2, int h) {
    auto integrand = [&](double lambda) {
        return spectral_oracle(d, ar, ma, sigma2, lambda) * std::cos(h * lambda);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double cut = 0.1;
    const double near = ts.integrate(integrand, 0.0, cut, 1e-13);
    const double far =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, cut, kPi, 20, 1e-13);
    return 2.0 * (near + far);
}

/// Gamma(j + a) / (Gamma(j + 1) Gamma(a)) through log-gamma, a not a non-positive integer.
inline double gamma_ratio(double a, int j) {
    if (j == 0) return 1.0;
    double sign = 1.0;
    // Gamma(x) < 0 for x in (-1, 0); j + a > 0 for j >= 1 and a > -1.
    if (a < 0.0) sign = -1.0;
    return sign * std::exp(std::lgamma(j + a) - std::lgamma(j + 1.0) - std::lgamma(a));
}

/// Coefficients of (1 - z)^{-a} via the binomial series evaluated with
/// exact binomial products (independent of the library recursion form).
inline Eigen::VectorXd binomial_series(double a, int m) {
    Eigen::VectorXd c(m + 1);
    for (int j = 0; j <= m; ++j) c(j) = gamma_ratio(a, j);
    return c;
}

inline Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int m) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m + 1);
    for (int i = 0; i <= m && i < a.size(); ++i)
        for (int j = 0; i + j <= m && j < b.size(); ++j) out(i + j) += a(i) * b(j);
    return out;
}

/// Power series of 1 / Phi(z) by long division.
inline Eigen::VectorXd inverse_series(const Eigen::VectorXd& ar, int m) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m + 1);
    c(0) = 1.0;
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= std::min<int>(j, static_cast<int>(ar.size())); ++k) c(j) += ar(k - 1) * c(j - k);
    return c;
}

/// psi weights of (1 - z)^{-d} Theta(z) / Phi(z) assembled from independent pieces.
inline Eigen::VectorXd psi_oracle(double d, const Eigen::VectorXd& ar, const Eigen::VectorXd& ma, int m) {
    Eigen::VectorXd theta(ma.size() + 1);
    theta << 1.0, ma;
    return convolve(convolve(binomial_series(d, m), theta, m), inverse_series(ar, m), m);
}

/// Polynomial with constant term 1 whose roots are `roots` (conjugate pairs
/// must both be listed): prod_i (1 - z / r_i). Returned as model coefficients
/// (phi or theta convention selected by `ar`).
inline Eigen::VectorXd coefficients_from_roots(const std::vector<std::complex<double>>& roots, bool ar) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] / r;
        }
        poly = next;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(roots.size()));
    for (std::size_t i = 1; i < poly.size(); ++i) out(static_cast<Eigen::Index>(i - 1)) = (ar ? -1.0 : 1.0) * poly[i].real();
    return out;
}

/// Random stationary, invertible model with p, q in {0, 1, 2}; every root has
/// modulus in [1.3, 4].
inline afm::ArfimaModel random_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> order(0, 2);
    std::uniform_real_distribution<double> modulus(1.3, 4.0);
    std::uniform_real_distribution<double> angle(0.2, kPi - 0.2);
    std::uniform_real_distribution<double> dd(-0.45, 0.45);
    std::bernoulli_distribution coin(0.5);
    auto roots = [&](int k) {
        std::vector<std::complex<double>> r;
        if (k == 2 && coin(rng)) {
            const auto c = std::polar(modulus(rng), angle(rng));
            r = {c, std::conj(c)};
        } else {
            for (int i = 0; i < k; ++i) r.emplace_back((coin(rng) ? 1.0 : -1.0) * modulus(rng), 0.0);
        }
        return r;
    };
    const int p = order(rng);
    const int q = order(rng);
    return afm::ArfimaModel(dd(rng), coefficients_from_roots(roots(p), true), coefficients_from_roots(roots(q), false));
}

/// Cov(c(j), c(l)) for the zero-mean sample autocovariances
/// c(k) = (1/n) sum_{t<n-k} y_t y_{t+k} of a Gaussian series with
/// autocovariance gamma(0..n+max(j,l)); exact by Isserlis, O(n).
inline double autocov_covariance(const Eigen::VectorXd& gamma, long n, long j, long l) {
    auto g = [&](long h) { return gamma(h < 0 ? -h : h); };
    double acc = 0.0;
    // t in [0, n-j), s in [0, n-l), grouped by u = s - t.
    for (long u = -(n - j - 1); u <= n - l - 1; ++u) {
        const long lo = std::max(0L, -u);
        const long hi = std::min(n - j - 1, n - l - 1 - u);
        if (hi < lo) continue;
        acc += static_cast<double>(hi - lo + 1) * (g(u) * g(u + l - j) + g(u + l) * g(u - j));
    }
    return acc / (static_cast<double>(n) * static_cast<double>(n));
}

/// Expected value of r(k) = c(k)/c(0) to first order, and its delta-method variance.
struct AcfMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline AcfMoments acf_moments(const Eigen::VectorXd& gamma, long n, long k) {
    const double c0 = gamma(0);
    const double rho = gamma(k) * static_cast<double>(n - k) / static_cast<double>(n) / c0;
    const double var = autocov_covariance(gamma, n, k, k) - 2.0 * rho * autocov_covariance(gamma, n, k, 0) +
                       rho * rho * autocov_covariance(gamma, n, 0, 0);
    return {rho, var / (c0 * c0)};
}

struct Dataset {
    std::optional<Eigen::VectorXd> values;
    std::string reason;
};

/// TreeRing series from $AFM_TREERING_CSV or <source>/data/treering.csv.
inline Dataset treering() {
    std::string path;
    if (const char* env = std::getenv("AFM_TREERING_CSV")) path = env;
    else path = std::string(AFM_SOURCE_DIR) + "/data/treering.csv";
    if (!std::filesystem::exists(path)) {
        return {std::nullopt, "TreeRing dataset not found at " + path +
                                  " (run tools/fetch-treering.sh or set AFM_TREERING_CSV)"};
    }
    return {afm::cli::read_series_file(path), ""};
}

} // namespace afm_test
