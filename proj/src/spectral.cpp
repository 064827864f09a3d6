#include "afm/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace afm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kDirectSumCutoff = 64;

// |1 + c_1 e^{-i lambda} + ... |^2 for an ascending coefficient tail.
double squared_gain(double lead, const Eigen::Ref<const Eigen::VectorXd>& tail, double lambda) {
    std::complex<double> acc = lead;
    for (Eigen::Index k = 0; k < tail.size(); ++k) {
        acc += tail(k) * std::polar(1.0, -static_cast<double>(k + 1) * lambda);
    }
    return std::norm(acc);
}

double density_unchecked(const ArfimaModel& model, double lambda) {
    const double scale = model.sigma2() / (2.0 * kPi);
    if (lambda == 0.0) {
        if (model.d() > 0.0) return std::numeric_limits<double>::infinity();
        if (model.d() < 0.0) return 0.0;
    }
    return scale * spectral_shape(model.d(), model.ar(), model.ma(), lambda);
}

void check_frequency(double lambda) {
    if (!(std::abs(lambda) <= kPi)) throw std::domain_error("spectral_density: frequency outside [-pi, pi]");
}

} // namespace

double spectral_shape(double d, const Eigen::Ref<const Eigen::VectorXd>& ar,
                      const Eigen::Ref<const Eigen::VectorXd>& ma, double lambda) {
    lambda = std::abs(lambda);
    const double theta2 = squared_gain(1.0, ma, lambda);
    const double phi2 = squared_gain(1.0, -ar, lambda);
    if (d == 0.0) return theta2 / phi2;
    const double two_sin = 2.0 * std::sin(0.5 * lambda);
    return std::pow(two_sin, -2.0 * d) * theta2 / phi2;
}

double spectral_density(const ArfimaModel& model, double lambda) {
    require_valid(model, "spectral_density");
    check_frequency(lambda);
    return density_unchecked(model, lambda);
}

Eigen::VectorXd spectral_density(const ArfimaModel& model, const Eigen::Ref<const Eigen::VectorXd>& lambdas) {
    require_valid(model, "spectral_density");
    Eigen::VectorXd out(lambdas.size());
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
        check_frequency(lambdas(i));
        out(i) = density_unchecked(model, lambdas(i));
    }
    return out;
}

Eigen::VectorXd fourier_frequencies(Eigen::Index n) {
    if (n < 2) throw std::invalid_argument("fourier_frequencies: n must be at least 2");
    const Eigen::Index m = (n - 1) / 2;
    Eigen::VectorXd out(m);
    for (Eigen::Index j = 1; j <= m; ++j) out(j - 1) = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    return out;
}

Periodogram periodogram(const TimeSeries& series) {
    const Eigen::Index n = series.size();
    Periodogram out;
    out.n = n;
    out.frequencies = fourier_frequencies(n);
    const Eigen::Index m = out.frequencies.size();
    out.ordinates.resize(m);

    // Demean with the sample mean regardless of any stored mean: the zero
    // frequency is dropped and the transform must annihilate constants.
    const Eigen::VectorXd y = series.values().array() - series.values().mean();
    const double norm = 2.0 * kPi * static_cast<double>(n);

    if (n < kDirectSumCutoff) {
        for (Eigen::Index j = 0; j < m; ++j) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index t = 0; t < n; ++t) {
                acc += y(t) * std::polar(1.0, out.frequencies(j) * static_cast<double>(t + 1));
            }
            out.ordinates(j) = std::norm(acc) / norm;
        }
        return out;
    }

    Eigen::FFT<double> fft;
    std::vector<double> input(y.data(), y.data() + n);
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, input);
    for (Eigen::Index j = 0; j < m; ++j) out.ordinates(j) = std::norm(spectrum[static_cast<std::size_t>(j + 1)]) / norm;
    return out;
}

} // namespace afm
