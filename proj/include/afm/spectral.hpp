#pragma once

#include "afm/model.hpp"

#include <Eigen/Core>

namespace afm {

/// Raw periodogram at the positive Fourier frequencies 2*pi*j/n,
/// j = 1..floor((n-1)/2). Zero and Nyquist frequencies are not included.
struct Periodogram {
    Eigen::VectorXd frequencies;
    Eigen::VectorXd ordinates;
    Eigen::Index n = 0;

    Eigen::Index size() const { return frequencies.size(); }
};

/// f(lambda) = sigma2/(2 pi) (2 sin(lambda/2))^{-2d} |Theta(e^{-i lambda})|^2 / |Phi(e^{-i lambda})|^2
/// for lambda in [-pi, pi]. At lambda = 0 the value is +inf when d > 0 and 0
/// when d < 0. Throws std::domain_error for models failing check_parameters().
double spectral_density(const ArfimaModel& model, double lambda);

/// Vectorised form; validates the model once.
Eigen::VectorXd spectral_density(const ArfimaModel& model, const Eigen::Ref<const Eigen::VectorXd>& lambdas);

/// Spectral density divided by sigma2/(2 pi), without any validity checks.
/// This is the inner loop of the Whittle objective.
double spectral_shape(double d, const Eigen::Ref<const Eigen::VectorXd>& ar,
                      const Eigen::Ref<const Eigen::VectorXd>& ma, double lambda);

Eigen::VectorXd fourier_frequencies(Eigen::Index n);

/// I(lambda_j) = |sum_t (y_t - ybar) e^{i lambda_j t}|^2 / (2 pi n). Uses a
/// mixed-radix FFT for n >= 64 and the direct sum below that.
Periodogram periodogram(const TimeSeries& series);

} // namespace afm
