#pragma once

#include "afm/model.hpp"
#include "afm/whittle.hpp"

#include <Eigen/Core>

namespace afm {

/// y_hat_{n+k} = mean + sum_{j>=1} (-pi_j) x_{n+k-j}, k = 1..ahead, where x is
/// the centred series extended by its own forecasts. The AR(inf) filter uses
/// every available lag.
Eigen::VectorXd forecast(const ArfimaModel& model, const TimeSeries& series, int ahead);

struct ForecastModelSpec {
    enum class Kind { arfima, random_walk };
    Kind kind = Kind::arfima;
    int p = 0;
    int q = 0;
    FixedParameters fixed;

    static ForecastModelSpec arfima(int p, int q, FixedParameters fixed = {});
    /// ARIMA(0,1,0): y_hat_{t+tau} = y_t.
    static ForecastModelSpec random_walk();
};

enum class RefitPolicy { every_window, once };

/// Window k (k = 0..count-1) trains on y[0..origin+k] (0-based, inclusive) and
/// predicts y[origin+k+tau]. Windows whose fit throws are NaN and counted in
/// `missing`; fits that end without meeting the gradient tolerance are kept
/// and counted in `nonconverged`.
struct ForecastSet {
    Eigen::Index origin = 0;
    int tau = 1;
    Eigen::VectorXd predictions;
    Eigen::VectorXd target;
    int missing = 0;
    int nonconverged = 0;
};

/// Requires origin + count + tau <= n and origin >= 1.
ForecastSet rolling_forecasts(const TimeSeries& series, const ForecastModelSpec& spec, Eigen::Index origin,
                              int tau, Eigen::Index count, RefitPolicy policy = RefitPolicy::every_window);

} // namespace afm
