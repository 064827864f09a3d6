#include "afm/forecast.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace afm {

Eigen::VectorXd forecast(const ArfimaModel& model, const TimeSeries& series, int ahead) {
    if (ahead < 1) throw std::invalid_argument("forecast: ahead must be at least 1");
    const Eigen::Index n = series.size();
    const Eigen::Index total = n + ahead;
    const Eigen::VectorXd pi = pi_coefficients(model, total - 1);

    // Stored newest-first so the filter is a forward dot product.
    Eigen::VectorXd x_rev(total);
    x_rev.tail(n) = series.centered().reverse();
    Eigen::VectorXd out(ahead);
    for (int k = 0; k < ahead; ++k) {
        const Eigen::Index t = n + k;
        const Eigen::Index start = total - t;
        const double x_hat = -pi.segment(1, t).dot(x_rev.segment(start, t));
        x_rev(start - 1) = x_hat;
        out(k) = series.mean() + x_hat;
    }
    return out;
}

ForecastModelSpec ForecastModelSpec::arfima(int p, int q, FixedParameters fixed) {
    ForecastModelSpec spec;
    spec.kind = Kind::arfima;
    spec.p = p;
    spec.q = q;
    spec.fixed = std::move(fixed);
    return spec;
}

ForecastModelSpec ForecastModelSpec::random_walk() {
    ForecastModelSpec spec;
    spec.kind = Kind::random_walk;
    return spec;
}

ForecastSet rolling_forecasts(const TimeSeries& series, const ForecastModelSpec& spec, Eigen::Index origin,
                              int tau, Eigen::Index count, RefitPolicy policy) {
    if (tau < 1) throw std::invalid_argument("rolling_forecasts: tau must be at least 1");
    if (count < 0) throw std::invalid_argument("rolling_forecasts: count must be nonnegative");
    if (origin < 1) throw std::invalid_argument("rolling_forecasts: origin must leave at least two observations");
    if (origin + count + tau > series.size()) {
        throw std::invalid_argument("rolling_forecasts: origin + count + tau exceeds the series length");
    }

    ForecastSet out;
    out.origin = origin;
    out.tau = tau;
    out.predictions = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::quiet_NaN());
    out.target.resize(count);
    const Eigen::VectorXd& y = series.values();

    WhittleOptions options;
    options.compute_residuals = false;
    std::optional<ArfimaModel> shared;

    for (Eigen::Index k = 0; k < count; ++k) {
        const Eigen::Index last = origin + k;
        out.target(k) = y(last + tau);
        if (spec.kind == ForecastModelSpec::Kind::random_walk) {
            out.predictions(k) = y(last);
            continue;
        }
        const TimeSeries window = series.head(last + 1);
        try {
            if (policy == RefitPolicy::every_window || !shared) {
                const FitReport fit = whittle_fit(window, spec.p, spec.q, spec.fixed, options);
                if (!fit.converged) ++out.nonconverged;
                shared = fit.model;
            }
            const double value = forecast(*shared, window, tau)(tau - 1);
            if (std::isfinite(value)) out.predictions(k) = value;
        } catch (const std::exception&) {
            if (policy == RefitPolicy::once) shared.reset();
        }
        if (!std::isfinite(out.predictions(k))) ++out.missing;
    }
    return out;
}

} // namespace afm
