#include "afm/whittle.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace afm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// d is optimised on an unconstrained scale through a logistic map onto
// (-1 + eps, 0.5 - eps).
constexpr double kDEps = 1e-4;
constexpr double kDLow = -1.0 + kDEps;
constexpr double kDHigh = 0.5 - kDEps;

double d_from_free(double u) { return kDLow + (kDHigh - kDLow) / (1.0 + std::exp(-u)); }

double free_from_d(double d) {
    const double s = std::clamp((d - kDLow) / (kDHigh - kDLow), 1e-12, 1.0 - 1e-12);
    return std::log(s / (1.0 - s));
}

bool params_valid(const Eigen::Ref<const Eigen::VectorXd>& params, int p) {
    if (!params.allFinite()) return false;
    return check_parameters(ArfimaModel::from_parameters(params, p)).ok();
}

// Returns the per-frequency shape g(lambda_j) for valid params.
Eigen::VectorXd shape_on_grid(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram) {
    const Eigen::Index q = params.size() - 1 - p;
    Eigen::VectorXd g(pgram.size());
    for (Eigen::Index j = 0; j < pgram.size(); ++j) {
        g(j) = spectral_shape(params(0), params.segment(1, p), params.tail(q), pgram.frequencies(j));
    }
    return g;
}

void check_layout(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram) {
    if (p < 0 || params.size() < 1 + p) throw std::invalid_argument("whittle: parameter vector shorter than 1 + p");
    if (pgram.size() == 0) throw std::invalid_argument("whittle: empty periodogram");
}

// Full parameter vector from the free (optimiser) coordinates.
struct ParameterMap {
    int k = 0;
    std::vector<bool> fixed_mask;
    Eigen::VectorXd fixed_values;
    std::vector<int> free_index;

    Eigen::VectorXd full(const Eigen::VectorXd& free, bool transformed) const {
        Eigen::VectorXd out = fixed_values;
        for (std::size_t i = 0; i < free_index.size(); ++i) {
            const int idx = free_index[i];
            const double v = free(static_cast<Eigen::Index>(i));
            out(idx) = (transformed && idx == 0) ? d_from_free(v) : v;
        }
        return out;
    }

    Eigen::VectorXd free_from_full(const Eigen::VectorXd& full, bool transformed) const {
        Eigen::VectorXd out(static_cast<Eigen::Index>(free_index.size()));
        for (std::size_t i = 0; i < free_index.size(); ++i) {
            const int idx = free_index[i];
            out(static_cast<Eigen::Index>(i)) = (transformed && idx == 0) ? free_from_d(full(idx)) : full(idx);
        }
        return out;
    }
};

} // namespace

int FitReport::free_parameters() const {
    return static_cast<int>(std::count(fixed_mask.begin(), fixed_mask.end(), false));
}

double profile_sigma2(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram) {
    check_layout(params, p, pgram);
    const Eigen::VectorXd g = shape_on_grid(params, p, pgram);
    return 2.0 * kPi * (pgram.ordinates.array() / g.array()).mean();
}

double whittle_loglik(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram) {
    check_layout(params, p, pgram);
    if (!params_valid(params, p)) return -kInf;
    const Eigen::VectorXd g = shape_on_grid(params, p, pgram);
    const double m = static_cast<double>(pgram.size());
    const double sigma2 = 2.0 * kPi * (pgram.ordinates.array() / g.array()).sum() / m;
    if (!(sigma2 > 0.0)) throw std::domain_error("whittle_loglik: degenerate (all-zero) periodogram");
    // With sigma2 profiled, sum_j I_j / f_j collapses to m.
    const double log_f = (g.array().log() + std::log(sigma2 / (2.0 * kPi))).sum();
    return -(log_f + m) / (2.0 * static_cast<double>(pgram.n));
}

HessianStdErr hessian_stderr(const Objective& objective, const Eigen::VectorXd& x_hat) {
    const Eigen::Index k = x_hat.size();
    HessianStdErr out;
    out.hessian = Eigen::MatrixXd::Zero(k, k);
    out.standard_errors = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    if (k == 0) {
        out.ok = true;
        return out;
    }

    Eigen::VectorXd h(k);
    for (Eigen::Index i = 0; i < k; ++i) h(i) = std::max(1e-4, 1e-4 * std::abs(x_hat(i)));

    const double f0 = objective(x_hat);
    bool finite = std::isfinite(f0);
    auto eval = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
        Eigen::VectorXd x = x_hat;
        x(i) += si * h(i);
        x(j) += sj * h(j);
        const double v = objective(x);
        if (!std::isfinite(v)) finite = false;
        return v;
    };

    for (Eigen::Index i = 0; i < k && finite; ++i) {
        const double up = eval(i, 1.0, i, 0.0);
        const double down = eval(i, -1.0, i, 0.0);
        out.hessian(i, i) = (up - 2.0 * f0 + down) / (h(i) * h(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            const double pp = eval(i, 1.0, j, 1.0);
            const double pm = eval(i, 1.0, j, -1.0);
            const double mp = eval(i, -1.0, j, 1.0);
            const double mm = eval(i, -1.0, j, -1.0);
            out.hessian(i, j) = out.hessian(j, i) = (pp - pm - mp + mm) / (4.0 * h(i) * h(j));
        }
    }
    if (!finite) return out;

    Eigen::LLT<Eigen::MatrixXd> llt(out.hessian);
    if (llt.info() != Eigen::Success) return out;
    const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(k, k));
    out.standard_errors = inverse.diagonal().cwiseSqrt();
    out.ok = out.standard_errors.allFinite();
    return out;
}

FitReport whittle_fit(const TimeSeries& series, int p, int q, const FixedParameters& fixed,
                      const WhittleOptions& options) {
    if (p < 0 || q < 0) throw std::invalid_argument("whittle_fit: negative order");
    const int k = 1 + p + q;
    const Eigen::Index n = series.size();
    if (n <= 10 * k) throw std::invalid_argument("whittle_fit: need more than 10 * (1 + p + q) observations");

    ParameterMap map;
    map.k = k;
    map.fixed_mask.assign(static_cast<std::size_t>(k), false);
    map.fixed_values = Eigen::VectorXd::Zero(k);
    map.fixed_values(0) = 0.1;
    for (const auto& [index, value] : fixed) {
        if (index < 0 || index >= k) throw std::invalid_argument("whittle_fit: fixed index out of range");
        if (!std::isfinite(value)) throw std::invalid_argument("whittle_fit: non-finite fixed value");
        map.fixed_mask[static_cast<std::size_t>(index)] = true;
        map.fixed_values(index) = value;
    }
    for (int i = 0; i < k; ++i) {
        if (!map.fixed_mask[static_cast<std::size_t>(i)]) map.free_index.push_back(i);
    }
    const bool d_free = !map.fixed_mask[0];

    const Periodogram pgram = periodogram(series);
    if (!(pgram.ordinates.array() > 0.0).any()) {
        throw std::invalid_argument("whittle_fit: constant series has an all-zero periodogram");
    }

    const Objective negative_loglik = [&](const Eigen::VectorXd& free) {
        const double value = whittle_loglik(map.full(free, true), p, pgram);
        return std::isfinite(value) ? -value : kInf;
    };

    auto run_from = [&](double d_start) {
        Eigen::VectorXd start = map.fixed_values;
        if (d_free) start(0) = d_start;
        for (int idx : map.free_index) {
            if (idx > 0) start(idx) = 0.0;
        }
        if (!params_valid(start, p)) {
            throw std::invalid_argument("whittle_fit: fixed parameters outside the stationary/invertible region");
        }
        return minimize_bfgs(negative_loglik, map.free_from_full(start, true), options.optimizer);
    };

    auto is_converged = [](const MinimizeResult& r) {
        if (r.status == MinimizeStatus::gradient_converged) return true;
        // A stalled line search at a near-stationary point is numerical noise,
        // not a failure.
        return r.status == MinimizeStatus::stalled && r.gradient.lpNorm<Eigen::Infinity>() < 1e-4;
    };

    MinimizeResult best = run_from(0.1);
    int total_iterations = best.iterations;
    bool converged = is_converged(best);
    if (!converged && d_free) {
        for (double d_start : {-0.45, 0.1, 0.4}) {
            MinimizeResult attempt = run_from(d_start);
            total_iterations += attempt.iterations;
            const bool attempt_converged = is_converged(attempt);
            if ((attempt_converged && !converged) ||
                (attempt_converged == converged && attempt.value < best.value)) {
                best = std::move(attempt);
                converged = attempt_converged;
            }
        }
    }

    const Eigen::VectorXd params = map.full(best.x, true);
    FitReport report;
    report.n = n;
    report.fixed_mask = map.fixed_mask;
    report.converged = converged;
    report.iterations = total_iterations;
    report.loglik = whittle_loglik(params, p, pgram);
    report.model = ArfimaModel::from_parameters(params, p, profile_sigma2(params, p, pgram));

    // The Whittle sum runs over the half grid, so the full-sample negative
    // log-likelihood is 2n(-L); its Hessian is on the exact_stderr scale.
    const double scale = 2.0 * static_cast<double>(n);
    const Objective total_negative = [&](const Eigen::VectorXd& free) {
        const double value = whittle_loglik(map.full(free, false), p, pgram);
        return std::isfinite(value) ? -scale * value : kInf;
    };
    const HessianStdErr hessian = hessian_stderr(total_negative, map.free_from_full(params, false));
    report.hessian_ok = hessian.ok;
    report.stderr_hessian = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < map.free_index.size(); ++i) {
        report.stderr_hessian(map.free_index[i]) = hessian.standard_errors(static_cast<Eigen::Index>(i));
    }

    // AIC convention: n L plus the Gaussian constant.
    report.loglik_total = static_cast<double>(n) * report.loglik - 0.5 * static_cast<double>(n) * std::log(2.0 * kPi);
    report.aic = -2.0 * (report.loglik_total - report.free_parameters());
    if (options.compute_residuals) report.residuals = residuals(report.model, series);
    return report;
}

Eigen::VectorXd residuals(const ArfimaModel& model, const TimeSeries& series) {
    const Eigen::Index n = series.size();
    const Eigen::VectorXd pi = pi_coefficients(model, n - 1);
    const Eigen::VectorXd y = series.centered();
    Eigen::VectorXd e(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        e(t) = pi.head(t + 1).dot(y.head(t + 1).reverse());
    }
    return e;
}

Eigen::VectorXd sample_acf(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index max_lag) {
    const Eigen::Index n = x.size();
    if (max_lag < 0 || max_lag >= n) throw std::invalid_argument("sample_acf: lag out of range");
    const Eigen::VectorXd c = x.array() - x.mean();
    const double c0 = c.squaredNorm();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(max_lag + 1);
    if (c0 == 0.0) return r;
    for (Eigen::Index k = 0; k <= max_lag; ++k) r(k) = c.head(n - k).dot(c.tail(n - k)) / c0;
    return r;
}

std::vector<LjungBoxRow> ljung_box_from_acf(const Eigen::Ref<const Eigen::VectorXd>& acf_from_lag1, Eigen::Index n) {
    std::vector<LjungBoxRow> rows;
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (Eigen::Index k = 1; k <= acf_from_lag1.size(); ++k) {
        sum += acf_from_lag1(k - 1) * acf_from_lag1(k - 1) / (nd - static_cast<double>(k));
        LjungBoxRow row;
        row.lag = static_cast<int>(k);
        row.statistic = nd * (nd + 2.0) * sum;
        row.p_value = boost::math::gamma_q(0.5 * static_cast<double>(k), 0.5 * row.statistic);
        rows.push_back(row);
    }
    return rows;
}

std::vector<LjungBoxRow> ljung_box(const Eigen::Ref<const Eigen::VectorXd>& residuals, int max_lag) {
    const Eigen::Index n = residuals.size();
    if (max_lag < 1 || 4 * static_cast<Eigen::Index>(max_lag) >= n) {
        throw std::invalid_argument("ljung_box: need 1 <= max_lag < n/4");
    }
    const Eigen::VectorXd r = sample_acf(residuals, max_lag);
    return ljung_box_from_acf(r.tail(max_lag), n);
}

double two_sided_normal_p(double t) { return std::erfc(std::abs(t) / std::numbers::sqrt2); }

std::vector<SelectionRow> model_selection(const TimeSeries& series, int p_max, int q_max) {
    if (p_max < 0 || q_max < 0 || p_max > 5 || q_max > 5) {
        throw std::invalid_argument("model_selection: orders must lie in [0, 5]");
    }
    std::vector<SelectionRow> rows;
    WhittleOptions options;
    options.compute_residuals = false;
    for (int p = 0; p <= p_max; ++p) {
        for (int q = 0; q <= q_max; ++q) {
            SelectionRow row;
            row.p = p;
            row.q = q;
            try {
                const FitReport fit = whittle_fit(series, p, q, {}, options);
                row.aic = fit.aic;
                row.d = fit.model.d();
                row.converged = fit.converged;
                const double se = fit.stderr_hessian(0);
                row.p_value_d = (fit.hessian_ok && se > 0.0) ? two_sided_normal_p(row.d / se)
                                                              : std::numeric_limits<double>::quiet_NaN();
            } catch (const std::exception&) {
                row.failed = true;
                row.aic = kInf;
                row.p_value_d = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SelectionRow& a, const SelectionRow& b) { return a.aic < b.aic; });
    return rows;
}

} // namespace afm
