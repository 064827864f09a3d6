#pragma once

#include "afm/model.hpp"
#include "afm/optimize.hpp"
#include "afm/spectral.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace afm {

/// Parameter index (0 = d, then AR, then MA) -> value held fixed.
using FixedParameters = std::map<int, double>;

struct FitReport {
    ArfimaModel model;                 // sigma2 is the profiled innovation variance
    Eigen::VectorXd stderr_hessian;    // 0 for fixed entries, NaN when the Hessian is unusable
    bool hessian_ok = false;
    double loglik = 0.0;               // Whittle objective L at the optimum (per observation)
    double loglik_total = 0.0;         // n L - (n/2) log(2 pi), used for AIC
    double aic = 0.0;
    Eigen::VectorXd residuals;
    bool converged = false;
    int iterations = 0;
    std::vector<bool> fixed_mask;
    Eigen::Index n = 0;

    int free_parameters() const;
};

struct WhittleOptions {
    MinimizeOptions optimizer{};
    bool compute_residuals = true;
};

/// sigma2_hat = (2 pi / m) sum_j I(lambda_j) / g(lambda_j), with f = sigma2/(2 pi) g.
/// All-zero ordinates give 0.
double profile_sigma2(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram);

/// Whittle log-likelihood with sigma2 profiled out,
///   L = -(1/2n) [ sum_j log f(lambda_j) + sum_j I(lambda_j) / f(lambda_j) ],
/// over the positive Fourier frequencies. Returns -inf for parameters outside
/// the stationary/invertible region. Larger is better.
double whittle_loglik(const Eigen::Ref<const Eigen::VectorXd>& params, int p, const Periodogram& pgram);

/// Maximises whittle_loglik over the free parameters. Non-convergence is
/// reported through FitReport::converged, not thrown.
FitReport whittle_fit(const TimeSeries& series, int p, int q, const FixedParameters& fixed = {},
                      const WhittleOptions& options = {});

struct HessianStdErr {
    Eigen::VectorXd standard_errors;
    Eigen::MatrixXd hessian;
    bool ok = false;
};

/// SE_i = sqrt([H^{-1}]_ii) for the central-difference Hessian H of
/// `objective` at x_hat (step max(1e-4, 1e-4 |x_i|)). The objective should be a
/// negative log-likelihood on the total-sample scale.
HessianStdErr hessian_stderr(const Objective& objective, const Eigen::VectorXd& x_hat);

/// e_t = sum_{j=0}^{t-1} pi_j (y_{t-j} - mean), truncated AR(inf) filter.
Eigen::VectorXd residuals(const ArfimaModel& model, const TimeSeries& series);

/// r_0..r_max_lag of the demeaned sample.
Eigen::VectorXd sample_acf(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index max_lag);

struct LjungBoxRow {
    int lag = 0;
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Q(h) = n (n + 2) sum_{k<=h} r_k^2 / (n - k) from autocorrelations r_1..r_H.
std::vector<LjungBoxRow> ljung_box_from_acf(const Eigen::Ref<const Eigen::VectorXd>& acf_from_lag1, Eigen::Index n);

/// Ljung-Box table for lags 1..max_lag; requires max_lag < n/4.
std::vector<LjungBoxRow> ljung_box(const Eigen::Ref<const Eigen::VectorXd>& residuals, int max_lag);

struct SelectionRow {
    int p = 0;
    int q = 0;
    double aic = 0.0;
    double d = 0.0;
    double p_value_d = 1.0;
    bool converged = false;
    bool failed = false;
};

/// Fits every (p, q) with p <= p_max, q <= q_max and sorts by AIC. Failed fits
/// are kept (failed = true, aic = +inf) at the end of the table.
std::vector<SelectionRow> model_selection(const TimeSeries& series, int p_max, int q_max);

/// Two-sided normal p-value for an estimate / standard error ratio.
double two_sided_normal_p(double t);

} // namespace afm
