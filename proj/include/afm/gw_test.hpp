#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>

namespace afm {

enum class HacMethod { simple_regression, hac, newey_west, andrews_kernel, weave };
enum class Alternative { two_sided, greater, less };

std::string to_string(HacMethod method);
std::string to_string(Alternative alternative);
/// Accepts the names printed by to_string; throws std::invalid_argument otherwise.
HacMethod parse_hac_method(const std::string& name);
Alternative parse_alternative(const std::string& name);

struct LongRunVariance {
    double value = 0.0;
    /// Kernel bandwidth actually used (QS bandwidth for andrews_kernel).
    double bandwidth = 0.0;
    /// The kernel sum was negative and was replaced by the lag-0 variance.
    bool truncated = false;
};

/// Delta L_i = |x_i - y_i| - |z_i - y_i|.
Eigen::VectorXd loss_differential(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& z,
                                  const Eigen::Ref<const Eigen::VectorXd>& y);

/// Bartlett bandwidth floor(4 (N / 100)^{2/9}).
int newey_west_bandwidth(Eigen::Index n);

/// Long-run variance of the demeaned u, autocovariances scaled by 1/N.
///   simple_regression: lag-0 variance
///   newey_west:        Bartlett, bandwidth from newey_west_bandwidth
///   hac:               Bartlett, bandwidth as given (default: newey_west rule)
///   andrews_kernel:    quadratic spectral, AR(1) plug-in bandwidth 1.3221 (alpha N)^{1/5}
/// A bandwidth of 0 gives the lag-0 variance; negative bandwidths are rejected.
/// weave throws not_implemented_error. Requires N >= 4.
LongRunVariance hac_variance(const Eigen::Ref<const Eigen::VectorXd>& u, HacMethod method,
                             std::optional<int> bandwidth = std::nullopt);

struct GwReport {
    double statistic = 0.0;
    double p_value = 1.0;
    int tau = 1;
    Eigen::Index n = 0;
    HacMethod method = HacMethod::simple_regression;
    Alternative alternative = Alternative::two_sided;
    double mean_loss_diff = 0.0;
    double long_run_variance = 0.0;
    /// Zero variance with a nonzero mean difference: p-value set to 0.
    bool degenerate = false;
    bool variance_truncated = false;
};

/// Giacomini-White test of H0: E[Delta L] = 0 for predictions x, z of y.
/// statistic = mean(Delta L) / sqrt(sigma2_N / N); tau = 1 uses the lag-0
/// variance (simple regression on a constant), tau > 1 uses `method`.
/// `greater` rejects when x has the larger loss.
GwReport gw_test(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& z,
                 const Eigen::Ref<const Eigen::VectorXd>& y, int tau, HacMethod method = HacMethod::newey_west,
                 Alternative alternative = Alternative::two_sided, std::optional<int> bandwidth = std::nullopt);

} // namespace afm
