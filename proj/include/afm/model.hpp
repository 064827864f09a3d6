#pragma once

#include "afm/series.hpp"

#include <Eigen/Core>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace afm {

/// Two roots are treated as equal when their distance is below
/// kRootMatchTolerance * max(1, |root|).
inline constexpr double kRootMatchTolerance = 1e-8;
/// Repeated roots of one polynomial are only resolved to about sqrt(eps) by
/// the eigenvalue route, so repeated-root detection uses a wider cutoff.
inline constexpr double kRepeatedRootTolerance = 1e-6;

/// ARFIMA(p, d, q) parameter bundle:
///   Phi(B) y_t = Theta(B) (1 - B)^{-d} e_t,  Var(e_t) = sigma2,
/// with Phi(z) = 1 - ar_1 z - ... - ar_p z^p and Theta(z) = 1 + ma_1 z + ... + ma_q z^q.
///
/// Construction only checks that sigma2 is positive and every coefficient is
/// finite; use check_parameters() for the stationarity/invertibility region.
class ArfimaModel {
public:
    ArfimaModel() = default;
    ArfimaModel(double d, Eigen::VectorXd ar, Eigen::VectorXd ma, double sigma2 = 1.0);

    /// Fractional noise FN(d).
    static ArfimaModel fractional_noise(double d, double sigma2 = 1.0);

    /// Builds a model from the (d, ar_1..ar_p, ma_1..ma_q) parameter layout.
    static ArfimaModel from_parameters(const Eigen::Ref<const Eigen::VectorXd>& params, int p,
                                       double sigma2 = 1.0);

    double d() const { return d_; }
    const Eigen::VectorXd& ar() const { return ar_; }
    const Eigen::VectorXd& ma() const { return ma_; }
    double sigma2() const { return sigma2_; }
    int p() const { return static_cast<int>(ar_.size()); }
    int q() const { return static_cast<int>(ma_.size()); }
    int num_parameters() const { return 1 + p() + q(); }

    /// (d, ar_1..ar_p, ma_1..ma_q).
    Eigen::VectorXd parameters() const;

    /// Ascending coefficients of Phi(z): (1, -ar_1, ..., -ar_p).
    Eigen::VectorXd ar_polynomial() const;
    /// Ascending coefficients of Theta(z): (1, ma_1, ..., ma_q).
    Eigen::VectorXd ma_polynomial() const;

    ArfimaModel with_sigma2(double sigma2) const;

    /// Names in parameter order: "d", "phi 1", ..., "theta 1", ...
    std::vector<std::string> parameter_names() const;

private:
    double d_ = 0.0;
    Eigen::VectorXd ar_;
    Eigen::VectorXd ma_;
    double sigma2_ = 1.0;
};

/// Observed series. Values are fixed at construction; the mean used for
/// centring is the supplied one if given, the sample mean otherwise.
class TimeSeries {
public:
    explicit TimeSeries(Eigen::VectorXd values, std::optional<double> mean = std::nullopt);

    Eigen::Index size() const { return values_.size(); }
    const Eigen::VectorXd& values() const { return values_; }
    double mean() const { return mean_; }
    bool has_known_mean() const { return known_mean_; }
    Eigen::VectorXd centered() const { return values_.array() - mean_; }

    /// First `count` observations as a new series (sample mean recomputed).
    TimeSeries head(Eigen::Index count) const;

private:
    Eigen::VectorXd values_;
    double mean_ = 0.0;
    bool known_mean_ = false;
};

struct StationarityReport {
    bool d_ok = false;
    bool ar_ok = false;
    bool ma_ok = false;
    Eigen::VectorXd ar_root_moduli;
    Eigen::VectorXd ma_root_moduli;
    /// Phi and Theta share a root (model not identifiable). Informational.
    bool common_roots = false;
    /// Phi has a repeated root. Accepted here, rejected by acvf_sowell.
    bool repeated_ar_roots = false;

    bool ok() const { return d_ok && ar_ok && ma_ok; }
};

/// True iff d lies in the open interval (-1, 0.5).
bool d_in_range(double d);

/// eta_0..eta_m of (1 - z)^{-d}; throws std::domain_error unless d in (-1, 0.5).
Eigen::VectorXd eta_coefficients(double d, Eigen::Index m);

/// psi_0..psi_m of (1 - z)^{-d} Theta(z) / Phi(z). Requires a model passing
/// check_parameters().
Eigen::VectorXd psi_coefficients(const ArfimaModel& model, Eigen::Index m);

/// pi_0..pi_m of Phi(z) (1 - z)^{d} / Theta(z), the AR(inf) weights with
/// pi * psi = 1. Requires an invertible MA part and d in (-1, 0.5).
Eigen::VectorXd pi_coefficients(const ArfimaModel& model, Eigen::Index m);

/// All complex roots of c_0 + c_1 z + ... + c_k z^k (ascending coefficients).
/// Trailing zero coefficients are dropped first; a constant polynomial has no
/// roots. Roots come from the companion-matrix eigenvalues followed by one
/// Newton step.
Eigen::VectorXcd polynomial_roots(const Eigen::Ref<const Eigen::VectorXd>& coeffs);

/// Evaluates an ascending-coefficient real polynomial at a complex point.
std::complex<double> evaluate_polynomial(const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                                         std::complex<double> z);

StationarityReport check_parameters(const ArfimaModel& model);

/// Throws std::domain_error describing the first failed condition.
void require_valid(const ArfimaModel& model, const char* context);

} // namespace afm
