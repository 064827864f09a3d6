#pragma once

#include "afm/model.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace afm {

/// Asymptotic information of the Whittle/ML estimator of (d, phi, theta)
///   info = 1/(4 pi) * integral_{-pi}^{pi} grad log f grad log f^T d lambda
/// and its inverse.
struct CovarianceMatrix {
    Eigen::MatrixXd info;
    Eigen::MatrixXd cov;
    std::vector<std::string> order;
};

struct FisherOptions {
    /// Relative stopping tolerance of the tanh-sinh quadrature.
    double tolerance = 1e-12;
};

/// Gradient of log f(lambda) in (d, phi_1..phi_p, theta_1..theta_q) for lambda in (0, pi]:
///   d:       -log(2 (1 - cos lambda))
///   phi_l:   2 sum_{j=0}^{p} a_j cos((l - j) lambda) / |Phi(e^{i lambda})|^2,  a_0 = 1, a_j = -phi_j
///   theta_l: 2 sum_{j=0}^{q} b_j cos((l - j) lambda) / |Theta(e^{i lambda})|^2, b_0 = 1, b_j = theta_j
Eigen::VectorXd grad_log_spectrum(const ArfimaModel& model, double lambda);

/// Requires a valid model whose AR/MA roots all have modulus >= 1 + 1e-3.
/// Throws numerical_error (naming the parameter block) when the information
/// matrix is not positive definite.
CovarianceMatrix fisher_matrix(const ArfimaModel& model, const FisherOptions& options = {});

/// SE_i = sqrt(cov_ii / n).
Eigen::VectorXd exact_stderr(const ArfimaModel& model, Eigen::Index n);
Eigen::VectorXd exact_stderr(const CovarianceMatrix& matrix, Eigen::Index n);

} // namespace afm
