#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hom {

struct LmOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-8;
  double initial_damping = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // sigma_hat^2 (J^T J)^-1
  double cost = 0.0;           // sum of squared (weighted) residuals
  double residual_variance = 0.0;
  int iterations = 0;
};

/// Fills residuals r (size m) and Jacobian J (m x n) at params p.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jac)>;

/// Damped Gauss-Newton (Levenberg-Marquardt with diag(J^T J) scaling). Damping
/// starts at options.initial_damping, x10 after a rejected step, /10 after an
/// accepted one. Converges when the scaled step is below relative_tolerance of
/// the scaled parameter norm. Throws FitError with the best iterate after
/// max_iterations, Error on a singular normal matrix.
LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd x0,
                             std::size_t n_residuals, const LmOptions& options = {});

}  // namespace hom
