#include "hom/least_squares.hpp"

#include <cmath>
#include <vector>

#include "hom/error.hpp"

namespace hom {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Column scaling so the normal matrix has a unit diagonal.
Eigen::VectorXd column_scale(const Eigen::MatrixXd& normal) {
  Eigen::VectorXd d = normal.diagonal();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (!(d[j] > 0.0) || !std::isfinite(d[j])) throw Error("singular normal matrix");
    d[j] = 1.0 / std::sqrt(d[j]);
  }
  return d;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd x,
                             std::size_t n_residuals, const LmOptions& options) {
  const auto n = x.size();
  const auto m = static_cast<Eigen::Index>(n_residuals);
  if (m < n) throw Error("fewer residuals than parameters");
  Eigen::VectorXd r(m), r_try(m);
  Eigen::MatrixXd jac(m, n), jac_try(m, n);
  fn(x, r, jac);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw Error("non-finite residuals at the initial guess");

  double lambda = options.initial_damping;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    const Eigen::VectorXd scale = column_scale(normal);
    // Solve in scaled coordinates: (S A S + lambda I) y = -S g, delta = S y.
    Eigen::MatrixXd scaled = scale.asDiagonal() * normal * scale.asDiagonal();
    scaled.diagonal().array() += lambda;
    const Eigen::VectorXd y = scaled.ldlt().solve(-(scale.asDiagonal() * grad));
    const Eigen::VectorXd delta = scale.asDiagonal() * y;
    if (!delta.allFinite()) {
      lambda *= 10.0;
      continue;
    }
    const Eigen::VectorXd x_try = x + delta;
    fn(x_try, r_try, jac_try);
    const double cost_try = r_try.squaredNorm();
    if (std::isfinite(cost_try) && cost_try <= cost) {
      const double drop = cost - cost_try;
      const Eigen::VectorXd scaled_x = scale.cwiseInverse().cwiseProduct(x);
      x = x_try;
      r.swap(r_try);
      jac.swap(jac_try);
      cost = cost_try;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (y.norm() <= options.relative_tolerance * (scaled_x.norm() + options.relative_tolerance) ||
          drop <= 1e-15 * cost)
        converged = true;
    } else {
      lambda *= 10.0;
      // No descent direction left at any damping: a stationary point.
      if (lambda > 1e12) converged = true;
    }
  }
  if (!converged) throw FitError("least squares did not converge", to_std(x));

  LmResult out;
  out.params = x;
  out.cost = cost;
  out.iterations = iter;
  const auto dof = static_cast<double>(m - n);
  out.residual_variance = dof > 0 ? cost / dof : 0.0;
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  const Eigen::VectorXd scale = column_scale(normal);
  const Eigen::MatrixXd scaled = scale.asDiagonal() * normal * scale.asDiagonal();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
  if (!lu.isInvertible()) throw Error("singular normal matrix");
  out.covariance = out.residual_variance * (scale.asDiagonal() * lu.inverse() * scale.asDiagonal());
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

}  // namespace hom
