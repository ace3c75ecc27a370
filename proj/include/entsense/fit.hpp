#pragma once

#include <Eigen/Dense>

#include <functional>

namespace entsense {

struct FitResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T J)^{-1} * residual variance
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Small Levenberg-Marquardt solver for curve fits with analytic Jacobians.
// `residuals` fills r(p) (length = number of data points); `jacobian` fills
// dr/dp. Damping starts at lambda0 and adapts by the usual factor-10 schedule.
FitResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd initial, int max_iterations = 200, double tolerance = 1e-12,
    double lambda0 = 1e-3);

}  // namespace entsense
