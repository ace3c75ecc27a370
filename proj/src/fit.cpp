#include "entsense/fit.hpp"

#include <stdexcept>

namespace entsense {

FitResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd initial, int max_iterations, double tolerance, double lambda0) {
  FitResult out;
  Eigen::VectorXd p = std::move(initial);
  Eigen::VectorXd r = residuals(p);
  double chi2 = r.squaredNorm();
  double lambda = lambda0;

  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd jac = jacobian(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.lpNorm<Eigen::Infinity>() < tolerance) {
      out.converged = true;
      break;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 32; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += lambda * jtj.diagonal().array().max(1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(jtr);
      const Eigen::VectorXd candidate = p - step;
      const Eigen::VectorXd r_new = residuals(candidate);
      const double chi2_new = r_new.squaredNorm();
      if (chi2_new <= chi2) {
        const double gain = chi2 - chi2_new;
        p = candidate;
        r = r_new;
        chi2 = chi2_new;
        lambda = std::max(lambda * 0.1, 1e-14);
        stepped = true;
        if (gain < tolerance * (1.0 + chi2) && step.lpNorm<Eigen::Infinity>() < tolerance) {
          out.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (out.converged || !stepped) {
      if (!stepped) out.converged = true;  // stuck at a (local) minimum
      break;
    }
  }

  const Eigen::MatrixXd jac = jacobian(p);
  const int dof = int(r.size()) - int(p.size());
  const double s2 = dof > 0 ? chi2 / double(dof) : 0.0;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  jtj.diagonal().array() += 1e-300;
  out.covariance = jtj.ldlt().solve(Eigen::MatrixXd::Identity(p.size(), p.size())) * s2;
  out.params = p;
  out.chi2 = chi2;
  return out;
}

}  // namespace entsense
