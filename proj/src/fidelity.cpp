#include "entsense/fidelity.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>

namespace entsense {
namespace {

using Real = long double;
using Cplx = std::complex<Real>;
using MatC = MatrixX<Cplx>;

// Cayley transfer matrix E = (2V + i Omega)(2V - i Omega)^{-1}. Its spectrum
// {lambda, 1/lambda} encodes the Gibbs decomposition of the state; a pure mode
// sends one eigenvalue to infinity, hence the mixedness requirement.
MatC transfer_matrix(const MatrixX<Real>& cov) {
  const int dim = static_cast<int>(cov.rows());
  MatC i_omega = MatC::Zero(dim, dim);
  for (int k = 0; k < dim / 2; ++k) {
    i_omega(2 * k, 2 * k + 1) = Cplx(0, 1);
    i_omega(2 * k + 1, 2 * k) = Cplx(0, -1);
  }
  MatC plus = 2.0L * cov.cast<Cplx>() + i_omega;
  MatC minus_t = (2.0L * cov.cast<Cplx>() - i_omega).transpose();
  Eigen::PartialPivLU<MatC> lu(minus_t);
  const Real abs_det = std::abs(lu.determinant());
  if (!std::isfinite(double(abs_det)) || abs_det < 1e-30L)
    throw FidelitySingularError(
        "gaussian_fidelity: state is pure or nearly pure; add thermal regularization "
        "(raise epsilon) to make the covariance strictly above the vacuum limit");
  // E^T = minus^{-T} plus^T
  return lu.solve(plus.transpose()).transpose();
}

Real abs_det(const MatC& m) {
  Eigen::PartialPivLU<MatC> lu(m);
  return std::abs(lu.determinant());
}

}  // namespace

double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
  if (a.n_modes != b.n_modes)
    throw std::invalid_argument("gaussian_fidelity: states must have the same mode count");
  const int n = a.n_modes;
  const int dim = 2 * n;
  const MatrixX<Real> cov_a = a.cov.cast<Real>();
  const MatrixX<Real> cov_b = b.cov.cast<Real>();

  const MatC e_prod = transfer_matrix(cov_a) * transfer_matrix(cov_b);
  Eigen::ComplexEigenSolver<MatC> solver(e_prod, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gaussian_fidelity: eigenvalue computation failed");
  std::vector<Cplx> evals(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
  // spectrum comes in (mu, 1/mu) pairs; keep the well-conditioned large half
  std::sort(evals.begin(), evals.end(),
            [](const Cplx& x, const Cplx& y) { return std::abs(x) > std::abs(y); });
  Real denom = 1.0L;
  for (int k = 0; k < n; ++k) {
    const Cplx root = std::sqrt(evals[k]);
    denom *= std::abs(root + 1.0L / root - 2.0L);
  }

  MatC half_omega = MatC::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    half_omega(2 * k, 2 * k + 1) = Cplx(0, 0.5L);
    half_omega(2 * k + 1, 2 * k) = Cplx(0, -0.5L);
  }
  const Real det_a = abs_det(cov_a.cast<Cplx>() - half_omega);
  const Real det_b = abs_det(cov_b.cast<Cplx>() - half_omega);
  const Real f0 = 1.0L / (std::sqrt(det_a * det_b) * denom);

  const VectorX<Real> delta = (a.mean - b.mean).cast<Real>();
  const MatrixX<Real> cov_sum = cov_a + cov_b;
  const VectorX<Real> solved = cov_sum.ldlt().solve(delta);
  const Real quad = delta.dot(solved);

  const Real fid = f0 * std::exp(-quad / 2.0L);
  if (!std::isfinite(double(fid)) || fid < 0.0L)
    throw std::runtime_error("gaussian_fidelity: non-finite result");
  return double(std::min(fid, Real(1)));
}

}  // namespace entsense
