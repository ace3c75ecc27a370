#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Phase-space representation of multimode Gaussian states.
//
// Conventions used throughout:
//   * quadrature ordering (x1, p1, x2, p2, ..., xn, pn)
//   * [x, p] = i, vacuum variance 1/2 per quadrature
//   * shot-noise units (vacuum variance = 1) appear only at I/O boundaries
namespace entsense {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct GaussianStateT {
  int n_modes = 0;
  VectorX<Scalar> mean;  // length 2n
  MatrixX<Scalar> cov;   // 2n x 2n, symmetric

  GaussianStateT() = default;
  GaussianStateT(int n, VectorX<Scalar> m, MatrixX<Scalar> c)
      : n_modes(n), mean(std::move(m)), cov(std::move(c)) {
    if (n < 1) throw std::invalid_argument("GaussianState: need at least one mode");
    if (mean.size() != 2 * n || cov.rows() != 2 * n || cov.cols() != 2 * n)
      throw std::invalid_argument("GaussianState: dimension mismatch");
  }
};

using GaussianState = GaussianStateT<double>;

// Symplectic (plus displacement) map acting on quadratures: z -> S z + d.
template <class Scalar>
struct SymplecticOpT {
  MatrixX<Scalar> matrix;
  VectorX<Scalar> displacement;
};

using SymplecticOp = SymplecticOpT<double>;

template <class Scalar>
MatrixX<Scalar> symplectic_form(int n_modes) {
  MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    omega(2 * k, 2 * k + 1) = Scalar(1);
    omega(2 * k + 1, 2 * k) = Scalar(-1);
  }
  return omega;
}

inline Eigen::MatrixXd symplectic_form(int n_modes) { return symplectic_form<double>(n_modes); }

template <class Scalar>
bool is_symplectic(const MatrixX<Scalar>& s, double tol = 1e-10) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
  const auto omega = symplectic_form<Scalar>(static_cast<int>(s.rows() / 2));
  return ((s * omega * s.transpose() - omega).template lpNorm<Eigen::Infinity>() <= tol);
}

template <class Scalar>
GaussianStateT<Scalar> vacuum_state(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("vacuum_state: n_modes must be >= 1");
  return {n_modes, VectorX<Scalar>::Zero(2 * n_modes),
          MatrixX<Scalar>::Identity(2 * n_modes, 2 * n_modes) * Scalar(0.5)};
}

inline GaussianState vacuum(int n_modes) { return vacuum_state<double>(n_modes); }

template <class Scalar>
GaussianStateT<Scalar> thermal_state(int n_modes, Scalar mean_photons) {
  if (mean_photons < Scalar(0)) throw std::invalid_argument("thermal_state: negative photon number");
  auto st = vacuum_state<Scalar>(n_modes);
  st.cov.diagonal().array() += mean_photons;
  return st;
}

// D(alpha) S(r) |0>, alpha real: mean (sqrt(2) alpha, 0),
// cov diag(e^{2r}/2, e^{-2r}/2). r > 0 squeezes the phase quadrature.
template <class Scalar>
GaussianStateT<Scalar> squeeze_displace_state(Scalar alpha, Scalar r) {
  VectorX<Scalar> mean(2);
  mean << std::sqrt(Scalar(2)) * alpha, Scalar(0);
  MatrixX<Scalar> cov = MatrixX<Scalar>::Zero(2, 2);
  cov(0, 0) = std::exp(Scalar(2) * r) / Scalar(2);
  cov(1, 1) = std::exp(Scalar(-2) * r) / Scalar(2);
  return {1, std::move(mean), std::move(cov)};
}

inline GaussianState squeeze_displace(double alpha, double r) {
  return squeeze_displace_state<double>(alpha, r);
}

template <class Scalar>
GaussianStateT<Scalar> tensor(const GaussianStateT<Scalar>& a, const GaussianStateT<Scalar>& b) {
  const int n = a.n_modes + b.n_modes;
  VectorX<Scalar> mean(2 * n);
  mean << a.mean, b.mean;
  MatrixX<Scalar> cov = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  cov.topLeftCorner(2 * a.n_modes, 2 * a.n_modes) = a.cov;
  cov.bottomRightCorner(2 * b.n_modes, 2 * b.n_modes) = b.cov;
  return {n, std::move(mean), std::move(cov)};
}

// State of a subset of modes (partial trace over the rest).
template <class Scalar>
GaussianStateT<Scalar> reduced(const GaussianStateT<Scalar>& st, const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("reduced: empty mode set");
  const int n = static_cast<int>(modes.size());
  VectorX<Scalar> mean(2 * n);
  MatrixX<Scalar> cov(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    if (modes[i] < 0 || modes[i] >= st.n_modes) throw std::invalid_argument("reduced: bad mode index");
    mean.template segment<2>(2 * i) = st.mean.template segment<2>(2 * modes[i]);
    for (int j = 0; j < n; ++j)
      cov.template block<2, 2>(2 * i, 2 * j) = st.cov.template block<2, 2>(2 * modes[i], 2 * modes[j]);
  }
  return {n, std::move(mean), std::move(cov)};
}

template <class Scalar>
GaussianStateT<Scalar> apply(const SymplecticOpT<Scalar>& op, const GaussianStateT<Scalar>& st) {
  GaussianStateT<Scalar> out = st;
  out.mean = op.matrix * st.mean;
  if (op.displacement.size() > 0) out.mean += op.displacement;
  out.cov = op.matrix * st.cov * op.matrix.transpose();
  return out;
}

// Pure-loss channel on the selected modes: sqrt(eta) signal mixed with vacuum.
template <class Scalar>
GaussianStateT<Scalar> apply_loss(const GaussianStateT<Scalar>& st, Scalar eta,
                                  const std::vector<int>& modes) {
  if (eta < Scalar(0) || eta > Scalar(1)) throw std::invalid_argument("apply_loss: eta outside [0,1]");
  GaussianStateT<Scalar> out = st;
  const Scalar root = std::sqrt(eta);
  for (int m : modes) {
    if (m < 0 || m >= st.n_modes) throw std::invalid_argument("apply_loss: bad mode index");
    out.mean.template segment<2>(2 * m) *= root;
  }
  for (int a : modes)
    for (int b = 0; b < st.n_modes; ++b) {
      out.cov.template block<2, 2>(2 * a, 2 * b) *= root;
      out.cov.template block<2, 2>(2 * b, 2 * a) *= root;
    }
  // the diagonal blocks of the selected modes have picked up eta overall
  for (int m : modes)
    out.cov.template block<2, 2>(2 * m, 2 * m).diagonal().array() += (Scalar(1) - eta) * Scalar(0.5);
  return out;
}

template <class Scalar>
GaussianStateT<Scalar> apply_loss(const GaussianStateT<Scalar>& st, Scalar eta) {
  std::vector<int> all(st.n_modes);
  for (int i = 0; i < st.n_modes; ++i) all[i] = i;
  return apply_loss(st, eta, all);
}

// Rotation x -> x cos(phi) - p sin(phi), p -> x sin(phi) + p cos(phi) of one mode.
template <class Scalar>
GaussianStateT<Scalar> phase_shift(const GaussianStateT<Scalar>& st, Scalar phi, int mode) {
  if (mode < 0 || mode >= st.n_modes) throw std::invalid_argument("phase_shift: bad mode index");
  GaussianStateT<Scalar> out = st;
  Eigen::Matrix<Scalar, 2, 2> rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  out.mean.template segment<2>(2 * mode) = rot * st.mean.template segment<2>(2 * mode);
  for (int b = 0; b < st.n_modes; ++b) {
    out.cov.template block<2, 2>(2 * mode, 2 * b) = rot * out.cov.template block<2, 2>(2 * mode, 2 * b);
    out.cov.template block<2, 2>(2 * b, 2 * mode) =
        out.cov.template block<2, 2>(2 * b, 2 * mode) * rot.transpose();
  }
  return out;
}

// Two-mode beamsplitter with the real orthogonal convention:
//   z_i -> sqrt(t) z_i + sqrt(1-t) z_j,  z_j -> -sqrt(1-t) z_i + sqrt(t) z_j
template <class Scalar>
GaussianStateT<Scalar> beamsplitter(const GaussianStateT<Scalar>& st, int i, int j, Scalar transmittance) {
  if (i == j) throw std::invalid_argument("beamsplitter: need two distinct modes");
  if (i < 0 || i >= st.n_modes || j < 0 || j >= st.n_modes)
    throw std::invalid_argument("beamsplitter: bad mode index");
  if (transmittance < Scalar(0) || transmittance > Scalar(1))
    throw std::invalid_argument("beamsplitter: transmittance outside [0,1]");
  const Scalar t = std::sqrt(transmittance);
  const Scalar s = std::sqrt(Scalar(1) - transmittance);
  MatrixX<Scalar> bs = MatrixX<Scalar>::Identity(2 * st.n_modes, 2 * st.n_modes);
  bs(2 * i, 2 * i) = t;
  bs(2 * i + 1, 2 * i + 1) = t;
  bs(2 * j, 2 * j) = t;
  bs(2 * j + 1, 2 * j + 1) = t;
  bs(2 * i, 2 * j) = s;
  bs(2 * i + 1, 2 * j + 1) = s;
  bs(2 * j, 2 * i) = -s;
  bs(2 * j + 1, 2 * i + 1) = -s;
  return apply(SymplecticOpT<Scalar>{std::move(bs), VectorX<Scalar>()}, st);
}

// Symplectic matrix of a passive linear-optical network b = U a.
// A complex entry u acts on (x,p) as [[Re u, -Im u], [Im u, Re u]].
template <class Scalar>
MatrixX<Scalar> symplectic_from_unitary(const MatrixX<std::complex<Scalar>>& u) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw std::invalid_argument("symplectic_from_unitary: square matrix required");
  MatrixX<Scalar> s(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Scalar re = u(i, j).real(), im = u(i, j).imag();
      s(2 * i, 2 * j) = re;
      s(2 * i, 2 * j + 1) = -im;
      s(2 * i + 1, 2 * j) = im;
      s(2 * i + 1, 2 * j + 1) = re;
    }
  return s;
}

// Symplectic spectrum of a covariance matrix: |eig(i Omega cov)|, deduplicated
// from the +/- pairs, ascending. Physical states have all values >= 1/2.
template <class Scalar>
VectorX<Scalar> symplectic_eigenvalues(const MatrixX<Scalar>& cov, double pair_tol = 1e-9) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0)
    throw std::invalid_argument("symplectic_eigenvalues: even-dimensional square matrix required");
  if ((cov - cov.transpose()).template lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + cov.norm()))
    throw std::invalid_argument("symplectic_eigenvalues: matrix not symmetric");
  const int n = static_cast<int>(cov.rows() / 2);
  Eigen::EigenSolver<MatrixX<Scalar>> solver(symplectic_form<Scalar>(n) * cov, false);
  VectorX<Scalar> mags = solver.eigenvalues().cwiseAbs();
  std::sort(mags.data(), mags.data() + mags.size());
  VectorX<Scalar> out(n);
  for (int k = 0; k < n; ++k) {
    const Scalar a = mags(2 * k), b = mags(2 * k + 1);
    if (std::abs(a - b) > pair_tol * (Scalar(1) + std::abs(a)))
      throw std::runtime_error("symplectic_eigenvalues: +/- pairing failed");
    out(k) = (a + b) / Scalar(2);
  }
  return out;
}

// Partial transpose on a subset of modes: sign flip of their p quadratures.
template <class Scalar>
MatrixX<Scalar> partial_transpose(const MatrixX<Scalar>& cov, const std::vector<int>& modes) {
  MatrixX<Scalar> flip = MatrixX<Scalar>::Identity(cov.rows(), cov.cols());
  for (int m : modes) {
    if (2 * m + 1 >= cov.rows() || m < 0) throw std::invalid_argument("partial_transpose: bad mode index");
    flip(2 * m + 1, 2 * m + 1) = Scalar(-1);
  }
  return flip * cov * flip;
}

// Logarithmic negativity across the cut (partition | rest): sum of -ln(2 nu)
// over symplectic eigenvalues nu < 1/2 of the partially transposed covariance.
template <class Scalar>
Scalar logarithmic_negativity(const GaussianStateT<Scalar>& st, const std::vector<int>& partition) {
  if (partition.empty() || static_cast<int>(partition.size()) >= st.n_modes)
    throw std::invalid_argument("logarithmic_negativity: partition must be a nonempty proper subset");
  const auto nu = symplectic_eigenvalues<Scalar>(partial_transpose(st.cov, partition));
  Scalar total = Scalar(0);
  for (int k = 0; k < nu.size(); ++k)
    if (Scalar(2) * nu(k) < Scalar(1)) total -= std::log(Scalar(2) * nu(k));
  return total;
}

// Mean photon number of one mode: (<dx^2> + <dp^2> - 1)/2 + (<x>^2 + <p>^2)/2.
template <class Scalar>
Scalar photon_number(const GaussianStateT<Scalar>& st, int mode) {
  if (mode < 0 || mode >= st.n_modes) throw std::invalid_argument("photon_number: bad mode index");
  const Scalar var = st.cov(2 * mode, 2 * mode) + st.cov(2 * mode + 1, 2 * mode + 1);
  const Scalar disp = st.mean.template segment<2>(2 * mode).squaredNorm();
  return (var - Scalar(1)) / Scalar(2) + disp / Scalar(2);
}

template <class Scalar>
Scalar photon_number(const GaussianStateT<Scalar>& st) {
  Scalar total = Scalar(0);
  for (int m = 0; m < st.n_modes; ++m) total += photon_number(st, m);
  return total;
}

// Unit conversion: vacuum variance 1/2 (internal) <-> 1 (shot-noise units).
template <class Scalar>
MatrixX<Scalar> to_shot_noise_units(const MatrixX<Scalar>& cov_half) {
  return Scalar(2) * cov_half;
}

template <class Scalar>
MatrixX<Scalar> from_shot_noise_units(const MatrixX<Scalar>& cov_snu) {
  return cov_snu / Scalar(2);
}

// Symmetry and uncertainty-relation check; throws on violation.
template <class Scalar>
void validate(const GaussianStateT<Scalar>& st, double eig_tol = 1e-9) {
  if ((st.cov - st.cov.transpose()).template lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + st.cov.norm()))
    throw std::runtime_error("GaussianState: covariance not symmetric");
  const auto nu = symplectic_eigenvalues<Scalar>(st.cov);
  if (nu.minCoeff() < Scalar(0.5) - Scalar(eig_tol))
    throw std::runtime_error("GaussianState: uncertainty relation violated");
}

}  // namespace entsense
