#include "entsense/network.hpp"

#include <cmath>

namespace entsense {

AlphaR derive_alpha_r(const SchemeParams& params) {
  if (params.M < 1) throw std::invalid_argument("derive_alpha_r: M must be >= 1");
  if (params.N < 0) throw std::invalid_argument("derive_alpha_r: N must be >= 0");
  if (params.eta <= 0.0 || params.eta > 1.0)
    throw std::invalid_argument("derive_alpha_r: eta must be in (0,1]");
  if (params.mu < 0.0 || params.mu > 1.0)
    throw std::invalid_argument("derive_alpha_r: mu must be in [0,1]");
  const double resource = params.kind == Scheme::entangled ? params.M * params.N : params.N;
  const double sinh2r = params.mu * resource / params.eta;
  const double alpha2 = resource / params.eta - sinh2r;
  if (alpha2 < -1e-12)
    throw std::invalid_argument("derive_alpha_r: inconsistent mu/N/eta (negative alpha^2)");
  return {std::sqrt(std::max(alpha2, 0.0)), std::asinh(std::sqrt(sinh2r))};
}

MatrixX<std::complex<double>> bsn_unitary(int n_modes) {
  using C = std::complex<double>;
  if (n_modes < 1) throw std::invalid_argument("bsn_unitary: need at least one mode");
  MatrixX<C> u(n_modes, n_modes);
  if (n_modes == 1) {
    u(0, 0) = C(1, 0);
    return u;
  }
  if (n_modes == 4) {
    const double s2 = std::sqrt(2.0);
    const C i(0, 1);
    u << C(0.5), 0.5 * s2 * i, C(0), -0.5 * i,
         C(0.5), -0.5 * s2 * i, C(0), -0.5 * i,
         C(0.5), C(0), 0.5 * s2 * i, 0.5 * i,
         C(0.5), C(0), -0.5 * s2 * i, 0.5 * i;
    return u;
  }
  // Householder reflection taking e_0 to (1,...,1)/sqrt(M); real orthogonal.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_modes, 1.0 / std::sqrt(double(n_modes)));
  w(0) -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n_modes, n_modes);
  if (w.squaredNorm() > 0) h -= 2.0 / w.squaredNorm() * (w * w.transpose());
  return h.cast<C>();
}

GaussianState build_probe_state(const SchemeParams& params, double extra_thermal) {
  const AlphaR ar = derive_alpha_r(params);
  if (params.kind == Scheme::separable) {
    GaussianState probe = squeeze_displace(ar.alpha, ar.r);
    probe.cov.diagonal().array() += extra_thermal;
    GaussianState out = probe;
    for (int m = 1; m < params.M; ++m) out = tensor(out, probe);
    return out;
  }
  GaussianState resource = squeeze_displace(ar.alpha, ar.r);
  resource.cov.diagonal().array() += extra_thermal;
  if (params.M == 1) return resource;
  GaussianState in = tensor(resource, thermal_state<double>(params.M - 1, extra_thermal));
  const auto s = symplectic_from_unitary<double>(bsn_unitary(params.M));
  return apply(SymplecticOp{s, Eigen::VectorXd()}, in);
}

GaussianState sense(const SchemeParams& params, const Eigen::VectorXd& phis,
                    const SenseOptions& opts) {
  if (phis.size() != params.M)
    throw std::invalid_argument("sense: need one phase per node");
  GaussianState st = build_probe_state(params, opts.extra_thermal);
  if (!opts.loss_after_phase) st = apply_loss(st, params.eta);
  for (int m = 0; m < params.M; ++m) st = phase_shift(st, phis(m), m);
  if (opts.loss_after_phase) st = apply_loss(st, params.eta);
  return st;
}

OpoSpectrumPoint opo_spectrum(const OpoParams& params, double f_hz) {
  if (params.f_cav <= 0) throw std::invalid_argument("opo_spectrum: f_cav must be positive");
  if (params.pump < 0 || params.pump >= params.threshold)
    throw std::invalid_argument("opo_spectrum: pump power must satisfy 0 <= P < P_th");
  const double x = std::sqrt(params.pump / params.threshold);
  const double f2 = (f_hz / params.f_cav) * (f_hz / params.f_cav);
  OpoSpectrumPoint out;
  out.s_minus = 1.0 - 4.0 * params.eta * x / ((1.0 + x) * (1.0 + x) + f2);
  out.s_plus = 1.0 + 4.0 * params.eta * x / ((1.0 - x) * (1.0 - x) + f2);
  return out;
}

}  // namespace entsense
