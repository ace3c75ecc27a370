#include "entsense/sampling.hpp"

#include <Eigen/Cholesky>

namespace entsense {
namespace {

constexpr int kLaneSize = 1 << 14;

Eigen::MatrixXd p_block(const GaussianState& st) {
  Eigen::MatrixXd block(st.n_modes, st.n_modes);
  for (int i = 0; i < st.n_modes; ++i)
    for (int j = 0; j < st.n_modes; ++j) block(i, j) = st.cov(2 * i + 1, 2 * j + 1);
  return block;
}

}  // namespace

ShotRecord sample_homodyne(const GaussianState& state, int shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_homodyne: need at least one shot");
  const int m = state.n_modes;
  Eigen::VectorXd mean(m);
  for (int i = 0; i < m; ++i) mean(i) = state.mean(2 * i + 1);
  Eigen::MatrixXd cov = p_block(state);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    // semidefinite p-block (e.g. ideal squeezing limits); nudge the diagonal
    cov.diagonal().array() += 1e-12;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("sample_homodyne: p-quadrature covariance not positive semidefinite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  ShotRecord rec;
  rec.seed = seed;
  rec.samples.resize(shots, m);
  const int lanes = (shots + kLaneSize - 1) / kLaneSize;
  for (int lane = 0; lane < lanes; ++lane) {
    std::uint64_t lane_state = seed ^ (0xa0761d6478bd642fULL * std::uint64_t(lane + 1));
    NormalStream normal(splitmix64(lane_state));
    const int row0 = lane * kLaneSize;
    const int rows = std::min(kLaneSize, shots - row0);
    Eigen::VectorXd z(m);
    for (int k = 0; k < rows; ++k) {
      for (int j = 0; j < m; ++j) z(j) = normal();
      rec.samples.row(row0 + k) = (mean + chol * z).transpose();
    }
  }
  return rec;
}

SensitivityReport empirical_sensitivity(const SchemeParams& params, const EmpiricalOptions& opts) {
  if (opts.shots < 2) throw std::invalid_argument("empirical_sensitivity: need at least two shots");
  const AlphaR ar = derive_alpha_r(params);
  if (opts.d_phi <= 0.0 || opts.d_phi > small_angle_bound(ar.r) / 10.0)
    throw std::invalid_argument(
        "empirical_sensitivity: d_phi must be positive and within small_angle_bound/10");

  auto mean_and_var = [&](double phi, std::uint64_t seed) {
    const GaussianState st = sense(params, Eigen::VectorXd::Constant(params.M, phi));
    const ShotRecord rec = sample_homodyne(st, opts.shots, seed);
    const Eigen::VectorXd p_avg = rec.samples.rowwise().mean();
    const double mean = p_avg.mean();
    const double var = (p_avg.array() - mean).square().sum() / double(opts.shots - 1);
    return std::pair<double, double>(mean, var);
  };

  std::uint64_t root = opts.seed;
  const std::uint64_t seed_lo = splitmix64(root);
  const std::uint64_t seed_mid = splitmix64(root);
  const std::uint64_t seed_hi = splitmix64(root);
  const auto [mean_lo, var_lo] = mean_and_var(opts.phi0 - opts.d_phi, seed_lo);
  const auto [mean_mid, var_mid] = mean_and_var(opts.phi0, seed_mid);
  const auto [mean_hi, var_hi] = mean_and_var(opts.phi0 + opts.d_phi, seed_hi);

  SensitivityReport rep;
  rep.slope = (mean_hi - mean_lo) / (2.0 * opts.d_phi);
  rep.noise_var = var_mid;
  rep.slope_se = std::sqrt((var_hi + var_lo) / double(opts.shots)) / (2.0 * opts.d_phi);
  rep.slope_unstable = std::abs(rep.slope) < 10.0 * rep.slope_se;
  if (rep.slope == 0.0) throw std::runtime_error("empirical_sensitivity: zero slope estimate");
  rep.sigma = std::sqrt(rep.noise_var) / std::abs(rep.slope);
  rep.resolvable_deg = rad_to_deg(rep.sigma);
  const double var_se = rep.noise_var * std::sqrt(2.0 / double(opts.shots - 1));
  rep.sigma_se = rep.sigma * std::sqrt(var_se * var_se / (4.0 * rep.noise_var * rep.noise_var) +
                                       rep.slope_se * rep.slope_se / (rep.slope * rep.slope));
  const double split = params.kind == Scheme::entangled ? double(params.M) : 1.0;
  rep.N_coh = params.eta * ar.alpha * ar.alpha / split;
  rep.N_sqz = params.eta * std::sinh(ar.r) * std::sinh(ar.r) / split;
  return rep;
}

}  // namespace entsense
