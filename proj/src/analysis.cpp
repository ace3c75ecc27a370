#include "entsense/analysis.hpp"

#include "entsense/fit.hpp"
#include "entsense/sensitivity.hpp"

#include <algorithm>
#include <cmath>

namespace entsense {
namespace {

using Cplx = std::complex<double>;

Eigen::Matrix2cd waveplate_jones(double theta_rad, double retardance) {
  const double half = retardance / 2.0;
  const Cplx diag_re(std::cos(half), 0.0);
  const Cplx im_part(0.0, std::sin(half));
  Eigen::Matrix2cd m;
  m(0, 0) = diag_re + im_part * std::cos(2.0 * theta_rad);
  m(0, 1) = im_part * std::sin(2.0 * theta_rad);
  m(1, 0) = m(0, 1);
  m(1, 1) = diag_re - im_part * std::cos(2.0 * theta_rad);
  return m;
}

double wrap_deg(double x) {
  while (x > 180.0) x -= 360.0;
  while (x <= -180.0) x += 360.0;
  return x;
}

}  // namespace

PeakDecomposition extract_peak(const SpectrumTrace& trace, double peak_hz, const FitBand& band) {
  const int bins = int(trace.freqs_hz.size());
  if (bins < 5 || trace.psd.size() != trace.freqs_hz.size())
    throw std::invalid_argument("extract_peak: malformed trace");
  int peak_idx = 0;
  double best = std::abs(trace.freqs_hz[0] - peak_hz);
  for (int k = 1; k < bins; ++k) {
    const double d = std::abs(trace.freqs_hz[k] - peak_hz);
    if (d < best) {
      best = d;
      peak_idx = k;
    }
  }
  if (peak_idx == 0 || peak_idx == bins - 1)
    throw std::invalid_argument("extract_peak: peak frequency not inside the trace");
  if (band.outer_hz <= band.inner_hz)
    throw std::invalid_argument("extract_peak: fit band is empty");

  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n_lo = 0, n_hi = 0;
  for (int k = 0; k < bins; ++k) {
    const double df = trace.freqs_hz[k] - trace.freqs_hz[peak_idx];
    if (std::abs(df) <= band.inner_hz || std::abs(df) > band.outer_hz) continue;
    (df < 0 ? n_lo : n_hi)++;
    sw += 1.0;
    sx += df;
    sy += trace.psd[k];
    sxx += df * df;
    sxy += df * trace.psd[k];
  }
  if (n_lo == 0 || n_hi == 0)
    throw std::invalid_argument("extract_peak: fit band empty on one side of the peak");
  const double det = sw * sxx - sx * sx;
  PeakDecomposition out;
  out.baseline_slope = (sw * sxy - sx * sy) / det;
  out.baseline_intercept = (sxx * sy - sx * sxy) / det;
  out.phi_avg = trace.phi_avg;
  if (out.baseline_intercept <= 0.0)
    throw std::runtime_error("extract_peak: fitted baseline not positive at the peak");
  out.v_n = std::sqrt(out.baseline_intercept);
  const double excess = trace.psd[peak_idx] - out.baseline_intercept;
  if (excess < 0.0) {
    out.peak_below_baseline = true;
    out.v_s = 0.0;
  } else {
    out.v_s = std::sqrt(excess);
  }
  return out;
}

SensitivityFit fit_vs_vn(const std::vector<PhiPoint>& points) {
  if (points.size() < 4) throw std::invalid_argument("fit_vs_vn: need at least 4 points");
  int near_sq = 0, near_asq = 0;
  for (const auto& p : points) (std::abs(p.phi_avg) < deg_to_rad(45.0) ? near_sq : near_asq)++;
  if (near_sq < 2 || near_asq < 2)
    throw std::invalid_argument(
        "fit_vs_vn: points must span both the squeezing and anti-squeezing regions");
  {
    const double first = points.front().phi_avg;
    bool all_equal = true;
    for (const auto& p : points) all_equal = all_equal && p.phi_avg == first;
    if (all_equal) throw std::invalid_argument("fit_vs_vn: degenerate design (all phi equal)");
  }
  const int n = int(points.size());

  // V_s fit: parameters (k, theta1); positive-phase branch of |sin|
  auto vs_res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i)
      r(i) = p(0) * std::abs(std::sin(points[i].phi_avg + p(1))) - points[i].v_s;
    return r;
  };
  auto vs_jac = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd jac(n, 2);
    for (int i = 0; i < n; ++i) {
      const double arg = points[i].phi_avg + p(1);
      const double sgn = std::sin(arg) >= 0.0 ? 1.0 : -1.0;
      jac(i, 0) = std::abs(std::sin(arg));
      jac(i, 1) = p(0) * sgn * std::cos(arg);
    }
    return jac;
  };
  double k0 = 0.0;
  for (const auto& p : points) k0 = std::max(k0, p.v_s);
  Eigen::VectorXd p_vs(2);
  p_vs << k0, 0.0;
  const FitResult fit_vs = levenberg_marquardt(vs_res, vs_jac, p_vs);

  // V_n fit: parameters (k_sq, k_asq, theta2)
  auto vn_model = [&](double phi, const Eigen::VectorXd& p) {
    const double c = std::cos(phi + p(2)), s = std::sin(phi + p(2));
    return std::sqrt(p(0) * p(0) * c * c + p(1) * p(1) * s * s);
  };
  auto vn_res = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r(i) = vn_model(points[i].phi_avg, p) - points[i].v_n;
    return r;
  };
  auto vn_jac = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd jac(n, 3);
    for (int i = 0; i < n; ++i) {
      const double c = std::cos(points[i].phi_avg + p(2)), s = std::sin(points[i].phi_avg + p(2));
      const double m = std::max(vn_model(points[i].phi_avg, p), 1e-300);
      jac(i, 0) = p(0) * c * c / m;
      jac(i, 1) = p(1) * s * s / m;
      jac(i, 2) = (p(1) * p(1) - p(0) * p(0)) * s * c / m;
    }
    return jac;
  };
  double vn_min = points[0].v_n, vn_max = points[0].v_n;
  for (const auto& p : points) {
    vn_min = std::min(vn_min, p.v_n);
    vn_max = std::max(vn_max, p.v_n);
  }
  Eigen::VectorXd p_vn(3);
  p_vn << vn_min, vn_max, 0.0;
  const FitResult fit_vn = levenberg_marquardt(vn_res, vn_jac, p_vn);

  if (!fit_vs.converged || !fit_vn.converged)
    throw std::runtime_error("fit_vs_vn: least-squares did not converge within iteration budget");

  SensitivityFit out;
  out.k = std::abs(fit_vs.params(0));
  out.theta1 = fit_vs.params(1);
  out.k_sq = std::abs(fit_vn.params(0));
  out.k_asq = std::abs(fit_vn.params(1));
  out.theta2 = fit_vn.params(2);
  out.cov_vs = fit_vs.covariance;
  out.cov_vn = fit_vn.covariance;
  out.k_err = std::sqrt(std::max(fit_vs.covariance(0, 0), 0.0));
  out.theta1_err = std::sqrt(std::max(fit_vs.covariance(1, 1), 0.0));
  out.k_sq_err = std::sqrt(std::max(fit_vn.covariance(0, 0), 0.0));
  out.k_asq_err = std::sqrt(std::max(fit_vn.covariance(1, 1), 0.0));
  out.theta2_err = std::sqrt(std::max(fit_vn.covariance(2, 2), 0.0));
  out.converged = true;

  const double c2 = std::cos(out.theta2), s2 = std::sin(out.theta2);
  const double vn0 = std::sqrt(out.k_sq * out.k_sq * c2 * c2 + out.k_asq * out.k_asq * s2 * s2);
  const double slope0 = out.k * std::cos(out.theta1);
  if (slope0 == 0.0) throw std::runtime_error("fit_vs_vn: vanishing signal slope at phi = 0");
  out.sigma_min = vn0 / slope0;

  // independent-fit error propagation of sigma_min
  Eigen::VectorXd g_vn(3), g_vs(2);
  g_vn << out.k_sq * c2 * c2 / (vn0 * slope0), out.k_asq * s2 * s2 / (vn0 * slope0),
      (out.k_asq * out.k_asq - out.k_sq * out.k_sq) * s2 * c2 / (vn0 * slope0);
  g_vs << -out.sigma_min / out.k, out.sigma_min * std::tan(out.theta1);
  out.sigma_min_err = std::sqrt(g_vn.dot(out.cov_vn * g_vn) + g_vs.dot(out.cov_vs * g_vs));
  return out;
}

PhotonCount count_photons(const SensitivityFit& fit, double v_sn, int n_nodes, Scheme kind) {
  if (v_sn <= 0.0) throw std::invalid_argument("count_photons: V_sn must be positive");
  const double c2 = std::cos(fit.theta2), s2 = std::sin(fit.theta2);
  const double vn0_sq = fit.k_sq * fit.k_sq * c2 * c2 + fit.k_asq * fit.k_asq * s2 * s2;
  const double vn90_sq = fit.k_sq * fit.k_sq * s2 * s2 + fit.k_asq * fit.k_asq * c2 * c2;
  const double vs90 = fit.k * std::cos(fit.theta1);
  const double split = kind == Scheme::entangled ? double(n_nodes) : 1.0;
  PhotonCount out;
  out.N_sqz = ((vn0_sq + vn90_sq) / (v_sn * v_sn) - 2.0) / (4.0 * split);
  out.N_coh = vs90 * vs90 / (4.0 * v_sn * v_sn * split);
  out.negative_sqz_flag = out.N_sqz < -0.01;
  return out;
}

WaveplateResult waveplate_phase(double theta_v_deg, double phi_d_deg, double ret_half,
                                double ret_quarter) {
  const Eigen::Matrix2cd m = waveplate_jones(deg_to_rad(theta_v_deg), ret_half) *
                             waveplate_jones(deg_to_rad(45.0), ret_quarter);
  const Eigen::Vector2cd lo = m.col(0);  // unit local-oscillator field, p polarization
  const Eigen::Vector2cd sp = m.col(1);  // unit probe field, s polarization
  const Cplx z = lo(0) * std::conj(sp(0)) - lo(1) * std::conj(sp(1));

  WaveplateResult out;
  const double phi_d = deg_to_rad(phi_d_deg);
  const Cplx rot = std::exp(Cplx(0.0, -phi_d));
  out.j1 = lo(0) + sp(0) * rot;
  out.j2 = lo(1) + sp(1) * rot;
  out.i_hd = std::norm(out.j1) - std::norm(out.j2);
  out.amplitude = 2.0 * std::abs(z);
  out.dc = std::norm(lo(0)) - std::norm(lo(1)) + std::norm(sp(0)) - std::norm(sp(1));
  out.phase_deg = rad_to_deg(std::arg(z)) + 90.0;
  const double denom = std::abs(lo(0) * std::conj(sp(0))) + std::abs(lo(1) * std::conj(sp(1)));
  out.visibility = denom > 0.0 ? std::abs(z) / denom : 0.0;
  return out;
}

CalibrationFit calibrate_channels(const std::vector<ChannelSweep>& sweeps) {
  CalibrationFit out;
  for (const auto& sweep : sweeps) {
    const int n = int(sweep.theta_v_deg.size());
    if (n < 3 || sweep.fringes.size() != sweep.theta_v_deg.size())
      throw std::invalid_argument("calibrate_channels: need >= 3 sweep points per channel");
    std::vector<double> phases(n);
    for (int t = 0; t < n; ++t) {
      const auto& fringe = sweep.fringes[t];
      if (fringe.size() < 3)
        throw std::invalid_argument("calibrate_channels: need >= 3 fringe samples");
      // I(phi) = dc + a sin(phi) + b cos(phi), fringe phase = atan2(b, a)
      Eigen::MatrixXd design(fringe.size(), 3);
      Eigen::VectorXd y(fringe.size());
      for (size_t s = 0; s < fringe.size(); ++s) {
        const double phi = deg_to_rad(fringe[s].first);
        design(s, 0) = std::sin(phi);
        design(s, 1) = std::cos(phi);
        design(s, 2) = 1.0;
        y(s) = fringe[s].second;
      }
      const Eigen::VectorXd coef =
          design.colPivHouseholderQr().solve(y);
      if (std::hypot(coef(0), coef(1)) < 1e-12)
        throw std::invalid_argument("calibrate_channels: fringe has no phase information");
      phases[t] = rad_to_deg(std::atan2(coef(1), coef(0)));
      if (t > 0) phases[t] = phases[t - 1] + wrap_deg(phases[t] - phases[t - 1]);
    }
    double sw = n, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int t = 0; t < n; ++t) {
      sx += sweep.theta_v_deg[t];
      sy += phases[t];
      sxx += sweep.theta_v_deg[t] * sweep.theta_v_deg[t];
      sxy += sweep.theta_v_deg[t] * phases[t];
    }
    const double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-12)
      throw std::invalid_argument("calibrate_channels: rank-deficient sweep (plate never moved)");
    const double slope = (sw * sxy - sx * sy) / det;
    const double offset = (sxx * sy - sx * sxy) / det;
    double rss = 0.0;
    for (int t = 0; t < n; ++t) {
      const double r = phases[t] - (slope * sweep.theta_v_deg[t] + offset);
      rss += r * r;
    }
    out.k.push_back(slope);
    out.b.push_back(wrap_deg(offset));
    out.residual_rms_deg.push_back(std::sqrt(rss / n));
  }
  const int channels = int(out.k.size());
  if (channels > 0) {
    double mean = 0.0;
    for (double k : out.k) mean += k;
    mean /= channels;
    double var = 0.0;
    for (double k : out.k) var += (k - mean) * (k - mean);
    out.slope_avg = mean;
    out.slope_avg_sd = channels > 1 ? std::sqrt(var / (channels - 1)) : 0.0;
  }
  return out;
}

}  // namespace entsense
