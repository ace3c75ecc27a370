#pragma once

#include "entsense/analysis.hpp"
#include "entsense/gaussian_state.hpp"
#include "entsense/network.hpp"
#include "entsense/spectrum.hpp"

#include <string>

namespace entsense {

inline constexpr int kSchemaVersion = 1;

struct CovarianceFile {
  Eigen::MatrixXd cov;
  int n_modes = 0;
  bool shot_noise_units = false;
};

// Row-major CSV with the header line `# n_modes=<n> units=<half|snu>`.
void write_covariance_csv(const std::string& path, const Eigen::MatrixXd& cov_half, int n_modes,
                          bool as_shot_noise_units);
CovarianceFile read_covariance_csv(const std::string& path);

// Mean vector as a single CSV row.
void write_mean_csv(const std::string& path, const Eigen::VectorXd& mean);
Eigen::VectorXd read_mean_csv(const std::string& path);

// `freq_hz,psd` rows preceded by `# key=value` comments carrying v_sn,
// phi_avg_rad, n_averages, seed and the schema version.
void write_spectrum_csv(const std::string& path, const SpectrumTrace& trace);
SpectrumTrace read_spectrum_csv(const std::string& path);

// Flat key=value scheme configuration (keys: scheme, M, N, eta, mu, phis;
// phis is a comma-separated list of radians, defaulting to zeros).
struct SchemeConfig {
  SchemeParams params;
  Eigen::VectorXd phis;
};
SchemeConfig parse_scheme_config(const std::string& path);

// JSON analysis report (sigma_min, fitted model parameters, photon counts,
// and their uncertainties).
std::string analysis_report_json(const SensitivityFit& fit, const PhotonCount& photons,
                                 double v_sn, int n_nodes, Scheme kind);

}  // namespace entsense
