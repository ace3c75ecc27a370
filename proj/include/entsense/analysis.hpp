#pragma once

#include "entsense/spectrum.hpp"

#include <complex>
#include <vector>

// Data-reduction chain: peak decomposition of sideband spectra, phase-model
// fits yielding the small-angle sensitivity, photon accounting, and the
// wave-plate phase-control model with its calibration fits.
namespace entsense {

struct PeakDecomposition {
  double v_s = 0.0;              // volts
  double v_n = 0.0;              // volts
  double baseline_slope = 0.0;   // volts^2 per Hz over the fit band
  double baseline_intercept = 0.0;  // volts^2 at the peak frequency
  double phi_avg = 0.0;          // radians (copied from the trace label)
  bool peak_below_baseline = false;
};

struct FitBand {
  double inner_hz = 15.0e3;  // gap excluded around the peak (>= 2 bins)
  double outer_hz = 90.0e3;  // extent of the band on each side
};

// Linear baseline over the two bands flanking the peak; V_n^2 is the baseline
// value at the peak, V_s^2 the excess of the peak bin over it.
PeakDecomposition extract_peak(const SpectrumTrace& trace, double peak_hz,
                               const FitBand& band = {});

struct PhiPoint {
  double phi_avg = 0.0;  // radians
  double v_s = 0.0;
  double v_n = 0.0;
};

struct SensitivityFit {
  double k = 0.0;        // V_s amplitude, volts
  double theta1 = 0.0;   // radians
  double k_sq = 0.0;     // squeezing noise voltage
  double k_asq = 0.0;    // anti-squeezing noise voltage
  double theta2 = 0.0;   // radians
  double sigma_min = 0.0;
  double sigma_min_err = 0.0;
  double k_err = 0.0, theta1_err = 0.0;
  double k_sq_err = 0.0, k_asq_err = 0.0, theta2_err = 0.0;
  Eigen::MatrixXd cov_vs;   // (k, theta1)
  Eigen::MatrixXd cov_vn;   // (k_sq, k_asq, theta2)
  bool converged = false;
};

// Nonlinear least squares of
//   V_s(phi) = k |sin(phi + theta1)|
//   V_n(phi) = sqrt(k_sq^2 cos^2(phi + theta2) + k_asq^2 sin^2(phi + theta2))
// over points spanning both the squeezing (phi ~ 0) and anti-squeezing
// (|phi| ~ 90 deg) regions; sigma_min = V_n(0)/V_s'(0). The V_sn scale cancels
// out of sigma_min. Error propagation treats the two fits as independent.
SensitivityFit fit_vs_vn(const std::vector<PhiPoint>& points);

struct PhotonCount {
  double N_coh = 0.0;
  double N_sqz = 0.0;
  bool negative_sqz_flag = false;  // raised when N_sqz fits below zero
};

// Photon accounting from the fitted noise/signal voltages against the
// shot-noise voltage: entangled counts are per mode of the M-node network,
// separable counts are for the single probed node.
PhotonCount count_photons(const SensitivityFit& fit, double v_sn, int n_nodes, Scheme kind);

struct WaveplateResult {
  std::complex<double> j1, j2;  // output Jones field components
  double i_hd = 0.0;            // |J1|^2 - |J2|^2 for the given phi_d
  double amplitude = 0.0;       // fringe amplitude for unit fields
  double phase_deg = 0.0;       // fringe phase; 4 * theta_v for ideal plates
  double visibility = 1.0;
  double dc = 0.0;              // phase-independent offset (0 for ideal plates)
};

// Quarter-wave plate fixed at 45 deg followed by a half-wave plate at
// theta_v. Ideal retardances (pi, pi/2) give I_HD with unit visibility and a
// fringe phase moving exactly 4 deg per degree of plate rotation.
WaveplateResult waveplate_phase(double theta_v_deg, double phi_d_deg,
                                double ret_half = std::numbers::pi,
                                double ret_quarter = std::numbers::pi / 2.0);

struct ChannelSweep {
  // per plate position: the fringe samples (phi_d scan, intensity)
  std::vector<double> theta_v_deg;
  std::vector<std::vector<std::pair<double, double>>> fringes;
};

struct CalibrationFit {
  std::vector<double> k;           // degrees of phase per degree of plate
  std::vector<double> b;           // degrees
  std::vector<double> residual_rms_deg;
  double slope_avg = 0.0;
  double slope_avg_sd = 0.0;
};

// Per-channel linear fit phi_j = k_j theta_v + b_j; the fringe phase at each
// plate position comes from a linear sine fit of the scanned interference.
CalibrationFit calibrate_channels(const std::vector<ChannelSweep>& sweeps);

}  // namespace entsense
