#pragma once

#include "entsense/network.hpp"

#include <cstdint>
#include <vector>

namespace entsense {

// Frequency-binned power spectral density of the averaged homodyne voltage.
// For the entangled scheme the recorded channel is the normalized joint
// quadrature sum(p_j)/sqrt(M); for the separable scheme a single node. The
// shot-noise level of the trace is V_sn^2.
struct SpectrumTrace {
  std::vector<double> freqs_hz;
  std::vector<double> psd;        // volts^2, arbitrary gain
  double v_sn = 1.0;              // shot-noise reference voltage
  double phi_avg = 0.0;           // radians, label of the run
  int n_averages = 1;
  std::uint64_t seed = 0;
};

struct SpectrumModel {
  double f_peak_hz = 3.0e6;   // modulation sideband; occupies exactly one bin
  double f_min_hz = 2.8e6;
  double f_max_hz = 3.2e6;
  double df_hz = 5.0e3;       // FFT resolution
  double v_sn = 1.0;
  double theta1 = 0.0;        // residual amplitude-modulation offset, radians
  double theta2 = 0.0;        // phase-lock offset of the noise quadratures, radians
};

struct SignalNoiseSplit {
  double v_s = 0.0;
  double v_n = 0.0;
};

// Model values V_s = 2 V_sn sqrt(eta) alpha |sin(phi+theta1)| and
// V_n = V_sn sqrt(v_sq^2 cos^2(phi+theta2) + v_asq^2 sin^2(phi+theta2)).
SignalNoiseSplit spectrum_ground_truth(const SchemeParams& params, double phi_avg,
                                       const SpectrumModel& model);

// Synthesized averaged-periodogram trace: baseline bins at V_n^2, the peak bin
// additionally carrying V_s^2, both with multiplicative Gaussian fluctuations
// of relative scale 1/sqrt(n_averages), clipped at zero.
SpectrumTrace synthesize_spectrum(const SchemeParams& params, double phi_avg, int n_averages,
                                  std::uint64_t seed, const SpectrumModel& model = {});

}  // namespace entsense
