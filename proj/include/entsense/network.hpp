#pragma once

#include "entsense/gaussian_state.hpp"

namespace entsense {

enum class Scheme { separable, entangled };

// Probe configuration: M nodes, N mean photons hitting each sample, channel
// efficiency eta, and the fraction mu of the photon budget spent on squeezing.
struct SchemeParams {
  int M = 1;
  double N = 1.0;
  double eta = 1.0;
  double mu = 0.0;
  Scheme kind = Scheme::entangled;
};

struct AlphaR {
  double alpha = 0.0;
  double r = 0.0;
};

struct OpoParams {
  double f_cav = 8.0e6;   // cavity half width (HWHM), Hz
  double pump = 0.0;      // pump power, W
  double threshold = 1.0; // threshold power, W
  double eta = 1.0;
};

struct OpoSpectrumPoint {
  double s_minus = 1.0;
  double s_plus = 1.0;
};

// Inverts the photon budget N = eta (alpha^2 + sinh^2 r) / M (entangled)
// or N = eta (alpha^2 + sinh^2 r) (separable) at squeezed fraction mu.
AlphaR derive_alpha_r(const SchemeParams& params);

// Unitary of the splitter network distributing input 0 evenly over M outputs.
// M = 4 uses the three-beamsplitter network layout; the coefficient of the
// resource input is +1/sqrt(M) in every output, so all output means align on +x.
MatrixX<std::complex<double>> bsn_unitary(int n_modes);

// M-mode probe before loss and phase shifts. extra_thermal adds that many
// thermal photons to every input mode (regularization hook for Fisher-matrix
// computations; 0 for physical probes).
GaussianState build_probe_state(const SchemeParams& params, double extra_thermal = 0.0);

struct SenseOptions {
  bool loss_after_phase = false;  // assumption is loss before the samples
  double extra_thermal = 0.0;
};

// Full pipeline probe -> loss(eta) -> per-node phase shift; ready for
// homodyne p-quadrature measurement.
GaussianState sense(const SchemeParams& params, const Eigen::VectorXd& phis,
                    const SenseOptions& opts = {});

// Sideband squeezing spectrum of an OPO below threshold,
// S+-(f) = 1 +- 4 eta sqrt(P/Pth) / ((1 -+ sqrt(P/Pth))^2 + (f/f_cav)^2).
OpoSpectrumPoint opo_spectrum(const OpoParams& params, double f_hz);

}  // namespace entsense
