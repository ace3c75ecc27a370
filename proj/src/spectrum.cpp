#include "entsense/spectrum.hpp"

#include "entsense/sampling.hpp"

#include <cmath>

namespace entsense {

SignalNoiseSplit spectrum_ground_truth(const SchemeParams& params, double phi_avg,
                                       const SpectrumModel& model) {
  const AlphaR ar = derive_alpha_r(params);
  const double v_sq2 = params.eta * std::exp(-2.0 * ar.r) + 1.0 - params.eta;
  const double v_asq2 = params.eta * std::exp(2.0 * ar.r) + 1.0 - params.eta;
  const double cs = std::cos(phi_avg + model.theta2);
  const double sn = std::sin(phi_avg + model.theta2);
  SignalNoiseSplit out;
  out.v_s = 2.0 * model.v_sn * std::sqrt(params.eta) * ar.alpha *
            std::abs(std::sin(phi_avg + model.theta1));
  out.v_n = model.v_sn * std::sqrt(v_sq2 * cs * cs + v_asq2 * sn * sn);
  return out;
}

SpectrumTrace synthesize_spectrum(const SchemeParams& params, double phi_avg, int n_averages,
                                  std::uint64_t seed, const SpectrumModel& model) {
  if (n_averages < 1) throw std::invalid_argument("synthesize_spectrum: n_averages must be >= 1");
  if (model.df_hz <= 0 || model.f_max_hz <= model.f_min_hz)
    throw std::invalid_argument("synthesize_spectrum: bad frequency grid");
  const SignalNoiseSplit truth = spectrum_ground_truth(params, phi_avg, model);
  const double baseline = truth.v_n * truth.v_n;
  const double peak = truth.v_s * truth.v_s + baseline;
  const double rel_scatter = 1.0 / std::sqrt(double(n_averages));

  SpectrumTrace trace;
  trace.v_sn = model.v_sn;
  trace.phi_avg = phi_avg;
  trace.n_averages = n_averages;
  trace.seed = seed;
  std::uint64_t state = seed;
  NormalStream normal(splitmix64(state));
  const int bins = int(std::round((model.f_max_hz - model.f_min_hz) / model.df_hz)) + 1;
  trace.freqs_hz.reserve(bins);
  trace.psd.reserve(bins);
  for (int k = 0; k < bins; ++k) {
    const double f = model.f_min_hz + k * model.df_hz;
    const bool is_peak = std::abs(f - model.f_peak_hz) < 0.5 * model.df_hz;
    const double level = is_peak ? peak : baseline;
    trace.freqs_hz.push_back(f);
    trace.psd.push_back(std::max(level * (1.0 + rel_scatter * normal()), 0.0));
  }
  return trace;
}

}  // namespace entsense
