#pragma once

#include "entsense/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

// Closed-form sensitivities of the averaged-phase estimator P_avg, optimal
// probe parameters under a fixed per-sample photon budget, and scaling laws.
namespace entsense {

struct SensitivityReport {
  double sigma = 0.0;           // radians
  double slope = 0.0;           // d<P_avg>/d phi_avg
  double noise_var = 0.0;       // <Delta P_avg^2>
  double N_coh = 0.0;           // coherent photons per sample
  double N_sqz = 0.0;           // squeezed photons per sample
  double resolvable_deg = 0.0;  // sigma in degrees
  // filled by the Monte-Carlo estimator only
  double sigma_se = 0.0;
  double slope_se = 0.0;
  bool slope_unstable = false;
};

struct OptimalPoint {
  double r_opt = 0.0;
  double alpha_opt = 0.0;
  double mu_opt = 0.0;
  double sigma_opt = 0.0;
  double lambda = 1.0;  // Lambda_M (entangled) or Lambda_1 (separable)
};

inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// sigma_s = sqrt(e^{-2r} + 1/eta - 1) / (2 alpha sqrt(M))
inline double sigma_separable(double alpha, double r, double eta, int n_nodes) {
  if (alpha <= 0.0) throw std::invalid_argument("sigma_separable: alpha must be positive (zero slope)");
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("sigma_separable: eta must be in (0,1]");
  if (n_nodes < 1) throw std::invalid_argument("sigma_separable: M must be >= 1");
  return std::sqrt(std::exp(-2.0 * r) + 1.0 / eta - 1.0) / (2.0 * alpha * std::sqrt(double(n_nodes)));
}

// M-independent by construction.
inline double sigma_entangled(double alpha, double r, double eta) {
  return sigma_separable(alpha, r, eta, 1);
}

inline double small_angle_bound(double r) {
  if (r < 0.0) throw std::invalid_argument("small_angle_bound: r must be >= 0");
  return std::exp(-2.0 * r);
}

inline double standard_quantum_limit(int n_nodes, double photons) {
  if (photons <= 0.0) throw std::invalid_argument("standard_quantum_limit: N must be positive");
  return 1.0 / (2.0 * std::sqrt(double(n_nodes) * photons));
}

// Lagrangian optimum of the photon split between displacement and squeezing.
// Uses cancellation-free forms of the Lambda expressions; eta = 1 is an exact
// analytic branch (the generic formulas are 0/0 there).
inline OptimalPoint optimal_point(int n_nodes, double photons, double eta, Scheme kind) {
  if (photons <= 0.0) throw std::invalid_argument("optimal_point: N must be positive");
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("optimal_point: eta must be in (0,1]");
  if (n_nodes < 1) throw std::invalid_argument("optimal_point: M must be >= 1");
  const double m = double(n_nodes);
  const double budget = kind == Scheme::entangled ? m * photons : photons;  // MN or N
  OptimalPoint out;
  double e2r, sinh2r, alpha2;
  if (eta >= 1.0) {
    e2r = 1.0 + 2.0 * budget;
    sinh2r = budget * budget / (1.0 + 2.0 * budget);
    alpha2 = budget - sinh2r;
    out.lambda = 1.0;
    out.sigma_opt = kind == Scheme::entangled
                        ? std::sqrt(budget / (budget + 1.0)) / (2.0 * m * photons)
                        : std::sqrt(budget / (budget + 1.0)) / (2.0 * std::sqrt(m) * photons);
  } else {
    const double u = 1.0 - eta;
    const double lambda = std::sqrt(1.0 + 4.0 * budget * u);
    out.lambda = lambda;
    e2r = 4.0 * budget / (lambda + 1.0) + 1.0;  // (lambda - eta)/(1 - eta), stable form
    sinh2r = (e2r + 1.0 / e2r - 2.0) / 4.0;
    alpha2 = budget / eta - sinh2r;
    const double num = budget * u + eta * (lambda + 1.0) / 2.0;
    const double den = 1.0 + eta / budget;
    out.sigma_opt = kind == Scheme::entangled
                        ? std::sqrt(num / den) / (2.0 * m * photons)
                        : std::sqrt(num / den) / (2.0 * std::sqrt(m) * photons);
  }
  out.r_opt = 0.5 * std::log(e2r);
  out.alpha_opt = std::sqrt(std::max(alpha2, 0.0));
  out.mu_opt = eta * sinh2r / budget;
  return out;
}

inline double optimal_sigma(int n_nodes, double photons, double eta, Scheme kind) {
  return optimal_point(n_nodes, photons, eta, kind).sigma_opt;
}

// G = sigma_s^opt / sigma_e^opt; >= 1 for all valid inputs.
inline double gain(int n_nodes, double photons, double eta) {
  return optimal_sigma(n_nodes, photons, eta, Scheme::separable) /
         optimal_sigma(n_nodes, photons, eta, Scheme::entangled);
}

// Closed-form report for a probe configuration (small-angle sensitivity).
inline SensitivityReport analytic_report(const SchemeParams& params) {
  const AlphaR ar = derive_alpha_r(params);
  SensitivityReport rep;
  rep.slope = params.kind == Scheme::entangled
                  ? std::sqrt(2.0 * params.eta / double(params.M)) * ar.alpha
                  : std::sqrt(2.0 * params.eta) * ar.alpha;
  rep.noise_var =
      (params.eta * std::exp(-2.0 * ar.r) + 1.0 - params.eta) / (2.0 * double(params.M));
  rep.sigma = params.kind == Scheme::entangled
                  ? sigma_entangled(ar.alpha, ar.r, params.eta)
                  : sigma_separable(ar.alpha, ar.r, params.eta, params.M);
  const double split = params.kind == Scheme::entangled ? double(params.M) : 1.0;
  rep.N_coh = params.eta * ar.alpha * ar.alpha / split;
  rep.N_sqz = params.eta * std::sinh(ar.r) * std::sinh(ar.r) / split;
  rep.resolvable_deg = rad_to_deg(rep.sigma);
  return rep;
}

// Same sensitivity assembled from the phase-space pipeline instead of the
// closed form: slope and variance of P_avg of the sensed state at phi = 0.
inline SensitivityReport report_from_state(const SchemeParams& params) {
  GaussianState st = sense(params, Eigen::VectorXd::Zero(params.M));
  SensitivityReport rep;
  double slope = 0.0, var = 0.0;
  for (int a = 0; a < params.M; ++a) {
    slope += st.mean(2 * a);  // d<p_a>/d phi_a at phi=0 is <x_a>
    for (int b = 0; b < params.M; ++b) var += st.cov(2 * a + 1, 2 * b + 1);
  }
  rep.slope = slope / double(params.M);
  rep.noise_var = var / double(params.M * params.M);
  if (rep.slope == 0.0) throw std::invalid_argument("report_from_state: zero slope (alpha = 0)");
  rep.sigma = std::sqrt(rep.noise_var) / std::abs(rep.slope);
  rep.resolvable_deg = rad_to_deg(rep.sigma);
  const AlphaR ar = derive_alpha_r(params);
  const double split = params.kind == Scheme::entangled ? double(params.M) : 1.0;
  rep.N_coh = params.eta * ar.alpha * ar.alpha / split;
  rep.N_sqz = params.eta * std::sinh(ar.r) * std::sinh(ar.r) / split;
  return rep;
}

}  // namespace entsense
