#pragma once

#include "entsense/network.hpp"

#include <Eigen/Dense>

// Quantum Fisher information and Cramer-Rao bounds for Gaussian probes.
// Normalization: for a coherent probe at unit efficiency F = 4 alpha^2, so the
// single-parameter bound 1/sqrt(F) is the quadrature-rotation QCRB and the
// coherent-probe bound coincides with the standard quantum limit.
namespace entsense {

struct SingleModeQfi {
  double F_sm = 0.0;
  double N_th = 0.0;     // Williamson thermal occupation of the lossy probe
  double r_prime = 0.0;  // effective squeezing parameter of the lossy probe
};

struct QfimResult {
  Eigen::MatrixXd F;                     // M x M, per-node phase parameters
  double qcrb_avg = 0.0;                 // w^T F^{-1} w with w = (1/M,...,1/M)
  double regularization_epsilon = 0.0;
  double d_phi = 0.0;
};

struct QcrbOrdering {
  double sigma_cr_coh = 0.0;
  double sigma_s_opt = 0.0;
  double sigma_e_opt = 0.0;
  double sigma_cr_sep = 0.0;
  double sigma_cr_ent = 0.0;
  double mu_cr_sep = 0.0;   // squeezed fraction optimizing the separable bound
  double mu_cr_ent = 0.0;
  bool coh_gt_s = false;    // sigma_cr_coh > sigma_s_opt
  bool s_gt_e = false;      // sigma_s_opt  > sigma_e_opt
  bool e_gt_sep = false;    // sigma_e_opt  > sigma_cr_sep
  bool sep_gt_ent = false;  // sigma_cr_sep > sigma_cr_ent
  bool all_hold() const { return coh_gt_s && s_gt_e && e_gt_sep && sep_gt_ent; }
};

struct QfimOptions {
  double d_phi = 1e-3;     // finite-difference step, radians
  double epsilon = 1e-6;   // thermal photons added to each initially-pure input
};

// QFI of a single squeezed-displaced probe (resource amplitude alpha,
// squeezing r) sent through a channel of efficiency eta, for a phase rotation
// of the output mode.
SingleModeQfi qfi_single_mode(double alpha, double r, double eta);

// Single-parameter bound for M independent repetitions: 1/sqrt(M F).
double qcrb_single(double fisher_information, int repetitions);

// Quantum Fisher information matrix of the family phi -> sense(params, phi)
// around phi = 0, via central finite differences of the Uhlmann fidelity.
// Off-diagonals by the polarization identity. Initially-pure inputs carry
// `epsilon` thermal photons so the fidelity stays regular.
QfimResult qfim_gaussian(const SchemeParams& params, const QfimOptions& opts = {});

// The five bounds at a fixed per-sample budget (N, eta, M), each optimized
// over the squeezed-photon fraction, with the pairwise ordering flags.
QcrbOrdering qcrb_ordering_report(double photons, double eta, int n_nodes,
                                  const QfimOptions& opts = {});

}  // namespace entsense
