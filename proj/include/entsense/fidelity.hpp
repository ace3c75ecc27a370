#pragma once

#include "entsense/gaussian_state.hpp"

namespace entsense {

struct FidelitySingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uhlmann fidelity F(rho1, rho2) = [tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]^2
// between Gaussian states. Requires both states to be mixed (no symplectic
// eigenvalue at exactly 1/2); throws FidelitySingularError otherwise with
// advice to add thermal regularization. Internals run in extended precision:
// nearly pure modes give the transfer matrices a badly graded spectrum.
double gaussian_fidelity(const GaussianState& a, const GaussianState& b);

inline double gaussian_root_fidelity(const GaussianState& a, const GaussianState& b) {
  return std::sqrt(gaussian_fidelity(a, b));
}

}  // namespace entsense
