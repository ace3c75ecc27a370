#pragma once

#include "entsense/network.hpp"
#include "entsense/sensitivity.hpp"

#include <cstdint>
#include <random>

namespace entsense {

// Homodyne p-quadrature outcomes: K shots x M modes.
struct ShotRecord {
  Eigen::MatrixXd samples;
  Eigen::VectorXd phi_true;
  std::uint64_t seed = 0;
};

// splitmix64; used to derive independent per-lane substreams from one seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic standard-normal stream: mt19937_64 (standardized output
// sequence) plus an explicit Box-Muller transform, so results do not depend
// on the standard library's normal_distribution implementation.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return std::ldexp(double(engine_() >> 11), -53); }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Draws K rows from the normal law of the p quadratures of `state`.
// Deterministic given the seed; organized in fixed-size lanes with
// seed-derived substreams so shot generation can be distributed without
// changing the output.
ShotRecord sample_homodyne(const GaussianState& state, int shots, std::uint64_t seed);

struct EmpiricalOptions {
  double phi0 = 0.0;
  double d_phi = 1e-2;
  int shots = 100000;
  std::uint64_t seed = 1;
};

// Monte-Carlo sensitivity: slope of mean(P_avg) by central difference at
// phi0 +- d_phi, noise from the sample variance at phi0, standard error by
// the delta method.
SensitivityReport empirical_sensitivity(const SchemeParams& params, const EmpiricalOptions& opts);

}  // namespace entsense
