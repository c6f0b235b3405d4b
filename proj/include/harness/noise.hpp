#pragma once

#include <cstdint>
#include <string>

#include "harness/errors.hpp"
#include "harness/lattice.hpp"
#include "harness/rng.hpp"

namespace harness {

enum class NoiseFamily {
  Gaussian,
  RademacherScaled,
  UniformCentered,
  TwoPointAsymmetric,
};

NoiseFamily noise_family_from_string(const std::string& name);
const char* to_string(NoiseFamily f);

// Mean-zero driving noise with exact moments of every order. All listed
// families have moments of every order, so the 4th/12th-moment hypotheses of
// the fluctuation experiments are satisfied by construction; moment() is the
// closed form used by tests and estimators.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::Gaussian;
  double variance = 1.0;
  double two_point_p = 0.2;  // probability of the positive atom

  static NoiseModel gaussian(double var) { return NoiseModel{NoiseFamily::Gaussian, var, 0.2}; }
  static NoiseModel rademacher(double var) {
    return NoiseModel{NoiseFamily::RademacherScaled, var, 0.2};
  }
  static NoiseModel uniform(double var) { return NoiseModel{NoiseFamily::UniformCentered, var, 0.2}; }
  static NoiseModel two_point(double var, double p) {
    return NoiseModel{NoiseFamily::TwoPointAsymmetric, var, p};
  }
};

void validate_noise(const NoiseModel& model);

// Deterministic value for a fixed (seed, t, x, replica, lane); distinct keys
// are independent streams.
double sample_noise(const NoiseModel& model, std::uint64_t seed, std::uint32_t replica,
                    NoiseLane lane, long t, int x0, int x1 = 0, int x2 = 0);

inline double sample_noise_at(const NoiseModel& model, std::uint64_t seed, std::uint32_t replica,
                              NoiseLane lane, long t, const Site& x) {
  int x1 = x.size() > 1 ? x[1] : 0;
  int x2 = x.size() > 2 ? x[2] : 0;
  return sample_noise(model, seed, replica, lane, t, x[0], x1, x2);
}

// Exact central moment of even order <= 12.
double moment(const NoiseModel& model, int order);

// Standard normal draw for a key; used by the Gaussian tail closure.
double standard_normal(std::uint64_t seed, std::uint32_t replica, NoiseLane lane, long t, int x0);

}  // namespace harness
