#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "harness/invariant.hpp"
#include "harness/noise.hpp"
#include "harness/process.hpp"

namespace harness {

enum class InitialVariant { Iid, MovingAverage, Pi0, Flat };

struct MixingCertificate {
  enum class State { Yes, Unknown };
  State thm_fd = State::Yes;     // finite-dimensional convergence hypotheses
  State thm_tight = State::Yes;  // process-level hypotheses
  std::string note;
};

// Initial increment laws: (a) i.i.d., (b) finite moving average (strongly
// mixing with alpha(n) = 0 beyond the order), (c) the stationary law via the
// series sampler, and the deterministic flat slope. Each carries analytic
// mu0, sigma0^2 and rho0 = sum_x Cov(eta(0), eta(x)).
class InitialIncrementLaw {
 public:
  static InitialIncrementLaw iid(NoiseModel innovation, double mu0);
  static InitialIncrementLaw moving_average(std::vector<double> coeffs, NoiseModel innovation,
                                            double mu0);
  static InitialIncrementLaw pi0(std::shared_ptr<const StationarySampler> sampler);
  static InitialIncrementLaw flat(double mu0);

  InitialVariant variant() const { return variant_; }
  double mu0() const { return mu0_; }
  double sigma0_sq() const;
  double rho0() const;
  MixingCertificate mixing_certificate() const;

  IncrementField sample_eta(int lo, int hi, std::uint64_t seed, std::uint32_t replica) const;

  // (eta0, h0) with h0(0) = 0; h0 lives on [lo-1, hi].
  std::pair<IncrementField, HeightField> sample_initial(int lo, int hi, std::uint64_t seed,
                                                        std::uint32_t replica) const;

 private:
  InitialVariant variant_ = InitialVariant::Flat;
  double mu0_ = 0.0;
  NoiseModel innovation_{};
  std::vector<double> coeffs_;
  std::shared_ptr<const StationarySampler> pi0_;
};

}  // namespace harness
