#include "harness/initialdata.hpp"

#include <cmath>

namespace harness {

InitialIncrementLaw InitialIncrementLaw::iid(NoiseModel innovation, double mu0) {
  validate_noise(innovation);
  InitialIncrementLaw law;
  law.variant_ = InitialVariant::Iid;
  law.innovation_ = innovation;
  law.mu0_ = mu0;
  return law;
}

InitialIncrementLaw InitialIncrementLaw::moving_average(std::vector<double> coeffs,
                                                        NoiseModel innovation, double mu0) {
  validate_noise(innovation);
  if (coeffs.empty()) throw ConfigError("moving average needs at least one coefficient");
  InitialIncrementLaw law;
  law.variant_ = InitialVariant::MovingAverage;
  law.innovation_ = innovation;
  law.coeffs_ = std::move(coeffs);
  law.mu0_ = mu0;
  return law;
}

InitialIncrementLaw InitialIncrementLaw::pi0(std::shared_ptr<const StationarySampler> sampler) {
  if (!sampler) throw ConfigError("null sampler");
  InitialIncrementLaw law;
  law.variant_ = InitialVariant::Pi0;
  law.pi0_ = std::move(sampler);
  law.mu0_ = 0.0;
  return law;
}

InitialIncrementLaw InitialIncrementLaw::flat(double mu0) {
  InitialIncrementLaw law;
  law.variant_ = InitialVariant::Flat;
  law.mu0_ = mu0;
  return law;
}

double InitialIncrementLaw::sigma0_sq() const {
  switch (variant_) {
    case InitialVariant::Iid:
      return innovation_.variance;
    case InitialVariant::MovingAverage: {
      double s = 0.0;
      for (double c : coeffs_) s += c * c;
      return innovation_.variance * s;
    }
    case InitialVariant::Pi0:
      return 2.0 * pi0_->noise().variance * pi0_->analysis().potential_a(1);
    case InitialVariant::Flat:
      return 0.0;
  }
  return 0.0;
}

double InitialIncrementLaw::rho0() const {
  switch (variant_) {
    case InitialVariant::Iid:
      return innovation_.variance;
    case InitialVariant::MovingAverage: {
      double s = 0.0;
      for (double c : coeffs_) s += c;
      return innovation_.variance * s * s;
    }
    case InitialVariant::Pi0:
      return pi0_->noise().variance / pi0_->analysis().sigma1sq();
    case InitialVariant::Flat:
      return 0.0;
  }
  return 0.0;
}

MixingCertificate InitialIncrementLaw::mixing_certificate() const {
  MixingCertificate cert;
  switch (variant_) {
    case InitialVariant::Iid:
      cert.note = "independent: alpha(j) = 0 for j >= 1";
      break;
    case InitialVariant::MovingAverage:
      cert.note = "finite moving average: alpha(j) = 0 beyond the order, both series finite";
      break;
    case InitialVariant::Flat:
      cert.note = "deterministic";
      break;
    case InitialVariant::Pi0:
      if (pi0_->noise().family == NoiseFamily::Gaussian) {
        cert.note = "stationary Gaussian law: mixing coefficients decay faster than any polynomial";
      } else {
        cert.thm_fd = MixingCertificate::State::Unknown;
        cert.thm_tight = MixingCertificate::State::Unknown;
        cert.note = "mixing rate of the non-Gaussian stationary law is not characterized";
      }
      break;
  }
  return cert;
}

IncrementField InitialIncrementLaw::sample_eta(int lo, int hi, std::uint64_t seed,
                                               std::uint32_t replica) const {
  if (hi < lo) throw ConfigError("empty window");
  Box box{Site{lo}, Site{hi}};
  switch (variant_) {
    case InitialVariant::Iid: {
      IncrementField eta = make_increment_field(box, 1, 0);
      for (int x = lo; x <= hi; ++x)
        eta.comp[static_cast<size_t>(x - lo)] =
            mu0_ + sample_noise(innovation_, seed, replica, NoiseLane::Innovation, 0, x);
      return eta;
    }
    case InitialVariant::MovingAverage: {
      IncrementField eta = make_increment_field(box, 1, 0);
      const int m = static_cast<int>(coeffs_.size()) - 1;
      std::vector<double> z(static_cast<size_t>(hi - lo + 1 + m));
      for (int y = lo - m; y <= hi; ++y)
        z[static_cast<size_t>(y - lo + m)] =
            sample_noise(innovation_, seed, replica, NoiseLane::Innovation, 0, y);
      for (int x = lo; x <= hi; ++x) {
        double acc = mu0_;
        for (int j = 0; j <= m; ++j)
          acc += coeffs_[static_cast<size_t>(j)] * z[static_cast<size_t>(x - j - lo + m)];
        eta.comp[static_cast<size_t>(x - lo)] = acc;
      }
      return eta;
    }
    case InitialVariant::Pi0:
      return pi0_->sample(lo, hi, seed, replica);
    case InitialVariant::Flat:
      return make_increment_field(box, 1, 0, mu0_);
  }
  throw ConfigError("unreachable");
}

std::pair<IncrementField, HeightField> InitialIncrementLaw::sample_initial(
    int lo, int hi, std::uint64_t seed, std::uint32_t replica) const {
  if (lo > 1 || hi < 0) throw WindowTooSmall("window must reach the normalization site 0");
  IncrementField eta = sample_eta(lo, hi, seed, replica);
  HeightField h = increments_to_height(eta, 0, 0.0);
  return {std::move(eta), std::move(h)};
}

}  // namespace harness
