#include "harness/noise.hpp"

#include <cmath>

namespace harness {

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::Gaussian;
  if (name == "rademacher-scaled") return NoiseFamily::RademacherScaled;
  if (name == "uniform-centered") return NoiseFamily::UniformCentered;
  if (name == "two-point-asymmetric") return NoiseFamily::TwoPointAsymmetric;
  throw ConfigError("unknown noise family: " + name);
}

const char* to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::RademacherScaled: return "rademacher-scaled";
    case NoiseFamily::UniformCentered: return "uniform-centered";
    case NoiseFamily::TwoPointAsymmetric: return "two-point-asymmetric";
  }
  return "unknown";
}

void validate_noise(const NoiseModel& model) {
  if (!(model.variance > 0.0)) throw ConfigError("noise variance must be positive");
  if (model.family == NoiseFamily::TwoPointAsymmetric &&
      !(model.two_point_p > 0.0 && model.two_point_p < 1.0))
    throw ConfigError("two-point probability must lie in (0,1)");
}

double sample_noise(const NoiseModel& model, std::uint64_t seed, std::uint32_t replica,
                    NoiseLane lane, long t, int x0, int x1, int x2) {
  StreamKey stream{seed, replica, lane};
  philox::Block b = draw_block(stream, t, x0, x1, x2);
  const std::uint64_t u64 = to_u64(b.w[0], b.w[1]);
  const double sigma = std::sqrt(model.variance);
  switch (model.family) {
    case NoiseFamily::Gaussian:
      return sigma * inverse_normal_cdf(to_unit(u64));
    case NoiseFamily::RademacherScaled:
      return (u64 >> 63) ? sigma : -sigma;
    case NoiseFamily::UniformCentered:
      return sigma * std::sqrt(3.0) * (2.0 * to_unit(u64) - 1.0);
    case NoiseFamily::TwoPointAsymmetric: {
      const double p = model.two_point_p;
      const double hi = sigma * std::sqrt((1.0 - p) / p);
      const double lo = -sigma * std::sqrt(p / (1.0 - p));
      return to_unit(u64) < p ? hi : lo;
    }
  }
  return 0.0;
}

double moment(const NoiseModel& model, int order) {
  if (order < 2 || order > 12 || order % 2 != 0)
    throw UnsupportedOrder("moment order must be even and within 2..12");
  const int half = order / 2;
  const double v = model.variance;
  switch (model.family) {
    case NoiseFamily::Gaussian: {
      // (order-1)!! * sigma^order
      static const double dfact[7] = {0, 1, 3, 15, 105, 945, 10395};
      return dfact[half] * std::pow(v, half);
    }
    case NoiseFamily::RademacherScaled:
      return std::pow(v, half);
    case NoiseFamily::UniformCentered:
      // E X^{2m} = a^{2m}/(2m+1), a = sigma*sqrt(3)
      return std::pow(3.0 * v, half) / (order + 1);
    case NoiseFamily::TwoPointAsymmetric: {
      const double p = model.two_point_p;
      const double sigma = std::sqrt(v);
      const double hi = sigma * std::sqrt((1.0 - p) / p);
      const double lo = -sigma * std::sqrt(p / (1.0 - p));
      return p * std::pow(hi, order) + (1.0 - p) * std::pow(lo, order);
    }
  }
  return 0.0;
}

double standard_normal(std::uint64_t seed, std::uint32_t replica, NoiseLane lane, long t, int x0) {
  StreamKey stream{seed, replica, lane};
  philox::Block b = draw_block(stream, t, x0, 0, 0);
  return inverse_normal_cdf(to_unit(to_u64(b.w[0], b.w[1])));
}

}  // namespace harness
