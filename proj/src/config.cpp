#include "harness/config.hpp"

#include <cstdio>

namespace harness {

using nlohmann::json;

KernelSpec kernel_spec_from_json(const json& j) {
  KernelSpec spec;
  try {
    spec.d = j.at("d").get<int>();
    for (const auto& atom : j.at("support")) {
      KernelAtom a;
      a.offset = atom.at("offset").get<std::vector<int>>();
      a.prob = atom.at("prob").get<double>();
      spec.support.push_back(std::move(a));
    }
    if (j.contains("M")) spec.declared_range = j.at("M").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed kernel spec: ") + e.what());
  }
  return spec;
}

json kernel_spec_to_json(const KernelSpec& spec) {
  json j;
  j["d"] = spec.d;
  j["support"] = json::array();
  for (const auto& a : spec.support) j["support"].push_back({{"offset", a.offset}, {"prob", a.prob}});
  if (spec.declared_range) j["M"] = *spec.declared_range;
  return j;
}

NoiseModel noise_from_json(const json& j) {
  NoiseModel model;
  try {
    model.family = noise_family_from_string(j.at("family").get<std::string>());
    model.variance = j.at("variance").get<double>();
    if (j.contains("p")) model.two_point_p = j.at("p").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed noise spec: ") + e.what());
  }
  validate_noise(model);
  return model;
}

json noise_to_json(const NoiseModel& model) {
  json j;
  j["family"] = to_string(model.family);
  j["variance"] = model.variance;
  if (model.family == NoiseFamily::TwoPointAsymmetric) j["p"] = model.two_point_p;
  return j;
}

InitialIncrementLaw initial_law_from_json(const json& j, const KernelAnalysis& analysis,
                                          const NoiseModel& noise) {
  std::string variant;
  try {
    variant = j.at("variant").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed initial law: ") + e.what());
  }
  if (variant == "flat") return InitialIncrementLaw::flat(j.value("mu0", 0.0));
  if (variant == "iid") {
    NoiseModel innov = j.contains("family") ? noise_from_json(j) : noise;
    return InitialIncrementLaw::iid(innov, j.value("mu0", 0.0));
  }
  if (variant == "ma") {
    NoiseModel innov = j.contains("family") ? noise_from_json(j) : noise;
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    return InitialIncrementLaw::moving_average(std::move(coeffs), innov, j.value("mu0", 0.0));
  }
  if (variant == "pi0") {
    StationarySamplerConfig cfg;
    cfg.depth = j.value("depth", cfg.depth);
    cfg.gaussian_closure = j.value("closure", cfg.gaussian_closure);
    auto sampler = std::make_shared<StationarySampler>(analysis, noise, cfg);
    return InitialIncrementLaw::pi0(std::move(sampler));
  }
  throw ConfigError("unknown initial-law variant: " + variant);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace harness
