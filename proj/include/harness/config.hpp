#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "harness/initialdata.hpp"
#include "harness/kernel.hpp"
#include "harness/noise.hpp"

namespace harness {

// {"d": int, "support": [{"offset": [ints], "prob": float}], "M": optional}
KernelSpec kernel_spec_from_json(const nlohmann::json& j);
nlohmann::json kernel_spec_to_json(const KernelSpec& spec);

// {"family": str, "variance": float, "p": optional}
NoiseModel noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& model);

// {"variant": "iid"|"ma"|"pi0"|"flat", ...}; pi0 draws its kernel and noise
// from the surrounding experiment.
InitialIncrementLaw initial_law_from_json(const nlohmann::json& j, const KernelAnalysis& analysis,
                                          const NoiseModel& noise);

std::string format_double(double v);

}  // namespace harness
