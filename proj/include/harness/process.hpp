#pragma once

#include <cstdint>
#include <vector>

#include "harness/kernel.hpp"
#include "harness/lattice.hpp"
#include "harness/noise.hpp"

namespace harness {

// Height configurations are plain dense fields with a time stamp.
using HeightField = GridField;

// Nearest-neighbour increments eta(x-e_i, x), one value per direction per
// site. Component i is stored contiguously.
struct IncrementField {
  Box box;
  int dims = 1;
  std::vector<double> comp;
  long t = 0;

  double at(int dir, const Site& x) const {
    return comp[static_cast<size_t>(dir) * static_cast<size_t>(box.volume()) +
                static_cast<size_t>(box.flatten(x))];
  }
  double& at(int dir, const Site& x) {
    return comp[static_cast<size_t>(dir) * static_cast<size_t>(box.volume()) +
                static_cast<size_t>(box.flatten(x))];
  }
};

IncrementField make_increment_field(Box box, int dims, long t = 0, double fill = 0.0);

// Window needed at the start so that every value on `eval` after `steps`
// exact updates equals its infinite-lattice counterpart.
Box cone_window(const KernelAnalysis& analysis, const Box& eval, long steps);

// One exact update h_{t+1}(x) = sum_z p(z) h_t(x+z) + xi_{t+1}(x), computed on
// the largest window the input supports (erosion by the kernel support).
HeightField evolve_height_step(const HeightField& h, const KernelAnalysis& analysis,
                               const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica);

// Exact evolution to time t_final on shrinking windows; the result covers
// eval_window. Throws WindowTooSmall if h0 does not contain the light cone.
HeightField evolve_height(const HeightField& h0, const KernelAnalysis& analysis,
                          const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica,
                          long t_final, const Box& eval_window);

IncrementField evolve_increment_step(const IncrementField& eta, const KernelAnalysis& analysis,
                                     const NoiseModel& noise, std::uint64_t seed,
                                     std::uint32_t replica);

IncrementField evolve_increment(const IncrementField& eta0, const KernelAnalysis& analysis,
                                const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica,
                                long t_final, const Box& eval_window);

// eta(x - e_i, x) = h(x) - h(x - e_i); defined on the box shrunk by one on
// every low edge.
IncrementField height_to_increments(const HeightField& h);

// d=1 partial summation with h(anchor) = anchor_value.
HeightField increments_to_height(const IncrementField& eta, int anchor, double anchor_value);

// Dual random-walk representation:
//   h_t(site) = sum_y p^t(site,y) h0(y) + sum_{k=1}^t sum_x p^{t-k}(site,x) xi_k(x),
// mathematically identical to evolve_height at (t, site) for the same keys.
double dual_evaluate(const HeightField& h0, const KernelAnalysis& analysis, const NoiseModel& noise,
                     std::uint64_t seed, std::uint32_t replica, long t, const Site& site);

// Exact flat-start variance sigma_xi^2 sum_{k<t} q^k(0,0).
double variance_flat(const KernelAnalysis& analysis, double sigma_xi_sq, long t);
std::vector<double> variance_flat_curve(const KernelAnalysis& analysis, double sigma_xi_sq,
                                        const std::vector<long>& t_list);

}  // namespace harness
