#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "harness/initialdata.hpp"
#include "harness/kernel.hpp"
#include "harness/limitcov.hpp"
#include "harness/noise.hpp"
#include "harness/stats.hpp"

namespace harness {

// One replica of the scaled field: all points share one trajectory so joint
// laws are preserved. Y_n(t,r) = n^{-1/4}(h_{[nt]}([r sqrt n] + [ntb]) - mu0 r sqrt n)
// with h0(0) = 0.
struct FluctExperiment {
  const KernelAnalysis& kernel;
  NoiseModel noise;
  const InitialIncrementLaw& initial;
  long n = 0;
  std::vector<SpaceTimePoint> points;
};

// Lattice index maps of the scaling: floor(nt), floor(ntb), floor(r sqrt n).
long scaled_time(long n, double t);
long scaled_site(const KernelAnalysis& kernel, long n, double t, double r);

std::vector<double> eval_field(const FluctExperiment& ex, std::uint64_t seed,
                               std::uint32_t replica);

struct Decomposition {
  double h_bar = 0.0;  // drift/floor bookkeeping term (multiplied by mu0)
  double f_bar = 0.0;  // dynamical noise term
  double s_bar = 0.0;  // initial-increment term
  double total() const { return h_bar + f_bar + s_bar; }
};
// Exact three-term split of Y_n at one point; algebraically identical to
// eval_field for the same keys. Needs full power tables, hence the n cap.
Decomposition decompose(const FluctExperiment& ex, const SpaceTimePoint& point, std::uint64_t seed,
                        std::uint32_t replica, long n_cap = 256);

struct CovEstimate {
  std::vector<SpaceTimePoint> points;
  CovMatrix matrix;
  int replicas = 0;
};
CovEstimate estimate_cov(const FluctExperiment& ex, int replicas, std::uint64_t seed, int threads);

struct CompareEntry {
  std::size_t i = 0, j = 0;
  double est = 0.0;
  double stderr_ = 0.0;
  double theory = 0.0;
  double z = 0.0;
};
struct CompareReport {
  std::vector<CompareEntry> entries;
  double max_abs_z = 0.0;
  bool all_within(double z_max) const { return max_abs_z <= z_max; }
};
CompareReport compare(const CovEstimate& est, const LimitParams& params);

// Hydrodynamic limit: sup_x |n^{-1} h_{[nt]}([nx]) - u0(x + t mu)| over a
// grid of macroscopic x in [-r_box, r_box].
struct HydroRow {
  long n = 0;
  double sup_error = 0.0;
};
std::vector<HydroRow> hydro_check(const KernelAnalysis& kernel, const NoiseModel& noise,
                                  const std::function<double(double)>& u0,
                                  const std::vector<long>& n_list, double t, double r_box,
                                  std::uint64_t seed, int grid_points = 64);

// Flat-start Var h_t(0): exact curve against Monte Carlo, with log-log slopes.
struct ScalingRow {
  long t = 0;
  double exact = 0.0;
  double mc = 0.0;
  double mc_stderr = 0.0;
};
struct ScalingReport {
  std::vector<ScalingRow> rows;
  double slope_exact = 0.0;
  double slope_mc = 0.0;
};
ScalingReport variance_scaling(const KernelAnalysis& kernel, const NoiseModel& noise,
                               const std::vector<long>& t_list, int replicas, std::uint64_t seed,
                               int threads);

}  // namespace harness
