#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "harness/errors.hpp"
#include "harness/lattice.hpp"

namespace harness {

struct KernelAtom {
  Site offset;
  double prob;
};

// The finite-support jump law p on Z^d.
struct KernelSpec {
  int d = 1;
  std::vector<KernelAtom> support;
  std::optional<int> declared_range;  // reject if the support sticks out past this
};

// Exact k-step transition table over its reachable box.
struct LatticeDistribution {
  Box box;
  std::vector<double> probs;
  int k = 0;

  double at_or_zero(const Site& x) const {
    return box.contains(x) ? probs[static_cast<size_t>(box.flatten(x))] : 0.0;
  }
};

struct KernelLimits {
  std::int64_t max_cells_per_table = 200'000'000;
  std::int64_t max_cached_cells = 200'000'000;
};

enum class WalkKernel { P, Q };

// Validated kernel plus everything derived from it: moments, the symmetrized
// kernel q, characteristic functions, cached convolution powers, the d=1
// potential kernel. Immutable after construction; the power cache is an
// internally synchronized insert-once map, so concurrent readers are fine.
class KernelAnalysis {
 public:
  const KernelSpec& spec() const { return spec_; }
  int dim() const { return spec_.d; }
  int range() const { return range_; }

  const std::vector<double>& mean_vector() const { return mean_; }
  double mean1() const { return mean_[0]; }        // d=1
  double drift_b() const { return -mean_[0]; }     // d=1
  double sigma1sq() const;                         // d=1
  double sigma_qsq() const { return 2.0 * sigma1sq(); }

  const std::vector<KernelAtom>& atoms(WalkKernel which) const {
    return which == WalkKernel::P ? spec_.support : q_support_;
  }

  // Exact k-fold convolution power, k=0 being the point mass at the origin.
  std::shared_ptr<const LatticeDistribution> power(WalkKernel which, int k) const;

  std::complex<double> char_fn(WalkKernel which, const std::vector<double>& theta) const;

  // 1 - phi_q(theta) evaluated as sum_x q(x) * 2 sin^2(x.theta/2); exact near
  // theta = 0 where the naive difference cancels.
  double one_minus_phi_q(const std::vector<double>& theta) const;

  // d=1 potential kernel of q by quadrature of
  // (1/2pi) int (1-cos x theta)/(1-phi_q) dtheta; the removable singularity
  // at 0 enters through its limit x^2/sigma_q^2.
  double potential_a(long x, double abs_tol = 1e-10) const;

  friend KernelAnalysis validate_kernel(const KernelSpec& spec, const KernelLimits& limits);

 private:
  KernelSpec spec_;
  int range_ = 0;
  std::vector<double> mean_;
  double sigma1sq_ = 0.0;
  std::vector<KernelAtom> q_support_;
  KernelLimits limits_;

  struct CacheState {
    std::mutex mu;
    std::unordered_map<int, std::shared_ptr<const LatticeDistribution>> table[2];
    std::int64_t cells = 0;
  };
  std::shared_ptr<CacheState> cache_ = std::make_shared<CacheState>();
};

KernelAnalysis validate_kernel(const KernelSpec& spec, const KernelLimits& limits = {});

// Convenience free function matching the table-building operation.
std::shared_ptr<const LatticeDistribution> convolve_power(const KernelAnalysis& analysis,
                                                          WalkKernel which, int k);

// --- exact streaming powers -------------------------------------------------

// Walks the full power table forward one step at a time without caching; for
// sweeps like sum_k q^k(0,0) where only a few values per k are read.
class DensePowerStream {
 public:
  DensePowerStream(const KernelAnalysis& analysis, WalkKernel which,
                   std::int64_t max_cells = 200'000'000);
  void step();
  int k() const { return dist_.k; }
  double at(const Site& x) const { return dist_.at_or_zero(x); }
  const LatticeDistribution& dist() const { return dist_; }

 private:
  const KernelAnalysis& analysis_;
  std::vector<KernelAtom> atoms_;
  LatticeDistribution dist_;
  std::int64_t max_cells_;
};

// d=1 power stream restricted to a band of width O(sqrt(k)) around the drift;
// probability clipped at the band edge is accumulated so callers can check
// that the discarded mass is negligible for their tolerance.
class BandPowerStream1D {
 public:
  BandPowerStream1D(const KernelAnalysis& analysis, WalkKernel which, double band_factor = 8.0);
  // Raw one-dimensional step law; offsets and matching weights.
  BandPowerStream1D(std::vector<long> offsets, std::vector<double> weights, double band_factor = 8.0);
  void step();
  int k() const { return k_; }
  double at(long x) const;
  double lost_mass() const { return lost_; }

 private:
  std::vector<long> offs_;
  std::vector<double> wts_;
  double mean_step_;
  double band_factor_;
  int k_ = 0;
  long lo_ = 0;  // absolute coordinate of values_[0]
  std::vector<double> values_;
  std::vector<double> scratch_;
  double lost_ = 0.0;
};

// --- derived quantities ------------------------------------------------------

// Partial sums a_K(x) = sum_{k<=K} [q^k(0,0) - q^k(x,0)], the series route to
// the potential kernel. d=1 or d=2 (the d=2 route converges too slowly to be
// acceptance-grade and is provided as a diagnostic only).
struct PotentialPartial {
  std::vector<double> values;  // one per requested x
  double lost_mass = 0.0;      // band clipping, d=1 path
};
PotentialPartial potential_partial(const KernelAnalysis& analysis, const std::vector<long>& xs,
                                   int K);

struct GreenResult {
  double value = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
};
// d>=3: sum_{k<=K} q^k(x,0) plus a fitted C k^{-d/2} tail bound.
GreenResult green_function(const KernelAnalysis& analysis, const Site& x, int K);

struct LocalCltResult {
  double lhs = 0.0;
  double rhs = 0.0;
};
// Lemma-style local CLT sum: lhs = n^{-1/2} sum_{k<floor(nt)} P(S_k = a_n)
// with a_n = floor(a sqrt(n)); the drift of p is recentred on the target
// point so the arithmetic stays on the integer lattice.
LocalCltResult local_clt_sum(const KernelAnalysis& analysis, WalkKernel which, double t, double a,
                             long n);

// sum_x |p^t(0,x) - p^t(0,x-e_l)| summed over directions, for each t in
// t_list (ascending); the smoothness quantity whose product with sqrt(t)
// stays bounded.
std::vector<double> l1_discrete_derivative(const KernelAnalysis& analysis,
                                           const std::vector<int>& t_list);

}  // namespace harness
