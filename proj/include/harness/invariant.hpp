#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "harness/kernel.hpp"
#include "harness/noise.hpp"
#include "harness/process.hpp"

namespace harness {

// --- stationary covariance V0 (d=1) ------------------------------------------

enum class V0Method { Fourier, KernelA };

// V0(0,x): Fourier route integrates (sigma_xi^2/pi)(1-cos theta)/(1-phi_q)
// cos(x theta); the kernel route takes the discrete second difference of the
// potential kernel.
double v0(const KernelAnalysis& analysis, double sigma_xi_sq, long x,
          V0Method method = V0Method::Fourier, double abs_tol = 1e-10);

// Covariance of the K-truncated stationary series (same integral with the
// density damped by phi_q^{K+1}).
double v0_truncated(const KernelAnalysis& analysis, double sigma_xi_sq, long x, int K,
                    double abs_tol = 1e-12);

// sum_{k>K} [q^k(0,0) - q^k(1,0)]; the exact per-coordinate series tail.
double potential_tail_after(const KernelAnalysis& analysis, int K, double abs_tol = 1e-13);

// --- pi0 sampler ---------------------------------------------------------------

struct StationarySamplerConfig {
  int depth = 511;  // series truncation depth K
  // Close the k>K tail with an independent Gaussian moving average whose
  // covariance equals the exact tail covariance; the sampled law is then the
  // full stationary law (Gaussian noise only).
  bool gaussian_closure = true;
};

// Truncated-series sampler for the minimal-variance invariant increment law
// in d=1. The head eta(x) = sum_{k<=K} sum_y xi_{-k}(y)[p^k(x,y)-p^k(x-1,y)]
// is realized exactly by evolving the increment dynamics from zero with noise
// keys (-k, y, replica).
class StationarySampler {
 public:
  StationarySampler(const KernelAnalysis& analysis, const NoiseModel& noise,
                    StationarySamplerConfig config);

  const KernelAnalysis& analysis() const { return analysis_; }
  const NoiseModel& noise() const { return noise_; }
  int depth() const { return config_.depth; }
  bool closed() const;

  // Exact per-coordinate tail variance bound: 2 sigma_xi^2 (a(1) - S_K) for
  // the bare series, or the closure residual when the tail is closed.
  double tail_bound() const { return tail_bound_; }

  // eta on {lo..hi} at time stamp 0 (d=1).
  IncrementField sample(int lo, int hi, std::uint64_t seed, std::uint32_t replica) const;

  // Smallest K whose exact tail bound is <= eps * V0(0,0).
  static int default_depth(const KernelAnalysis& analysis, double eps = 1e-3);

 private:
  const KernelAnalysis& analysis_;
  NoiseModel noise_;
  StationarySamplerConfig config_;
  double tail_bound_ = 0.0;
  std::vector<double> ma_;  // closure coefficients, index 0 -> lag 0, symmetric
};

// --- harmonic functions --------------------------------------------------------

// Tabulated u: Z^d -> R^d (component i = the shift added to eta(x-e_i, x)).
using HarmonicTable = IncrementField;

// max_x over window of max_i |sum_y p(x,y) u_i(y) - u_i(x)|; u must be
// tabulated on the window dilated by the kernel range.
double check_harmonic(const KernelAnalysis& analysis, const HarmonicTable& u, const Box& window);

// Pointwise shift by a harmonic table: the pi_u transformation.
IncrementField add_harmonic(const IncrementField& sample, const HarmonicTable& u);

HarmonicTable constant_harmonic(const Box& box, int dims, const std::vector<double>& alpha);
// Linear map u_i(x) = slope_i * x_i; harmonic exactly for centered kernels.
HarmonicTable linear_harmonic(const Box& box, int dims, const std::vector<double>& slope);

// --- stationary heights in d >= 3 ---------------------------------------------

struct ChiSample {
  HeightField field;
  double tail_variance_bound = 0.0;
};
// Truncated series chi(x) = sum_{k<=K} sum_z xi_{-k}(z) p^k(x,z); the tail
// variance bound is sigma_xi^2 times the Green-function tail.
ChiSample sample_chi(const KernelAnalysis& analysis, const NoiseModel& noise, int K,
                     const Box& window, std::uint64_t seed, std::uint32_t replica);

// --- diagnostics ----------------------------------------------------------------

struct CharFnRow {
  long t = 0;
  double empirical = 0.0;
  double theory = 0.0;
  double boot_stderr = 0.0;
};
// Flat start, d in {1,2}: empirical |E exp(i alpha h_t(0))| against
// exp(-alpha^2/2 * sigma_xi^2 sum_{k<t} q^k(0,0)) (exact for Gaussian noise).
std::vector<CharFnRow> charfn_diagnostic(const KernelAnalysis& analysis, const NoiseModel& noise,
                                         double alpha, const std::vector<long>& t_list,
                                         int replicas, std::uint64_t seed, int threads);

using InitialIncrementSampler =
    std::function<IncrementField(int lo, int hi, std::uint64_t seed, std::uint32_t replica)>;

struct ProbeRow {
  long t = 0;
  double variance = 0.0;
  double stderr_ = 0.0;
};
// Var eta_t(0) trajectory from a shift-ergodic mean-zero initial law; should
// relax toward V0(0,0) and never sit materially below it.
std::vector<ProbeRow> convergence_probe(const KernelAnalysis& analysis, const NoiseModel& noise,
                                        const InitialIncrementSampler& initial,
                                        const std::vector<long>& t_list, int replicas,
                                        std::uint64_t seed, int threads);

struct LagCovariance {
  std::vector<double> est;      // lag 0..L
  std::vector<double> stderr_;  // jackknife
};
// Monte Carlo lag covariances of the sampler output across replicas.
LagCovariance pi0_lag_covariance(const StationarySampler& sampler, int max_lag, int replicas,
                                 std::uint64_t seed, int threads);

}  // namespace harness
