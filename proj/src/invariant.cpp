#include "harness/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "harness/parallel.hpp"
#include "harness/quadrature.hpp"
#include "harness/stats.hpp"

namespace harness {
namespace {
constexpr double kPi = 3.14159265358979323846;

double phi_q(const KernelAnalysis& analysis, double th) {
  return 1.0 - analysis.one_minus_phi_q({th});
}

// (1-cos x theta)/(1-phi_q) with the removable singularity filled in.
double v0_ratio(const KernelAnalysis& analysis, long x, double th) {
  if (th == 0.0) return static_cast<double>(x) * static_cast<double>(x) / analysis.sigma_qsq();
  double s = std::sin(0.5 * static_cast<double>(x) * th);
  return 2.0 * s * s / analysis.one_minus_phi_q({th});
}

std::vector<double> oscillation_splits(long x) {
  std::vector<double> splits;
  long pieces = std::min<long>(64, std::max<long>(1, std::abs(x)));
  for (long i = 1; i < pieces; ++i) splits.push_back(kPi * static_cast<double>(i) / static_cast<double>(pieces));
  return splits;
}

}  // namespace

double v0(const KernelAnalysis& analysis, double sigma_xi_sq, long x, V0Method method,
          double abs_tol) {
  if (analysis.dim() != 1) throw DimensionUnsupported("V0 is a d=1 object");
  if (method == V0Method::KernelA) {
    return sigma_xi_sq *
           (analysis.potential_a(x - 1, abs_tol) + analysis.potential_a(x + 1, abs_tol) -
            2.0 * analysis.potential_a(x, abs_tol));
  }
  auto f = [&](double th) { return v0_ratio(analysis, 1, th) * std::cos(static_cast<double>(x) * th); };
  // (sigma^2/pi) int_{-pi}^{pi} = (2 sigma^2/pi) int_0^{pi} for the even integrand.
  double val = integrate_split(f, 0.0, kPi, oscillation_splits(x == 0 ? 1 : x), abs_tol);
  return 2.0 * sigma_xi_sq / kPi * val;
}

double v0_truncated(const KernelAnalysis& analysis, double sigma_xi_sq, long x, int K,
                    double abs_tol) {
  if (analysis.dim() != 1) throw DimensionUnsupported("V0 is a d=1 object");
  auto f = [&](double th) {
    double damp = 1.0 - std::pow(phi_q(analysis, th), K + 1);
    return v0_ratio(analysis, 1, th) * damp * std::cos(static_cast<double>(x) * th);
  };
  // The damping factor varies on scale 1/sqrt(K); force resolution there.
  std::vector<double> splits = oscillation_splits(x == 0 ? 1 : x);
  double peak = 1.0 / std::sqrt(static_cast<double>(K + 1));
  for (int j = 1; j <= 8; ++j) splits.push_back(j * peak);
  double val = integrate_split(f, 0.0, kPi, splits, abs_tol);
  return 2.0 * sigma_xi_sq / kPi * val;
}

double potential_tail_after(const KernelAnalysis& analysis, int K, double abs_tol) {
  if (analysis.dim() != 1) throw DimensionUnsupported("series tail is a d=1 quantity");
  auto f = [&](double th) {
    return v0_ratio(analysis, 1, th) * std::pow(phi_q(analysis, th), K + 1);
  };
  std::vector<double> splits;
  double peak = 1.0 / std::sqrt(static_cast<double>(K + 1));
  for (int j = 1; j <= 8; ++j) splits.push_back(j * peak);
  double val = integrate_split(f, 0.0, kPi, splits, abs_tol);
  return val / kPi;  // (1/2pi) over [-pi,pi]
}

// --- sampler --------------------------------------------------------------------

StationarySampler::StationarySampler(const KernelAnalysis& analysis, const NoiseModel& noise,
                                     StationarySamplerConfig config)
    : analysis_(analysis), noise_(noise), config_(config) {
  if (analysis.dim() != 1) throw DimensionUnsupported("stationary increment sampler is d=1");
  if (config_.depth < 0) throw ConfigError("negative truncation depth");
  validate_noise(noise_);
  if (config_.gaussian_closure && noise_.family != NoiseFamily::Gaussian)
    config_.gaussian_closure = false;

  if (!config_.gaussian_closure) {
    tail_bound_ = 2.0 * noise_.variance * potential_tail_after(analysis_, config_.depth);
    return;
  }

  // phi_q = |phi_p|^2 >= 0, so an odd depth keeps phi_q^{(K+1)/2} an integer
  // power (smooth at the zeros of phi_p) and the MA coefficients decay fast.
  if (config_.depth % 2 == 0) ++config_.depth;
  const int K = config_.depth;
  const double sxi = noise_.variance;

  // Tail spectral density S_T = 2 sigma^2 (1-cos)(phi_q^{K+1})/(1-phi_q);
  // the closure is the moving average with transfer function sqrt(S_T).
  auto sqrt_density = [&](double th) {
    double ratio = v0_ratio(analysis_, 1, th);
    double ph = std::max(0.0, phi_q(analysis_, th));
    return std::sqrt(2.0 * sxi * ratio) * std::pow(ph, (K + 1) / 2);
  };
  const double peak = 1.0 / std::sqrt(static_cast<double>(K + 1));
  std::vector<double> splits;
  for (int j = 1; j <= 8; ++j) splits.push_back(j * peak);

  const double t0 = 2.0 * sxi * potential_tail_after(analysis_, K);  // = T_K(0)
  const int j_max = static_cast<int>(12.0 / peak) + 8;
  ma_.assign(static_cast<size_t>(j_max) + 1, 0.0);
  for (int j = 0; j <= j_max; ++j) {
    auto f = [&](double th) { return sqrt_density(th) * std::cos(j * th); };
    std::vector<double> sp = splits;
    for (int i = 1; i <= std::min(32, j); ++i) sp.push_back(kPi * i / std::min(32, j));
    ma_[static_cast<size_t>(j)] = integrate_split(f, 0.0, kPi, sp, 1e-14) / kPi;
  }
  // Trim once the Parseval mass matches T_K(0); the residual is the honest
  // bound on the closed sampler's covariance error.
  double mass = ma_[0] * ma_[0];
  size_t keep = ma_.size();
  for (size_t j = 1; j < ma_.size(); ++j) mass += 2.0 * ma_[j] * ma_[j];
  while (keep > 1 && std::abs(ma_[keep - 1]) < 1e-11 * std::sqrt(t0 > 0 ? t0 : 1.0)) --keep;
  ma_.resize(keep);
  double kept_mass = ma_[0] * ma_[0];
  for (size_t j = 1; j < ma_.size(); ++j) kept_mass += 2.0 * ma_[j] * ma_[j];
  tail_bound_ = std::abs(t0 - kept_mass) * 10.0 + 1e-13 * t0;
}

bool StationarySampler::closed() const { return config_.gaussian_closure; }

IncrementField StationarySampler::sample(int lo, int hi, std::uint64_t seed,
                                         std::uint32_t replica) const {
  if (hi < lo) throw ConfigError("empty sample window");
  const int K = config_.depth;
  Box eval{Site{lo}, Site{hi}};
  IncrementField eta;
  if (K == 0) {
    // Single-layer case: eta(x) = xi_0(x) - xi_0(x-1).
    eta = make_increment_field(eval, 1, 0);
    for (int x = lo; x <= hi; ++x)
      eta.comp[static_cast<size_t>(x - lo)] =
          sample_noise(noise_, seed, replica, NoiseLane::Dynamics, 0, x) -
          sample_noise(noise_, seed, replica, NoiseLane::Dynamics, 0, x - 1);
  } else {
    // Evolving the increment dynamics from zero for K+1 steps with noise keys
    // (-k, y) realizes the truncated series exactly within the light cone.
    Box start = cone_window(analysis_, eval, K + 1);
    IncrementField zero = make_increment_field(start, 1, -(static_cast<long>(K) + 1));
    eta = evolve_increment(zero, analysis_, noise_, seed, replica, 0, eval);
  }
  if (config_.gaussian_closure && !ma_.empty()) {
    const double sigma = 1.0;
    const int J = static_cast<int>(ma_.size()) - 1;
    std::vector<double> z(static_cast<size_t>(hi - lo + 1 + 2 * J));
    for (int x = lo - J; x <= hi + J; ++x)
      z[static_cast<size_t>(x - lo + J)] =
          sigma * standard_normal(seed, replica, NoiseLane::Closure, 0, x);
    for (int x = lo; x <= hi; ++x) {
      double acc = ma_[0] * z[static_cast<size_t>(x - lo + J)];
      for (int j = 1; j <= J; ++j)
        acc += ma_[static_cast<size_t>(j)] * (z[static_cast<size_t>(x - lo + J - j)] +
                                              z[static_cast<size_t>(x - lo + J + j)]);
      eta.comp[static_cast<size_t>(x - lo)] += acc;
    }
  }
  return eta;
}

int StationarySampler::default_depth(const KernelAnalysis& analysis, double eps) {
  // tail(K) <= eps * a(1) since both sides carry the same 2 sigma_xi^2.
  const double target = eps * analysis.potential_a(1);
  int lo = 0, hi = 1;
  while (potential_tail_after(analysis, hi) > target) {
    lo = hi;
    hi *= 2;
    if (hi > (1 << 30)) throw ResourceLimit("truncation depth search exceeded 2^30");
  }
  while (lo + 1 < hi) {
    int mid = lo + (hi - lo) / 2;
    if (potential_tail_after(analysis, mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

// --- harmonic -------------------------------------------------------------------

double check_harmonic(const KernelAnalysis& analysis, const HarmonicTable& u, const Box& window) {
  const int d = analysis.dim();
  if (!u.box.covers(cone_window(analysis, window, 1)))
    throw WindowTooSmall("harmonic table must cover the window dilated by the kernel range");
  double worst = 0.0;
  const std::int64_t vol = window.volume();
  Site x = window.lo;
  Site y(static_cast<size_t>(d));
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    for (int dir = 0; dir < u.dims; ++dir) {
      double acc = 0.0;
      for (const auto& a : analysis.atoms(WalkKernel::P)) {
        for (int i = 0; i < d; ++i) y[i] = x[i] + a.offset[i];
        acc += a.prob * u.at(dir, y);
      }
      worst = std::max(worst, std::abs(acc - u.at(dir, x)));
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] <= window.hi[i]) break;
      x[i] = window.lo[i];
    }
  }
  return worst;
}

IncrementField add_harmonic(const IncrementField& sample, const HarmonicTable& u) {
  if (!u.box.covers(sample.box)) throw WindowTooSmall("harmonic table does not cover the sample");
  IncrementField out = sample;
  const std::int64_t vol = out.box.volume();
  Site x = out.box.lo;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    for (int dir = 0; dir < out.dims; ++dir)
      out.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] +=
          u.at(dir, x);
    for (int i = out.box.dim() - 1; i >= 0; --i) {
      if (++x[i] <= out.box.hi[i]) break;
      x[i] = out.box.lo[i];
    }
  }
  return out;
}

HarmonicTable constant_harmonic(const Box& box, int dims, const std::vector<double>& alpha) {
  HarmonicTable u = make_increment_field(box, dims, 0);
  const std::int64_t vol = box.volume();
  for (int dir = 0; dir < dims; ++dir)
    for (std::int64_t idx = 0; idx < vol; ++idx)
      u.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] =
          alpha[static_cast<size_t>(dir)];
  return u;
}

HarmonicTable linear_harmonic(const Box& box, int dims, const std::vector<double>& slope) {
  HarmonicTable u = make_increment_field(box, dims, 0);
  const std::int64_t vol = box.volume();
  Site x = box.lo;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    for (int dir = 0; dir < dims; ++dir)
      u.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] =
          slope[static_cast<size_t>(dir)] * x[static_cast<size_t>(dir)];
    for (int i = box.dim() - 1; i >= 0; --i) {
      if (++x[i] <= box.hi[i]) break;
      x[i] = box.lo[i];
    }
  }
  return u;
}

// --- chi (d >= 3) ----------------------------------------------------------------

ChiSample sample_chi(const KernelAnalysis& analysis, const NoiseModel& noise, int K,
                     const Box& window, std::uint64_t seed, std::uint32_t replica) {
  if (analysis.dim() < 3)
    throw DimensionUnsupported("stationary heights exist only in d>=3");
  ChiSample out;
  if (K == 0) {
    out.field = make_field(window, 0);
    const std::int64_t vol = window.volume();
    Site x = window.lo;
    for (std::int64_t idx = 0; idx < vol; ++idx) {
      out.field.values[static_cast<size_t>(idx)] =
          sample_noise_at(noise, seed, replica, NoiseLane::Dynamics, 0, x);
      for (int i = window.dim() - 1; i >= 0; --i) {
        if (++x[i] <= window.hi[i]) break;
        x[i] = window.lo[i];
      }
    }
  } else {
    Box start = cone_window(analysis, window, K + 1);
    HeightField zero = make_field(start, -(static_cast<long>(K) + 1));
    out.field = evolve_height(zero, analysis, noise, seed, replica, 0, window);
  }
  GreenResult g = green_function(analysis, origin(analysis.dim()), std::max(K, 64));
  out.tail_variance_bound = noise.variance * g.tail_bound;
  return out;
}

// --- diagnostics -------------------------------------------------------------------

std::vector<CharFnRow> charfn_diagnostic(const KernelAnalysis& analysis, const NoiseModel& noise,
                                         double alpha, const std::vector<long>& t_list,
                                         int replicas, std::uint64_t seed, int threads) {
  if (analysis.dim() > 2) throw DimensionUnsupported("nonexistence diagnostic is for d in {1,2}");
  if (alpha == 0.0) throw ConfigError("alpha must be nonzero");
  std::vector<long> sorted = t_list;
  std::sort(sorted.begin(), sorted.end());
  const long t_max = sorted.back();
  const Site o = origin(analysis.dim());

  // Per-replica heights h_t(0) at the snapshot times.
  std::vector<std::vector<double>> h(static_cast<size_t>(replicas));
  replica_for(static_cast<size_t>(replicas), threads, [&](std::size_t r) {
    std::vector<double>& row = h[r];
    row.assign(sorted.size(), 0.0);
    HeightField cur = make_field(cone_window(analysis, point_box(o), t_max), 0);
    size_t next = 0;
    while (next < sorted.size() && sorted[next] == 0) row[next++] = 0.0;
    for (long t = 1; t <= t_max && next < sorted.size(); ++t) {
      cur = evolve_height_step(cur, analysis, noise, seed, static_cast<std::uint32_t>(r));
      while (next < sorted.size() && sorted[next] == t) row[next++] = cur.at(o);
    }
  });

  std::vector<CharFnRow> rows(sorted.size());
  std::vector<long> theory_ts;
  for (long t : sorted) theory_ts.push_back(t);
  std::vector<double> var_flat = variance_flat_curve(analysis, noise.variance, theory_ts);

  for (size_t j = 0; j < sorted.size(); ++j) {
    rows[j].t = sorted[j];
    double re = 0.0, im = 0.0;
    for (int r = 0; r < replicas; ++r) {
      re += std::cos(alpha * h[static_cast<size_t>(r)][j]);
      im += std::sin(alpha * h[static_cast<size_t>(r)][j]);
    }
    re /= replicas;
    im /= replicas;
    rows[j].empirical = std::hypot(re, im);
    rows[j].theory = std::exp(-0.5 * alpha * alpha * var_flat[j]);

    // Bootstrap over replicas, resampling indices from a dedicated lane.
    const int B = 200;
    std::vector<double> boots(B);
    for (int b = 0; b < B; ++b) {
      double bre = 0.0, bim = 0.0;
      for (int i = 0; i < replicas; ++i) {
        StreamKey bs{seed, static_cast<std::uint32_t>(b), NoiseLane::Bootstrap};
        philox::Block blk = draw_block(bs, static_cast<long>(j), i);
        int pick = static_cast<int>(to_u64(blk.w[0], blk.w[1]) % static_cast<std::uint64_t>(replicas));
        bre += std::cos(alpha * h[static_cast<size_t>(pick)][j]);
        bim += std::sin(alpha * h[static_cast<size_t>(pick)][j]);
      }
      boots[static_cast<size_t>(b)] = std::hypot(bre / replicas, bim / replicas);
    }
    rows[j].boot_stderr = std::sqrt(sample_variance(boots));
  }
  return rows;
}

std::vector<ProbeRow> convergence_probe(const KernelAnalysis& analysis, const NoiseModel& noise,
                                        const InitialIncrementSampler& initial,
                                        const std::vector<long>& t_list, int replicas,
                                        std::uint64_t seed, int threads) {
  if (analysis.dim() != 1) throw DimensionUnsupported("convergence probe is d=1");
  std::vector<long> sorted = t_list;
  std::sort(sorted.begin(), sorted.end());
  const long t_max = sorted.back();
  Box eval{Site{0}, Site{0}};
  Box start = cone_window(analysis, eval, t_max);

  std::vector<std::vector<double>> eta_at(static_cast<size_t>(replicas));
  replica_for(static_cast<size_t>(replicas), threads, [&](std::size_t r) {
    std::vector<double>& row = eta_at[r];
    row.assign(sorted.size(), 0.0);
    IncrementField cur = initial(start.lo[0], start.hi[0], seed, static_cast<std::uint32_t>(r));
    size_t next = 0;
    while (next < sorted.size() && sorted[next] == 0) row[next++] = cur.at(0, Site{0});
    for (long t = 1; t <= t_max && next < sorted.size(); ++t) {
      cur = evolve_increment_step(cur, analysis, noise, seed, static_cast<std::uint32_t>(r));
      while (next < sorted.size() && sorted[next] == t) row[next++] = cur.at(0, Site{0});
    }
  });

  std::vector<ProbeRow> rows(sorted.size());
  std::vector<double> col(static_cast<size_t>(replicas));
  for (size_t j = 0; j < sorted.size(); ++j) {
    for (int r = 0; r < replicas; ++r) col[static_cast<size_t>(r)] = eta_at[static_cast<size_t>(r)][j];
    rows[j].t = sorted[j];
    rows[j].variance = sample_variance(col);
    rows[j].stderr_ = variance_stderr_jackknife(col);
  }
  return rows;
}

LagCovariance pi0_lag_covariance(const StationarySampler& sampler, int max_lag, int replicas,
                                 std::uint64_t seed, int threads) {
  std::vector<std::vector<double>> rows(static_cast<size_t>(replicas));
  replica_for(static_cast<size_t>(replicas), threads, [&](std::size_t r) {
    IncrementField eta = sampler.sample(0, max_lag, seed, static_cast<std::uint32_t>(r));
    std::vector<double>& row = rows[r];
    row.resize(static_cast<size_t>(max_lag) + 1);
    for (int x = 0; x <= max_lag; ++x) row[static_cast<size_t>(x)] = eta.comp[static_cast<size_t>(x)];
  });
  CovMatrix cm = covariance_jackknife(rows);
  LagCovariance out;
  out.est.resize(static_cast<size_t>(max_lag) + 1);
  out.stderr_.resize(static_cast<size_t>(max_lag) + 1);
  for (int x = 0; x <= max_lag; ++x) {
    out.est[static_cast<size_t>(x)] = cm.cov_at(0, static_cast<size_t>(x));
    out.stderr_[static_cast<size_t>(x)] = cm.stderr_at(0, static_cast<size_t>(x));
  }
  return out;
}

}  // namespace harness
