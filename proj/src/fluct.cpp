#include "harness/fluct.hpp"

#include <algorithm>
#include <cmath>

#include "harness/parallel.hpp"
#include "harness/process.hpp"

namespace harness {
namespace {

struct PointIndex {
  long steps = 0;
  long site = 0;
};

PointIndex point_index(const KernelAnalysis& kernel, long n, const SpaceTimePoint& p) {
  PointIndex out;
  const double nd = static_cast<double>(n);
  out.steps = static_cast<long>(std::floor(nd * p.t));
  out.site = static_cast<long>(std::floor(p.r * std::sqrt(nd))) +
             static_cast<long>(std::floor(nd * p.t * kernel.drift_b()));
  return out;
}

void support_extent(const KernelAnalysis& kernel, int& min_off, int& max_off) {
  min_off = 0;
  max_off = 0;
  for (const auto& a : kernel.atoms(WalkKernel::P)) {
    min_off = std::min(min_off, a.offset[0]);
    max_off = std::max(max_off, a.offset[0]);
  }
}

// Hull of the backward light cones of all evaluation points, plus the
// normalization site 0.
void initial_hull(const FluctExperiment& ex, const std::vector<PointIndex>& idx, long& lo,
                  long& hi) {
  int min_off, max_off;
  support_extent(ex.kernel, min_off, max_off);
  lo = 0;
  hi = 0;
  for (const auto& p : idx) {
    lo = std::min(lo, p.site + p.steps * min_off);
    hi = std::max(hi, p.site + p.steps * max_off);
  }
}

}  // namespace

long scaled_time(long n, double t) { return static_cast<long>(std::floor(static_cast<double>(n) * t)); }

long scaled_site(const KernelAnalysis& kernel, long n, double t, double r) {
  return point_index(kernel, n, SpaceTimePoint{t, r}).site;
}

std::vector<double> eval_field(const FluctExperiment& ex, std::uint64_t seed,
                               std::uint32_t replica) {
  if (ex.kernel.dim() != 1) throw DimensionUnsupported("the fluctuation experiment is d=1");
  if (ex.n < 16) throw ConfigError("scale parameter n must be >= 16");
  const double n4 = std::pow(static_cast<double>(ex.n), -0.25);
  const double sqrt_n = std::sqrt(static_cast<double>(ex.n));
  const double mu0 = ex.initial.mu0();

  std::vector<PointIndex> idx;
  idx.reserve(ex.points.size());
  long t_max = 0;
  for (const auto& p : ex.points) {
    idx.push_back(point_index(ex.kernel, ex.n, p));
    t_max = std::max(t_max, idx.back().steps);
  }
  long lo, hi;
  initial_hull(ex, idx, lo, hi);

  auto [eta0, h0] = ex.initial.sample_initial(static_cast<int>(lo) + 1, static_cast<int>(hi), seed,
                                              replica);
  // h0 covers [lo, hi] with h0(0) = 0.
  std::vector<double> out(ex.points.size(), 0.0);
  HeightField cur = h0;
  for (size_t j = 0; j < idx.size(); ++j)
    if (idx[j].steps == 0)
      out[j] = n4 * (cur.at(Site{static_cast<int>(idx[j].site)}) - mu0 * ex.points[j].r * sqrt_n);
  for (long t = 1; t <= t_max; ++t) {
    cur = evolve_height_step(cur, ex.kernel, ex.noise, seed, replica);
    for (size_t j = 0; j < idx.size(); ++j)
      if (idx[j].steps == t)
        out[j] = n4 * (cur.at(Site{static_cast<int>(idx[j].site)}) - mu0 * ex.points[j].r * sqrt_n);
  }
  return out;
}

Decomposition decompose(const FluctExperiment& ex, const SpaceTimePoint& point, std::uint64_t seed,
                        std::uint32_t replica, long n_cap) {
  if (ex.kernel.dim() != 1) throw DimensionUnsupported("the fluctuation experiment is d=1");
  if (ex.n > n_cap) throw ResourceLimit("decomposition keeps full power tables; raise n_cap knowingly");
  const double n4 = std::pow(static_cast<double>(ex.n), -0.25);
  const double sqrt_n = std::sqrt(static_cast<double>(ex.n));
  const double mu0 = ex.initial.mu0();
  const PointIndex pi = point_index(ex.kernel, ex.n, point);
  const long T = pi.steps;
  const long y = pi.site;

  Decomposition out;
  // Mean of the dual walk: E X_T^y = mu * T + y.
  out.h_bar = mu0 * n4 * (ex.kernel.mean1() * static_cast<double>(T) + static_cast<double>(y) -
                          point.r * sqrt_n);

  // Dynamical term: sum_{k=1..T} sum_x p^{T-k}(y,x) xi_k(x).
  double f = 0.0;
  for (long k = 1; k <= T; ++k) {
    auto tbl = ex.kernel.power(WalkKernel::P, static_cast<int>(T - k));
    const int blo = tbl->box.lo[0], bhi = tbl->box.hi[0];
    for (int rel = blo; rel <= bhi; ++rel) {
      double w = tbl->probs[static_cast<size_t>(rel - blo)];
      if (w != 0.0)
        f += w * sample_noise(ex.noise, seed, replica, NoiseLane::Dynamics, k,
                              static_cast<int>(y) + rel);
    }
  }
  out.f_bar = n4 * f;

  // Initial-increment term with walk-CDF weights.
  auto tbl = ex.kernel.power(WalkKernel::P, static_cast<int>(T));
  const int blo = tbl->box.lo[0], bhi = tbl->box.hi[0];
  const long reach_lo = y + blo, reach_hi = y + bhi;
  const long eta_lo = std::min<long>(1, reach_lo + 1);
  const long eta_hi = std::max<long>(0, reach_hi);
  IncrementField eta0 = ex.initial.sample_eta(static_cast<int>(eta_lo), static_cast<int>(eta_hi),
                                              seed, replica);
  // Upper cdf P(X_T^y >= i) swept from the top.
  double s = 0.0;
  double upper = 0.0;  // P(X >= i) built downward
  std::vector<double> cum_ge(static_cast<size_t>(bhi - blo + 2), 0.0);
  for (int rel = bhi; rel >= blo; --rel) {
    upper += tbl->probs[static_cast<size_t>(rel - blo)];
    cum_ge[static_cast<size_t>(rel - blo)] = upper;
  }
  auto p_ge = [&](long i) -> double {
    if (i <= reach_lo) return 1.0;
    if (i > reach_hi) return 0.0;
    return cum_ge[static_cast<size_t>(i - y - blo)];
  };
  for (long i = 1; i <= eta_hi; ++i)
    s += (eta0.at(0, Site{static_cast<int>(i)}) - mu0) * p_ge(i);
  for (long i = eta_lo; i <= 0; ++i)
    s -= (eta0.at(0, Site{static_cast<int>(i)}) - mu0) * (1.0 - p_ge(i));
  out.s_bar = n4 * s;
  return out;
}

CovEstimate estimate_cov(const FluctExperiment& ex, int replicas, std::uint64_t seed, int threads) {
  if (replicas < 30) throw ConfigError("need at least 30 replicas for covariance estimation");
  std::vector<std::vector<double>> rows(static_cast<size_t>(replicas));
  replica_for(static_cast<size_t>(replicas), threads,
              [&](std::size_t r) { rows[r] = eval_field(ex, seed, static_cast<std::uint32_t>(r)); });
  CovEstimate out;
  out.points = ex.points;
  out.matrix = covariance_jackknife(rows);
  out.replicas = replicas;
  return out;
}

CompareReport compare(const CovEstimate& est, const LimitParams& params) {
  CompareReport rep;
  const std::size_t p = est.matrix.dim;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      CompareEntry e;
      e.i = i;
      e.j = j;
      e.est = est.matrix.cov_at(i, j);
      e.stderr_ = est.matrix.stderr_at(i, j);
      e.theory = z_cov(params, est.points[i], est.points[j]);
      e.z = (e.est - e.theory) / e.stderr_;
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(e.z));
      rep.entries.push_back(e);
    }
  return rep;
}

std::vector<HydroRow> hydro_check(const KernelAnalysis& kernel, const NoiseModel& noise,
                                  const std::function<double(double)>& u0,
                                  const std::vector<long>& n_list, double t, double r_box,
                                  std::uint64_t seed, int grid_points) {
  if (kernel.dim() != 1) throw DimensionUnsupported("hydrodynamic check is d=1");
  std::vector<HydroRow> rows;
  const double mu = kernel.mean1();
  for (long n : n_list) {
    const long T = scaled_time(n, t);
    const double nd = static_cast<double>(n);
    const long site_lo = static_cast<long>(std::floor(-r_box * nd));
    const long site_hi = static_cast<long>(std::ceil(r_box * nd));
    Box eval{Site{static_cast<int>(site_lo)}, Site{static_cast<int>(site_hi)}};
    Box start = cone_window(kernel, eval, T);
    HeightField h0 = make_field(start, 0);
    for (int x = start.lo[0]; x <= start.hi[0]; ++x)
      h0.values[static_cast<size_t>(x - start.lo[0])] = std::floor(nd * u0(x / nd));
    HeightField ht = evolve_height(h0, kernel, noise, seed, 0, T, eval);
    double sup = 0.0;
    for (int g = 0; g < grid_points; ++g) {
      double x = -r_box + 2.0 * r_box * g / (grid_points - 1);
      long sx = static_cast<long>(std::floor(nd * x));
      double macro = ht.at(Site{static_cast<int>(sx)}) / nd;
      sup = std::max(sup, std::abs(macro - u0(x + t * mu)));
    }
    rows.push_back(HydroRow{n, sup});
  }
  return rows;
}

ScalingReport variance_scaling(const KernelAnalysis& kernel, const NoiseModel& noise,
                               const std::vector<long>& t_list, int replicas, std::uint64_t seed,
                               int threads) {
  if (kernel.dim() != 1) throw DimensionUnsupported("variance scaling runs in d=1");
  std::vector<long> sorted = t_list;
  std::sort(sorted.begin(), sorted.end());
  const long t_max = sorted.back();
  const Site o = origin(1);

  std::vector<std::vector<double>> h(static_cast<size_t>(replicas));
  replica_for(static_cast<size_t>(replicas), threads, [&](std::size_t r) {
    std::vector<double>& row = h[r];
    row.assign(sorted.size(), 0.0);
    HeightField cur = make_field(cone_window(kernel, point_box(o), t_max), 0);
    size_t next = 0;
    while (next < sorted.size() && sorted[next] == 0) row[next++] = 0.0;
    for (long t = 1; t <= t_max && next < sorted.size(); ++t) {
      cur = evolve_height_step(cur, kernel, noise, seed, static_cast<std::uint32_t>(r));
      while (next < sorted.size() && sorted[next] == t) row[next++] = cur.at(o);
    }
  });

  ScalingReport rep;
  std::vector<double> exact = variance_flat_curve(kernel, noise.variance, sorted);
  std::vector<double> col(static_cast<size_t>(replicas));
  std::vector<double> log_t, log_exact, log_mc;
  for (size_t j = 0; j < sorted.size(); ++j) {
    for (int r = 0; r < replicas; ++r) col[static_cast<size_t>(r)] = h[static_cast<size_t>(r)][j];
    ScalingRow row;
    row.t = sorted[j];
    row.exact = exact[j];
    row.mc = sample_variance(col);
    row.mc_stderr = variance_stderr_jackknife(col);
    rep.rows.push_back(row);
    log_t.push_back(std::log(static_cast<double>(row.t)));
    log_exact.push_back(std::log(row.exact));
    log_mc.push_back(std::log(row.mc));
  }
  rep.slope_exact = ls_slope(log_t, log_exact);
  rep.slope_mc = ls_slope(log_t, log_mc);
  return rep;
}

}  // namespace harness
