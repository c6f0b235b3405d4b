#include "harness/process.hpp"

#include <algorithm>
#include <cmath>

namespace harness {
namespace {

Box eroded_by_support(const Box& b, const KernelAnalysis& analysis) {
  // x computable iff x + off stays inside b for every support offset:
  // x >= b.lo - min_off and x <= b.hi - max_off per dimension.
  Box out = b;
  const int d = analysis.dim();
  for (int i = 0; i < d; ++i) {
    int min_off = 0, max_off = 0;
    for (const auto& a : analysis.atoms(WalkKernel::P)) {
      min_off = std::min(min_off, a.offset[i]);
      max_off = std::max(max_off, a.offset[i]);
    }
    out.lo[i] = b.lo[i] - min_off;
    out.hi[i] = b.hi[i] - max_off;
  }
  return out;
}

}  // namespace

IncrementField make_increment_field(Box box, int dims, long t, double fill) {
  IncrementField f;
  f.comp.assign(static_cast<size_t>(box.volume()) * static_cast<size_t>(dims), fill);
  f.box = std::move(box);
  f.dims = dims;
  f.t = t;
  return f;
}

Box cone_window(const KernelAnalysis& analysis, const Box& eval, long steps) {
  Box out = eval;
  const int d = analysis.dim();
  for (int i = 0; i < d; ++i) {
    int min_off = 0, max_off = 0;
    for (const auto& a : analysis.atoms(WalkKernel::P)) {
      min_off = std::min(min_off, a.offset[i]);
      max_off = std::max(max_off, a.offset[i]);
    }
    out.lo[i] = eval.lo[i] + static_cast<int>(steps) * min_off;
    out.hi[i] = eval.hi[i] + static_cast<int>(steps) * max_off;
  }
  return out;
}

HeightField evolve_height_step(const HeightField& h, const KernelAnalysis& analysis,
                               const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica) {
  const int d = analysis.dim();
  Box nb = eroded_by_support(h.box, analysis);
  if (nb.volume() <= 0) throw WindowTooSmall("window vanished during evolution");
  HeightField out = make_field(nb, h.t + 1);

  if (d == 1) {
    const int lo = nb.lo[0], hi = nb.hi[0];
    const int src_lo = h.box.lo[0];
    const auto& atoms = analysis.atoms(WalkKernel::P);
    const size_t na = atoms.size();
    int offs[16];
    double wts[16];
    const bool small = na <= 16;
    for (size_t i = 0; small && i < na; ++i) {
      offs[i] = atoms[i].offset[0];
      wts[i] = atoms[i].prob;
    }
    const double* src = h.values.data();
    double* dst = out.values.data();
    for (int x = lo; x <= hi; ++x) {
      double acc = 0.0;
      const std::ptrdiff_t base = x - src_lo;
      if (small) {
        for (size_t i = 0; i < na; ++i) acc += wts[i] * src[base + offs[i]];
      } else {
        for (const auto& a : atoms) acc += a.prob * src[base + a.offset[0]];
      }
      dst[x - lo] = acc + sample_noise(noise, seed, replica, NoiseLane::Dynamics, out.t, x);
    }
    return out;
  }

  const std::int64_t vol = nb.volume();
  Site x = nb.lo;
  Site y(static_cast<size_t>(d));
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    double acc = 0.0;
    for (const auto& a : analysis.atoms(WalkKernel::P)) {
      for (int i = 0; i < d; ++i) y[i] = x[i] + a.offset[i];
      acc += a.prob * h.values[static_cast<size_t>(h.box.flatten(y))];
    }
    out.values[static_cast<size_t>(idx)] =
        acc + sample_noise_at(noise, seed, replica, NoiseLane::Dynamics, out.t, x);
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] <= nb.hi[i]) break;
      x[i] = nb.lo[i];
    }
  }
  return out;
}

HeightField evolve_height(const HeightField& h0, const KernelAnalysis& analysis,
                          const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica,
                          long t_final, const Box& eval_window) {
  const long steps = t_final - h0.t;
  if (steps < 0) throw ConfigError("t_final before the field's time stamp");
  if (!h0.box.covers(cone_window(analysis, eval_window, steps)))
    throw WindowTooSmall("initial window does not contain the light cone of the evaluation window");
  HeightField cur = h0;
  for (long s = 0; s < steps; ++s) cur = evolve_height_step(cur, analysis, noise, seed, replica);
  // Restrict to the evaluation window.
  HeightField out = make_field(eval_window, cur.t);
  const std::int64_t vol = eval_window.volume();
  Site x = eval_window.lo;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    out.values[static_cast<size_t>(idx)] = cur.values[static_cast<size_t>(cur.box.flatten(x))];
    for (int i = analysis.dim() - 1; i >= 0; --i) {
      if (++x[i] <= eval_window.hi[i]) break;
      x[i] = eval_window.lo[i];
    }
  }
  return out;
}

IncrementField evolve_increment_step(const IncrementField& eta, const KernelAnalysis& analysis,
                                     const NoiseModel& noise, std::uint64_t seed,
                                     std::uint32_t replica) {
  const int d = analysis.dim();
  Box nb = eroded_by_support(eta.box, analysis);
  if (nb.volume() <= 0) throw WindowTooSmall("window vanished during evolution");
  IncrementField out = make_increment_field(nb, d, eta.t + 1);

  if (d == 1) {
    const int lo = nb.lo[0], hi = nb.hi[0];
    const int src_lo = eta.box.lo[0];
    const auto& atoms = analysis.atoms(WalkKernel::P);
    const size_t na = atoms.size();
    int offs[16];
    double wts[16];
    const bool small = na <= 16;
    for (size_t i = 0; small && i < na; ++i) {
      offs[i] = atoms[i].offset[0];
      wts[i] = atoms[i].prob;
    }
    const double* src = eta.comp.data();
    double* dst = out.comp.data();
    // Consecutive sites share one noise value; draw each once.
    double xi_prev = sample_noise(noise, seed, replica, NoiseLane::Dynamics, out.t, lo - 1);
    for (int x = lo; x <= hi; ++x) {
      double acc = 0.0;
      const std::ptrdiff_t base = x - src_lo;
      if (small) {
        for (size_t i = 0; i < na; ++i) acc += wts[i] * src[base + offs[i]];
      } else {
        for (const auto& a : atoms) acc += a.prob * src[base + a.offset[0]];
      }
      double xi_x = sample_noise(noise, seed, replica, NoiseLane::Dynamics, out.t, x);
      dst[x - lo] = acc + xi_x - xi_prev;
      xi_prev = xi_x;
    }
    return out;
  }

  const std::int64_t vol = nb.volume();
  Site x = nb.lo;
  Site y(static_cast<size_t>(d));
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    double xi_x = sample_noise_at(noise, seed, replica, NoiseLane::Dynamics, out.t, x);
    for (int dir = 0; dir < d; ++dir) {
      double acc = 0.0;
      for (const auto& a : analysis.atoms(WalkKernel::P)) {
        for (int i = 0; i < d; ++i) y[i] = x[i] + a.offset[i];
        acc += a.prob * eta.at(dir, y);
      }
      Site xm = x;
      xm[static_cast<size_t>(dir)] -= 1;
      acc += xi_x - sample_noise_at(noise, seed, replica, NoiseLane::Dynamics, out.t, xm);
      out.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] = acc;
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] <= nb.hi[i]) break;
      x[i] = nb.lo[i];
    }
  }
  return out;
}

IncrementField evolve_increment(const IncrementField& eta0, const KernelAnalysis& analysis,
                                const NoiseModel& noise, std::uint64_t seed, std::uint32_t replica,
                                long t_final, const Box& eval_window) {
  const long steps = t_final - eta0.t;
  if (steps < 0) throw ConfigError("t_final before the field's time stamp");
  if (!eta0.box.covers(cone_window(analysis, eval_window, steps)))
    throw WindowTooSmall("initial window does not contain the light cone of the evaluation window");
  IncrementField cur = eta0;
  for (long s = 0; s < steps; ++s) cur = evolve_increment_step(cur, analysis, noise, seed, replica);
  IncrementField out = make_increment_field(eval_window, cur.dims, cur.t);
  const std::int64_t vol = eval_window.volume();
  Site x = eval_window.lo;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    for (int dir = 0; dir < cur.dims; ++dir)
      out.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] =
          cur.at(dir, x);
    for (int i = static_cast<int>(eval_window.lo.size()) - 1; i >= 0; --i) {
      if (++x[i] <= eval_window.hi[i]) break;
      x[i] = eval_window.lo[i];
    }
  }
  return out;
}

IncrementField height_to_increments(const HeightField& h) {
  const int d = h.box.dim();
  Box nb = h.box;
  for (int i = 0; i < d; ++i) nb.lo[i] += 1;
  IncrementField out = make_increment_field(nb, d, h.t);
  const std::int64_t vol = nb.volume();
  Site x = nb.lo;
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    for (int dir = 0; dir < d; ++dir) {
      Site xm = x;
      xm[static_cast<size_t>(dir)] -= 1;
      out.comp[static_cast<size_t>(dir) * static_cast<size_t>(vol) + static_cast<size_t>(idx)] =
          h.at(x) - h.at(xm);
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] <= nb.hi[i]) break;
      x[i] = nb.lo[i];
    }
  }
  return out;
}

HeightField increments_to_height(const IncrementField& eta, int anchor, double anchor_value) {
  if (eta.dims != 1) throw DimensionUnsupported("partial summation implemented for d=1");
  Box hb = eta.box;
  hb.lo[0] -= 1;
  HeightField h = make_field(hb, eta.t);
  const int lo = hb.lo[0], hi = hb.hi[0];
  if (anchor < lo || anchor > hi) throw ConfigError("anchor outside the window");
  h.values[static_cast<size_t>(anchor - lo)] = anchor_value;
  for (int x = anchor + 1; x <= hi; ++x)
    h.values[static_cast<size_t>(x - lo)] =
        h.values[static_cast<size_t>(x - 1 - lo)] + eta.comp[static_cast<size_t>(x - eta.box.lo[0])];
  for (int x = anchor - 1; x >= lo; --x)
    h.values[static_cast<size_t>(x - lo)] =
        h.values[static_cast<size_t>(x + 1 - lo)] - eta.comp[static_cast<size_t>(x + 1 - eta.box.lo[0])];
  return h;
}

double dual_evaluate(const HeightField& h0, const KernelAnalysis& analysis, const NoiseModel& noise,
                     std::uint64_t seed, std::uint32_t replica, long t, const Site& site) {
  const long steps = t - h0.t;
  if (steps < 0) throw ConfigError("t before the field's time stamp");
  if (!h0.box.covers(cone_window(analysis, point_box(site), steps)))
    throw WindowTooSmall("initial window does not contain the light cone of the site");
  const int d = analysis.dim();

  auto weighted_sum = [&](const LatticeDistribution& dist, auto&& value_at) -> double {
    // sum over y of dist(y - site) * value(y)
    double acc = 0.0;
    const std::int64_t vol = dist.box.volume();
    Site rel = dist.box.lo;
    Site y(static_cast<size_t>(d));
    for (std::int64_t idx = 0; idx < vol; ++idx) {
      double w = dist.probs[static_cast<size_t>(idx)];
      if (w != 0.0) {
        for (int i = 0; i < d; ++i) y[i] = site[i] + rel[i];
        acc += w * value_at(y);
      }
      for (int i = d - 1; i >= 0; --i) {
        if (++rel[i] <= dist.box.hi[i]) break;
        rel[i] = dist.box.lo[i];
      }
    }
    return acc;
  };

  auto pt = analysis.power(WalkKernel::P, static_cast<int>(steps));
  double acc = weighted_sum(*pt, [&](const Site& y) { return h0.at(y); });
  for (long k = 1; k <= steps; ++k) {
    auto pk = analysis.power(WalkKernel::P, static_cast<int>(steps - k));
    const long t_abs = h0.t + k;
    acc += weighted_sum(*pk, [&](const Site& y) {
      return sample_noise_at(noise, seed, replica, NoiseLane::Dynamics, t_abs, y);
    });
  }
  return acc;
}

double variance_flat(const KernelAnalysis& analysis, double sigma_xi_sq, long t) {
  std::vector<long> ts{t};
  return variance_flat_curve(analysis, sigma_xi_sq, ts)[0];
}

std::vector<double> variance_flat_curve(const KernelAnalysis& analysis, double sigma_xi_sq,
                                        const std::vector<long>& t_list) {
  std::vector<double> out(t_list.size(), 0.0);
  long t_max = 0;
  for (long t : t_list) t_max = std::max(t_max, t);
  const Site o = origin(analysis.dim());

  double acc = 0.0;
  if (analysis.dim() == 1) {
    BandPowerStream1D qs(analysis, WalkKernel::Q);
    for (long k = 0; k < t_max; ++k) {
      if (k > 0) qs.step();
      acc += qs.at(0);
      for (size_t i = 0; i < t_list.size(); ++i)
        if (t_list[i] == k + 1) out[i] = sigma_xi_sq * acc;
    }
    if (qs.lost_mass() > 1e-12)
      throw ResourceLimit("band stream lost too much mass; widen the band");
  } else {
    DensePowerStream qs(analysis, WalkKernel::Q);
    for (long k = 0; k < t_max; ++k) {
      if (k > 0) qs.step();
      acc += qs.at(o);
      for (size_t i = 0; i < t_list.size(); ++i)
        if (t_list[i] == k + 1) out[i] = sigma_xi_sq * acc;
    }
  }
  for (size_t i = 0; i < t_list.size(); ++i)
    if (t_list[i] == 0) out[i] = 0.0;
  return out;
}

}  // namespace harness
