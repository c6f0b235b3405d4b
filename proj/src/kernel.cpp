#include "harness/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "harness/quadrature.hpp"

namespace harness {
namespace {

// Hermite-style integer row reduction: true iff the integer lattice spanned
// by the rows is all of Z^d (full rank and unit-determinant triangular basis).
bool spans_integer_lattice(std::vector<std::vector<std::int64_t>> rows, int d) {
  int pivot_row = 0;
  for (int col = 0; col < d; ++col) {
    // Euclidean elimination within this column.
    for (;;) {
      int best = -1;
      std::int64_t best_abs = 0;
      for (int r = pivot_row; r < static_cast<int>(rows.size()); ++r) {
        std::int64_t v = std::abs(rows[r][col]);
        if (v != 0 && (best == -1 || v < best_abs)) {
          best = r;
          best_abs = v;
        }
      }
      if (best == -1) return false;  // rank deficient
      std::swap(rows[pivot_row], rows[best]);
      bool reduced_all = true;
      for (int r = pivot_row + 1; r < static_cast<int>(rows.size()); ++r) {
        if (rows[r][col] == 0) continue;
        std::int64_t m = rows[r][col] / rows[pivot_row][col];
        for (int c = 0; c < d; ++c) rows[r][c] -= m * rows[pivot_row][c];
        if (rows[r][col] != 0) reduced_all = false;
      }
      if (reduced_all) break;
    }
    ++pivot_row;
  }
  // Determinant of the triangular basis = product of pivots; lattice == Z^d
  // iff |det| == 1.
  std::int64_t det = 1;
  // Re-run to collect pivots: rows is already echelon-ish; pivot for column c
  // sits in row c.
  for (int c = 0; c < d; ++c) det *= rows[c][c];
  return std::abs(det) == 1;
}

LatticeDistribution delta0(int d) {
  LatticeDistribution out;
  out.box = point_box(origin(d));
  out.probs = {1.0};
  out.k = 0;
  return out;
}

Box support_box(const std::vector<KernelAtom>& atoms, int d) {
  Box b{Site(static_cast<size_t>(d)), Site(static_cast<size_t>(d))};
  for (int i = 0; i < d; ++i) {
    b.lo[i] = b.hi[i] = atoms[0].offset[i];
  }
  for (const auto& a : atoms)
    for (int i = 0; i < d; ++i) {
      b.lo[i] = std::min(b.lo[i], a.offset[i]);
      b.hi[i] = std::max(b.hi[i], a.offset[i]);
    }
  return b;
}

LatticeDistribution convolve_once(const LatticeDistribution& in, const std::vector<KernelAtom>& atoms,
                                  int d, std::int64_t max_cells) {
  LatticeDistribution out;
  out.box = in.box.dilated(support_box(atoms, d));
  if (out.box.volume() > max_cells)
    throw ResourceLimit("power table would exceed the configured cell cap");
  out.probs.assign(static_cast<size_t>(out.box.volume()), 0.0);
  out.k = in.k + 1;

  // Scatter: out(x + off) += w * in(x). Walk source cells with a d-dim
  // counter, tracking the flattened target index incrementally per atom.
  const std::int64_t vol = in.box.volume();
  Site x = in.box.lo;
  Site shifted(static_cast<size_t>(d));
  for (std::int64_t idx = 0; idx < vol; ++idx) {
    double v = in.probs[static_cast<size_t>(idx)];
    if (v != 0.0) {
      for (const auto& a : atoms) {
        for (int i = 0; i < d; ++i) shifted[i] = x[i] + a.offset[i];
        out.probs[static_cast<size_t>(out.box.flatten(shifted))] += a.prob * v;
      }
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++x[i] <= in.box.hi[i]) break;
      x[i] = in.box.lo[i];
    }
  }
  return out;
}

}  // namespace

KernelAnalysis validate_kernel(const KernelSpec& spec, const KernelLimits& limits) {
  if (spec.d < 1) throw ConfigError("kernel dimension must be >= 1");
  if (spec.support.empty())
    throw RejectedKernel(KernelReject::NotProbability, "empty support");
  double total = 0.0;
  std::set<Site> seen;
  int range = 0;
  for (const auto& a : spec.support) {
    if (static_cast<int>(a.offset.size()) != spec.d)
      throw ConfigError("offset arity does not match kernel dimension");
    if (!(a.prob > 0.0) || !(a.prob < 1.0))
      throw RejectedKernel(KernelReject::NotProbability, "probability outside (0,1)");
    if (!seen.insert(a.offset).second)
      throw RejectedKernel(KernelReject::NotProbability, "duplicate offset");
    total += a.prob;
    for (int c : a.offset) range = std::max(range, std::abs(c));
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw RejectedKernel(KernelReject::NotProbability, "probabilities do not sum to 1");
  if (spec.declared_range && range > *spec.declared_range)
    throw RejectedKernel(KernelReject::RangeExceeded, "support outside declared range");
  if (spec.support.size() < 2)
    throw RejectedKernel(KernelReject::Degenerate, "single-point support");

  // Strong aperiodicity: the lattice generated by {x - x0 : p(x) > 0} must be
  // all of Z^d, independently of the base point x0.
  std::vector<std::vector<std::int64_t>> diffs;
  const Site& base = spec.support.front().offset;
  for (size_t i = 1; i < spec.support.size(); ++i) {
    std::vector<std::int64_t> row(static_cast<size_t>(spec.d));
    for (int c = 0; c < spec.d; ++c) row[static_cast<size_t>(c)] = spec.support[i].offset[c] - base[c];
    diffs.push_back(std::move(row));
  }
  if (diffs.size() < static_cast<size_t>(spec.d) || !spans_integer_lattice(diffs, spec.d))
    throw RejectedKernel(KernelReject::NotStronglyAperiodic,
                         "translated support does not generate Z^d");

  KernelAnalysis out;
  out.spec_ = spec;
  out.range_ = range;
  out.limits_ = limits;
  out.mean_.assign(static_cast<size_t>(spec.d), 0.0);
  for (const auto& a : spec.support)
    for (int c = 0; c < spec.d; ++c) out.mean_[static_cast<size_t>(c)] += a.prob * a.offset[c];
  if (spec.d == 1) {
    double var = 0.0;
    for (const auto& a : spec.support) {
      double dx = a.offset[0] - out.mean_[0];
      var += a.prob * dx * dx;
    }
    out.sigma1sq_ = var;
    if (!(var > 0.0)) throw RejectedKernel(KernelReject::ZeroVariance, "sigma1^2 == 0 in d=1");
  }

  // q(w) = sum_z p(z) p(z + w): the law of the difference of two p-steps.
  std::map<Site, double> q;
  for (const auto& a : spec.support)
    for (const auto& b : spec.support) {
      Site w(static_cast<size_t>(spec.d));
      for (int c = 0; c < spec.d; ++c) w[static_cast<size_t>(c)] = b.offset[c] - a.offset[c];
      q[w] += a.prob * b.prob;
    }
  for (auto& [w, prob] : q) out.q_support_.push_back(KernelAtom{w, prob});
  return out;
}

double KernelAnalysis::sigma1sq() const {
  if (spec_.d != 1) throw DimensionUnsupported("sigma1^2 is a d=1 quantity");
  return sigma1sq_;
}

std::shared_ptr<const LatticeDistribution> KernelAnalysis::power(WalkKernel which, int k) const {
  if (k < 0) throw ConfigError("negative power");
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& table = cache_->table[which == WalkKernel::P ? 0 : 1];
  auto it = table.find(k);
  if (it != table.end()) return it->second;
  if (table.empty()) {
    auto d0 = std::make_shared<const LatticeDistribution>(delta0(spec_.d));
    table.emplace(0, d0);
    ++cache_->cells;
  }
  // Extend from the highest power already built.
  int from = 0;
  for (const auto& [kk, dist] : table)
    if (kk <= k) from = std::max(from, kk);
  auto cur = table.at(from);
  const auto& at = atoms(which);
  for (int j = from + 1; j <= k; ++j) {
    auto next = std::make_shared<const LatticeDistribution>(
        convolve_once(*cur, at, spec_.d, limits_.max_cells_per_table));
    cache_->cells += next->box.volume();
    if (cache_->cells > limits_.max_cached_cells)
      throw ResourceLimit("power cache exceeds the configured cell cap");
    table.emplace(j, next);
    cur = next;
  }
  return cur;
}

std::complex<double> KernelAnalysis::char_fn(WalkKernel which, const std::vector<double>& theta) const {
  if (static_cast<int>(theta.size()) != spec_.d) throw ConfigError("theta arity mismatch");
  std::complex<double> acc = 0.0;
  for (const auto& a : atoms(which)) {
    double phase = 0.0;
    for (int c = 0; c < spec_.d; ++c) phase += theta[static_cast<size_t>(c)] * a.offset[c];
    acc += a.prob * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

double KernelAnalysis::one_minus_phi_q(const std::vector<double>& theta) const {
  double acc = 0.0;
  for (const auto& a : q_support_) {
    double phase = 0.0;
    for (int c = 0; c < spec_.d; ++c) phase += theta[static_cast<size_t>(c)] * a.offset[c];
    double s = std::sin(0.5 * phase);
    acc += a.prob * 2.0 * s * s;
  }
  return acc;
}

double KernelAnalysis::potential_a(long x, double abs_tol) const {
  if (spec_.d != 1) throw DimensionUnsupported("potential kernel a(x) implemented for d=1");
  if (x == 0) return 0.0;
  const double xd = static_cast<double>(x);
  const double limit0 = xd * xd / sigma_qsq();
  auto integrand = [&](double th) -> double {
    if (th == 0.0) return limit0;
    double s = std::sin(0.5 * xd * th);
    double num = 2.0 * s * s;
    double den = one_minus_phi_q({th});
    return num / den;
  };
  constexpr double kPi = 3.14159265358979323846;
  // Integrand is even; oscillation scale is 1/|x|, so seed splits there.
  std::vector<double> splits;
  int pieces = std::min<long>(64, std::abs(x));
  for (int i = 1; i < pieces; ++i) splits.push_back(kPi * i / pieces);
  double val = integrate_split(integrand, 0.0, kPi, splits, abs_tol * kPi / 2.0);
  return val / kPi;
}

std::shared_ptr<const LatticeDistribution> convolve_power(const KernelAnalysis& analysis,
                                                          WalkKernel which, int k) {
  return analysis.power(which, k);
}

// --- streams -----------------------------------------------------------------

DensePowerStream::DensePowerStream(const KernelAnalysis& analysis, WalkKernel which,
                                   std::int64_t max_cells)
    : analysis_(analysis), atoms_(analysis.atoms(which)), dist_(delta0(analysis.dim())),
      max_cells_(max_cells) {}

void DensePowerStream::step() { dist_ = convolve_once(dist_, atoms_, analysis_.dim(), max_cells_); }

BandPowerStream1D::BandPowerStream1D(std::vector<long> offsets, std::vector<double> weights,
                                     double band_factor)
    : offs_(std::move(offsets)), wts_(std::move(weights)), band_factor_(band_factor) {
  mean_step_ = 0.0;
  for (size_t i = 0; i < offs_.size(); ++i) mean_step_ += wts_[i] * static_cast<double>(offs_[i]);
  values_ = {1.0};
  lo_ = 0;
}

BandPowerStream1D::BandPowerStream1D(const KernelAnalysis& analysis, WalkKernel which,
                                     double band_factor)
    : BandPowerStream1D(
          [&] {
            if (analysis.dim() != 1) throw DimensionUnsupported("band stream is d=1");
            std::vector<long> o;
            for (const auto& a : analysis.atoms(which)) o.push_back(a.offset[0]);
            return o;
          }(),
          [&] {
            std::vector<double> w;
            for (const auto& a : analysis.atoms(which)) w.push_back(a.prob);
            return w;
          }(),
          band_factor) {}

void BandPowerStream1D::step() {
  long min_off = *std::min_element(offs_.begin(), offs_.end());
  long max_off = *std::max_element(offs_.begin(), offs_.end());
  long new_lo = lo_ + min_off;
  long new_hi = lo_ + static_cast<long>(values_.size()) - 1 + max_off;
  scratch_.assign(static_cast<size_t>(new_hi - new_lo + 1), 0.0);
  for (size_t j = 0; j < offs_.size(); ++j) {
    const long shift = offs_[j] - new_lo + lo_;
    const double w = wts_[j];
    for (size_t i = 0; i < values_.size(); ++i) scratch_[static_cast<size_t>(shift) + i] += w * values_[i];
  }
  ++k_;
  // Clip to the drift-centred band, tracking the discarded mass exactly.
  const long max_step = std::max(std::abs(min_off), std::abs(max_off));
  long radius =
      static_cast<long>(std::ceil(band_factor_ * max_step * std::sqrt(static_cast<double>(k_)))) +
      2 * max_step;
  long center = std::lround(mean_step_ * k_);
  long keep_lo = std::max(new_lo, center - radius);
  long keep_hi = std::min(new_hi, center + radius);
  for (long x = new_lo; x < keep_lo; ++x) lost_ += scratch_[static_cast<size_t>(x - new_lo)];
  for (long x = keep_hi + 1; x <= new_hi; ++x) lost_ += scratch_[static_cast<size_t>(x - new_lo)];
  values_.assign(scratch_.begin() + (keep_lo - new_lo), scratch_.begin() + (keep_hi - new_lo + 1));
  lo_ = keep_lo;
}

double BandPowerStream1D::at(long x) const {
  long idx = x - lo_;
  if (idx < 0 || idx >= static_cast<long>(values_.size())) return 0.0;
  return values_[static_cast<size_t>(idx)];
}

// --- derived -----------------------------------------------------------------

PotentialPartial potential_partial(const KernelAnalysis& analysis, const std::vector<long>& xs,
                                   int K) {
  PotentialPartial out;
  out.values.assign(xs.size(), 0.0);
  if (analysis.dim() == 1) {
    BandPowerStream1D qs(analysis, WalkKernel::Q);
    for (int k = 0; k <= K; ++k) {
      if (k > 0) qs.step();
      double center = qs.at(0);
      for (size_t i = 0; i < xs.size(); ++i) out.values[i] += center - qs.at(xs[i]);
    }
    out.lost_mass = qs.lost_mass();
    return out;
  }
  if (analysis.dim() == 2) {
    // Diagnostic only: dense stream, slow convergence.
    DensePowerStream qs(analysis, WalkKernel::Q);
    Site o = origin(2);
    for (int k = 0; k <= K; ++k) {
      if (k > 0) qs.step();
      double center = qs.at(o);
      for (size_t i = 0; i < xs.size(); ++i) {
        Site x{static_cast<int>(xs[i]), 0};
        out.values[i] += center - qs.at(x);
      }
    }
    return out;
  }
  throw DimensionUnsupported("potential partial sums provided for d<=2");
}

namespace {

// q factorizes as a product over axes iff q(w) == prod_i marginal_i(w_i) on
// its support; convolution powers then factor the same way.
bool product_marginals(const KernelAnalysis& analysis, std::vector<std::map<long, double>>& marg) {
  const int d = analysis.dim();
  marg.assign(static_cast<size_t>(d), {});
  for (const auto& a : analysis.atoms(WalkKernel::Q))
    for (int i = 0; i < d; ++i) marg[static_cast<size_t>(i)][a.offset[i]] += a.prob;
  for (const auto& a : analysis.atoms(WalkKernel::Q)) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i) prod *= marg[static_cast<size_t>(i)].at(a.offset[i]);
    if (std::abs(prod - a.prob) > 1e-13) return false;
  }
  return true;
}

}  // namespace

GreenResult green_function(const KernelAnalysis& analysis, const Site& x, int K) {
  const int d = analysis.dim();
  if (d < 3) throw DimensionUnsupported("green function requires d>=3 (transient q-walk)");
  GreenResult out;
  out.terms = K + 1;
  // q^k(x,0) <= q^k(0,0) (phi_q >= 0), so fitting the origin terms bounds the
  // tail at every x, including sites not yet reachable at k <= K.
  std::vector<double> origin_terms;
  const int watch = 24;
  const Site o = origin(d);

  std::vector<std::map<long, double>> marg;
  if (product_marginals(analysis, marg)) {
    // Per-axis 1-d band streams; q^k(x) is the product of axis marginals.
    std::vector<BandPowerStream1D> axes;
    axes.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      std::vector<long> offs;
      std::vector<double> wts;
      for (const auto& [off, pr] : marg[static_cast<size_t>(i)]) {
        offs.push_back(off);
        wts.push_back(pr);
      }
      axes.emplace_back(std::move(offs), std::move(wts));
    }
    for (int k = 0; k <= K; ++k) {
      if (k > 0)
        for (auto& s : axes) s.step();
      double term = 1.0;
      double center = 1.0;
      for (int i = 0; i < d; ++i) {
        term *= axes[static_cast<size_t>(i)].at(x[static_cast<size_t>(i)]);
        center *= axes[static_cast<size_t>(i)].at(0);
      }
      out.value += term;
      if (k > K - watch) origin_terms.push_back(center);
    }
  } else {
    DensePowerStream qs(analysis, WalkKernel::Q, 400'000'000);
    for (int k = 0; k <= K; ++k) {
      if (k > 0) qs.step();
      out.value += qs.at(x);
      if (k > K - watch) origin_terms.push_back(qs.at(o));
    }
  }

  // Tail bound: fit C k^{-d/2} to the last origin terms (conservative max)
  // and sum the fitted tail analytically.
  double c_fit = 0.0;
  for (size_t i = 0; i < origin_terms.size(); ++i) {
    double kk = static_cast<double>(K - static_cast<int>(origin_terms.size()) + 1 + static_cast<int>(i));
    c_fit = std::max(c_fit, origin_terms[i] * std::pow(kk, 0.5 * d));
  }
  c_fit *= 1.25;  // slack for the slowly increasing prefactor
  out.tail_bound = c_fit * std::pow(static_cast<double>(K), 1.0 - 0.5 * d) / (0.5 * d - 1.0);
  return out;
}

LocalCltResult local_clt_sum(const KernelAnalysis& analysis, WalkKernel which, double t, double a,
                             long n) {
  if (analysis.dim() != 1) throw DimensionUnsupported("local CLT sum is d=1");
  LocalCltResult out;
  const long steps = static_cast<long>(std::floor(static_cast<double>(n) * t));
  const long a_n = static_cast<long>(std::floor(a * std::sqrt(static_cast<double>(n))));
  const double mu = (which == WalkKernel::P) ? analysis.mean1() : 0.0;
  const double sigma_sq = (which == WalkKernel::P) ? analysis.sigma1sq() : analysis.sigma_qsq();

  BandPowerStream1D s(analysis, which);
  double acc = 0.0;
  for (long k = 0; k < steps; ++k) {
    if (k > 0) s.step();
    long target = a_n + static_cast<long>(std::floor(mu * static_cast<double>(k)));
    acc += s.at(target);
  }
  out.lhs = acc / std::sqrt(static_cast<double>(n));

  // (1/sigma^2) int_0^{sigma^2 t} (2 pi v)^{-1/2} exp(-a^2/2v) dv, v = w^2.
  const double upper = std::sqrt(sigma_sq * t);
  const double aa = a * a;
  auto integrand = [&](double w) -> double {
    if (w <= 0.0) return aa == 0.0 ? 1.0 : 0.0;
    return std::exp(-aa / (2.0 * w * w));
  };
  constexpr double kSqrt2Pi = 2.50662827463100050242;
  out.rhs = 2.0 / kSqrt2Pi * integrate(integrand, 0.0, upper, 1e-12) / sigma_sq;
  return out;
}

std::vector<double> l1_discrete_derivative(const KernelAnalysis& analysis,
                                           const std::vector<int>& t_list) {
  const int d = analysis.dim();
  std::vector<double> out;
  out.reserve(t_list.size());
  DensePowerStream ps(analysis, WalkKernel::P);
  int target_idx = 0;
  for (int k = 0; target_idx < static_cast<int>(t_list.size()); ++k) {
    if (k > 0) ps.step();
    if (k == t_list[static_cast<size_t>(target_idx)]) {
      const auto& dist = ps.dist();
      double acc = 0.0;
      const std::int64_t vol = dist.box.volume();
      Site x = dist.box.lo;
      Site xm(static_cast<size_t>(d));
      for (std::int64_t idx = 0; idx < vol; ++idx) {
        // Include x just outside the box on the high side via the sweep over
        // the box plus its +e_l shift; handled by iterating the dilated box.
        for (int l = 0; l < d; ++l) {
          xm = x;
          xm[static_cast<size_t>(l)] -= 1;
          acc += std::abs(dist.probs[static_cast<size_t>(idx)] - dist.at_or_zero(xm));
        }
        for (int i = d - 1; i >= 0; --i) {
          if (++x[i] <= dist.box.hi[i]) break;
          x[i] = dist.box.lo[i];
        }
      }
      // Cells one step past the high edge contribute |0 - p(x-e_l)|.
      for (int l = 0; l < d; ++l) {
        Box face = dist.box;
        face.lo[static_cast<size_t>(l)] = face.hi[static_cast<size_t>(l)];
        const std::int64_t fvol = face.volume();
        Site y = face.lo;
        for (std::int64_t idx = 0; idx < fvol; ++idx) {
          acc += std::abs(dist.at_or_zero(y));
          for (int i = d - 1; i >= 0; --i) {
            if (++y[i] <= face.hi[i]) break;
            y[i] = face.lo[i];
          }
        }
      }
      out.push_back(acc);
      ++target_idx;
    }
  }
  return out;
}

}  // namespace harness
