#include "harness/limitcov.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "harness/quadrature.hpp"

namespace harness {
namespace {
constexpr double kSqrt2Pi = 2.50662827463100050242;
constexpr double kSqrt2 = 1.41421356237309504880;

// Both kernels are symmetric in their two points (via the reflection
// identity of psi); fixing a canonical order makes the symmetry bit-exact.
void canonicalize(SpaceTimePoint& a, SpaceTimePoint& b) {
  if (b.t < a.t || (b.t == a.t && b.r < a.r)) std::swap(a, b);
}
}  // namespace

double gaussian_pdf(double nu2, double x) {
  if (nu2 <= 0.0) return 0.0;
  return std::exp(-x * x / (2.0 * nu2)) / (kSqrt2Pi * std::sqrt(nu2));
}

double gaussian_cdf(double nu2, double x) {
  if (nu2 <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
  // erfc keeps the far tails accurate where 1 - Phi cancels.
  return 0.5 * std::erfc(-x / (kSqrt2 * std::sqrt(nu2)));
}

double psi(double nu2, double x) {
  if (nu2 < 0.0) throw ConfigError("negative variance in psi");
  if (nu2 == 0.0) return x < 0.0 ? -x : 0.0;
  const double upper_tail = 0.5 * std::erfc(x / (kSqrt2 * std::sqrt(nu2)));
  return nu2 * gaussian_pdf(nu2, x) - x * upper_tail;
}

double gamma1(const SpaceTimePoint& a_in, const SpaceTimePoint& b_in, double sigma1_sq, Route route) {
  if (a_in.t < 0.0 || b_in.t < 0.0) throw ConfigError("negative time");
  SpaceTimePoint a = a_in, b = b_in;
  canonicalize(a, b);
  const double s = a.t, q = a.r, t = b.t, r = b.r;
  const double x = r - q;
  const double v_lo = sigma1_sq * std::abs(t - s);
  const double v_hi = sigma1_sq * (t + s);
  if (route == Route::Closed) return psi(v_hi, x) - psi(v_lo, x);

  // (1/2) int_{v_lo}^{v_hi} (2 pi v)^{-1/2} exp(-x^2/2v) dv, with v = w^2 so
  // the v^{-1/2} weight disappears.
  const double xx = x * x;
  auto f = [&](double w) -> double {
    if (w <= 0.0) return xx == 0.0 ? 1.0 : 0.0;
    return std::exp(-xx / (2.0 * w * w));
  };
  return integrate(f, std::sqrt(v_lo), std::sqrt(v_hi), 1e-12) / kSqrt2Pi;
}

double gamma2(const SpaceTimePoint& a_in, const SpaceTimePoint& b_in, double sigma1_sq, Route route) {
  if (a_in.t < 0.0 || b_in.t < 0.0) throw ConfigError("negative time");
  SpaceTimePoint a = a_in, b = b_in;
  canonicalize(a, b);
  const double s = a.t, q = a.r, t = b.t, r = b.r;
  const double vs = sigma1_sq * s;
  const double vt = sigma1_sq * t;
  if (route == Route::Closed) return psi(vs, -q) + psi(vt, r) - psi(vs + vt, r - q);

  // int_{-inf}^0 P(B_vs > q-x) P(B_vt > r-x) dx + int_0^inf P(B_vs <= q-x) P(B_vt <= r-x) dx;
  // truncated where the Gaussian tails are below the tolerance scale.
  const double reach = std::abs(q) + std::abs(r) + 8.0 * std::sqrt(vs + vt) + 1.0;
  auto lower_tail = [&](double v, double y) { return gaussian_cdf(v, y); };
  auto upper_tail = [&](double v, double y) { return v <= 0.0 ? (y < 0.0 ? 1.0 : 0.0) : 1.0 - gaussian_cdf(v, y); };
  auto f_neg = [&](double x) { return upper_tail(vs, q - x) * upper_tail(vt, r - x); };
  auto f_pos = [&](double x) { return lower_tail(vs, q - x) * lower_tail(vt, r - x); };
  // Degenerate times make step-function kinks at x = q and x = r.
  std::vector<double> kinks{q, r};
  double acc = integrate_split(f_neg, -reach, 0.0, kinks, 5e-9);
  acc += integrate_split(f_pos, 0.0, reach, kinks, 5e-9);
  return acc;
}

double z_cov(const LimitParams& params, const SpaceTimePoint& a, const SpaceTimePoint& b) {
  return params.sigma_xi_sq / params.sigma1_sq * gamma1(a, b, params.sigma1_sq) +
         params.rho0 * gamma2(a, b, params.sigma1_sq);
}

double fbm_cov(const LimitParams& params, double s, double t) {
  const double rho_stationary = params.sigma_xi_sq / params.sigma1_sq;
  if (std::abs(params.rho0 - rho_stationary) > 1e-12 * std::abs(rho_stationary))
    throw ConfigError("fbm covariance requires rho0 == sigma_xi^2/sigma_1^2");
  if (s < 0.0 || t < 0.0) throw ConfigError("negative time");
  return params.sigma_xi_sq / std::sqrt(2.0 * M_PI * params.sigma1_sq) *
         (std::sqrt(s) + std::sqrt(t) - std::sqrt(std::abs(t - s)));
}

}  // namespace harness
