#pragma once

#include "harness/errors.hpp"

namespace harness {

struct LimitParams {
  double sigma1_sq = 0.0;
  double sigma_xi_sq = 0.0;
  double rho0 = 0.0;
};

struct SpaceTimePoint {
  double t = 0.0;  // macroscopic time, >= 0
  double r = 0.0;  // macroscopic space
};

enum class Route { Closed, Integral };

// Centered Gaussian pdf/cdf with variance nu2; nu2 = 0 degenerates to the
// point mass at 0.
double gaussian_pdf(double nu2, double x);
double gaussian_cdf(double nu2, double x);

// Psi_{nu2}(x) = nu2 phi_{nu2}(x) - x (1 - Phi_{nu2}(x)); Psi_0(x) = max(-x, 0)
// by continuity.
double psi(double nu2, double x);

// Gamma_1((s,q),(t,r)) = Psi_{s1(t+s)}(r-q) - Psi_{s1|t-s|}(r-q), or the
// equivalent heat-kernel time integral.
double gamma1(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq,
              Route route = Route::Closed);

// Gamma_2((s,q),(t,r)) = Psi_{s1 s}(-q) + Psi_{s1 t}(r) - Psi_{s1(t+s)}(r-q),
// or the two-sided Brownian-tail product integral.
double gamma2(const SpaceTimePoint& a, const SpaceTimePoint& b, double sigma1_sq,
              Route route = Route::Closed);

// Limit covariance (sigma_xi^2/sigma_1^2) Gamma_1 + rho_0 Gamma_2.
double z_cov(const LimitParams& params, const SpaceTimePoint& a, const SpaceTimePoint& b);

// Stationary-start special case: sigma_xi^2/sqrt(2 pi sigma_1^2) *
// (sqrt(s) + sqrt(t) - sqrt|t-s|); requires rho0 == sigma_xi^2/sigma_1^2.
double fbm_cov(const LimitParams& params, double s, double t);

}  // namespace harness
