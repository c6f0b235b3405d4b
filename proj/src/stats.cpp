#include "harness/stats.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace harness {

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(n - 1);
}

double variance_stderr_jackknife(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("jackknife needs >= 3 samples");
  double s1 = 0.0, s2 = 0.0;
  for (double x : xs) {
    s1 += x;
    s2 += x * x;
  }
  // Delete-one variance from the running sums.
  std::vector<double> loo(n);
  const double nm1 = static_cast<double>(n - 1);
  for (std::size_t r = 0; r < n; ++r) {
    double t1 = s1 - xs[r];
    double t2 = s2 - xs[r] * xs[r];
    double m = t1 / nm1;
    loo[r] = (t2 - nm1 * m * m) / (nm1 - 1.0);
  }
  double lbar = mean(loo);
  double acc = 0.0;
  for (double v : loo) acc += (v - lbar) * (v - lbar);
  return std::sqrt(nm1 / static_cast<double>(n) * acc);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

CovMatrix covariance_jackknife(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n < 3) throw std::invalid_argument("jackknife needs >= 3 replicas");
  const std::size_t p = rows[0].size();
  std::vector<double> s1(p, 0.0), s2(p * p, 0.0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < p; ++i) {
      s1[i] += row[i];
      for (std::size_t j = 0; j < p; ++j) s2[i * p + j] += row[i] * row[j];
    }
  }
  auto cov_from_sums = [&](const std::vector<double>& t1, const std::vector<double>& t2, double m) {
    std::vector<double> c(p * p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        c[i * p + j] = (t2[i * p + j] - t1[i] * t1[j] / m) / (m - 1.0);
    return c;
  };

  CovMatrix out;
  out.dim = p;
  out.cov = cov_from_sums(s1, s2, static_cast<double>(n));

  // Leave-one-out replicates from the same running sums.
  std::vector<double> acc(p * p, 0.0), bar(p * p, 0.0);
  std::vector<std::vector<double>> loo(n);
  std::vector<double> t1(p), t2(p * p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      t1[i] = s1[i] - rows[r][i];
      for (std::size_t j = 0; j < p; ++j) t2[i * p + j] = s2[i * p + j] - rows[r][i] * rows[r][j];
    }
    loo[r] = cov_from_sums(t1, t2, static_cast<double>(n - 1));
    for (std::size_t k = 0; k < p * p; ++k) bar[k] += loo[r][k];
  }
  for (std::size_t k = 0; k < p * p; ++k) bar[k] /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < p * p; ++k) acc[k] += (loo[r][k] - bar[k]) * (loo[r][k] - bar[k]);
  out.stderr_.resize(p * p);
  const double fac = static_cast<double>(n - 1) / static_cast<double>(n);
  for (std::size_t k = 0; k < p * p; ++k) out.stderr_[k] = std::sqrt(fac * acc[k]);
  return out;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  // Cyclic Jacobi; fine for the small Gram matrices used in tests.
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (std::size_t pq = 0; pq < n; ++pq)
      for (std::size_t q = pq + 1; q < n; ++q) {
        std::size_t pp = pq;
        double apq = at(pp, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (at(q, q) - at(pp, pp)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = at(k, pp), akq = at(k, q);
          at(k, pp) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = at(pp, k), aqk = at(q, k);
          at(pp, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  return ev;
}

}  // namespace harness
