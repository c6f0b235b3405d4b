#include <doctest.h>

#include <cmath>

#include "harness/invariant.hpp"
#include "harness/stats.hpp"
#include "helpers.hpp"

using namespace harness;
using namespace testutil;

TEST_SUITE("invariant") {

TEST_CASE("V0 routes: lazy-kernel special values") {
  const KernelAnalysis& k = lazy();
  // V0(0,0) = 2 sigma_xi^2 a(1) = 4 sigma_xi^2; off-origin values vanish.
  CHECK(v0(k, 1.0, 0, V0Method::Fourier) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(v0(k, 1.0, 0, V0Method::KernelA) == doctest::Approx(4.0).epsilon(1e-9));
  for (long x : {1L, 2L, 5L}) {
    CHECK(std::abs(v0(k, 1.0, x, V0Method::Fourier)) < 1e-8);
    CHECK(std::abs(v0(k, 1.0, x, V0Method::KernelA)) < 1e-8);
  }
  CHECK(v0(k, 2.5, 0, V0Method::Fourier) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("V0 routes agree for a correlated kernel") {
  const KernelAnalysis& k = skewed();
  for (long x = -10; x <= 10; ++x) {
    double vf = v0(k, 1.0, x, V0Method::Fourier);
    double vk = v0(k, 1.0, x, V0Method::KernelA);
    CHECK(std::abs(vf - vk) < 1e-6);
    // Symmetry in x.
    CHECK(vf == doctest::Approx(v0(k, 1.0, -x, V0Method::Fourier)).epsilon(1e-9));
  }
}

TEST_CASE("V0 sum rule and exponential decay") {
  for (const KernelAnalysis* k : {&lazy(), &skewed()}) {
    double sum = 0.0;
    for (long x = -60; x <= 60; ++x) sum += v0(*k, 1.0, x, V0Method::Fourier);
    CHECK(std::abs(sum - 1.0 / k->sigma1sq()) < 1e-6);
    CHECK(std::abs(v0(*k, 1.0, 60, V0Method::Fourier)) < 1e-9);
  }
  // log|V0| decays linearly in x for the correlated kernel.
  const KernelAnalysis& k = skewed();
  std::vector<double> xs, ls;
  for (long x = 2; x <= 20; ++x) {
    double v = std::abs(v0(k, 1.0, x, V0Method::Fourier));
    if (v > 1e-300) {
      xs.push_back(static_cast<double>(x));
      ls.push_back(std::log(v));
    }
  }
  REQUIRE(xs.size() >= 8);
  CHECK(ls_slope(xs, ls) < 0.0);
}

TEST_CASE("series tail: decreasing, matches V0 - V0_truncated") {
  const KernelAnalysis& k = lazy();
  double t64 = potential_tail_after(k, 64);
  double t256 = potential_tail_after(k, 256);
  double t1024 = potential_tail_after(k, 1024);
  CHECK(t256 < t64);
  CHECK(t1024 < t256);
  // Lazy closed form: tail(K) = sum_{k>K} C(2k,k)/4^k / (k+1) ~ 2/sqrt(pi K).
  CHECK(t1024 == doctest::Approx(2.0 / std::sqrt(3.14159265358979 * 1024.0)).epsilon(0.01));

  // 2 sigma^2 tail(K) = V0(0,0) - V0_K(0,0).
  double lhs = 2.0 * 1.0 * potential_tail_after(k, 128);
  double rhs = v0(k, 1.0, 0) - v0_truncated(k, 1.0, 0, 128);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("default depth meets the tail rule") {
  const KernelAnalysis& k = lazy();
  int K = StationarySampler::default_depth(k, 1e-2);
  double a1 = k.potential_a(1);
  CHECK(potential_tail_after(k, K) <= 1e-2 * a1);
  CHECK(potential_tail_after(k, K / 2) > 1e-2 * a1);
}

TEST_CASE("depth-0 sampler is the bare noise gradient") {
  const KernelAnalysis& k = lazy();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 0;
  cfg.gaussian_closure = false;
  StationarySampler s(k, noise, cfg);
  IncrementField eta = s.sample(-3, 3, 42, 9);
  for (int x = -3; x <= 3; ++x) {
    double expect = sample_noise(noise, 42, 9, NoiseLane::Dynamics, 0, x) -
                    sample_noise(noise, 42, 9, NoiseLane::Dynamics, 0, x - 1);
    CHECK(eta.at(0, Site{x}) == doctest::Approx(expect).epsilon(1e-15));
  }
  // Only the k=0 layer is kept: tail = 2 sigma^2 (a(1) - 1) = 2 for lazy.
  CHECK(s.tail_bound() == doctest::Approx(2.0 * (k.potential_a(1) - 1.0)).epsilon(1e-6));
}

TEST_CASE("bare truncated sampler matches its exact covariance") {
  const KernelAnalysis& k = skewed();
  NoiseModel noise = NoiseModel::uniform(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 192;
  cfg.gaussian_closure = false;  // non-Gaussian noise: bare series only
  StationarySampler s(k, noise, cfg);
  CHECK_FALSE(s.closed());
  CHECK(s.tail_bound() == doctest::Approx(2.0 * potential_tail_after(k, 192)).epsilon(1e-10));

  const int R = 8000;
  LagCovariance lc = pi0_lag_covariance(s, 3, R, 505, 2);
  for (int x = 0; x <= 3; ++x) {
    double expect = v0_truncated(k, 1.0, x, 192);
    CHECK(std::abs(lc.est[static_cast<size_t>(x)] - expect) <
          3.0 * lc.stderr_[static_cast<size_t>(x)]);
  }
}

TEST_CASE("closed sampler reproduces the stationary covariance") {
  const KernelAnalysis& k = lazy();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 127;
  StationarySampler s(k, noise, cfg);
  CHECK(s.closed());
  CHECK(s.tail_bound() < 1e-3 * v0(k, 1.0, 0));

  const int R = 20000;
  LagCovariance lc = pi0_lag_covariance(s, 3, R, 777, 2);
  CHECK(std::abs(lc.est[0] - 4.0) < 3.0 * lc.stderr_[0]);
  for (int x = 1; x <= 3; ++x)
    CHECK(std::abs(lc.est[static_cast<size_t>(x)]) < 3.0 * lc.stderr_[static_cast<size_t>(x)]);
}

TEST_CASE("one evolution step leaves the closed sampler's covariances flat") {
  const KernelAnalysis& k = lazy();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 127;
  StationarySampler s(k, noise, cfg);

  const int R = 12000;
  const int L = 3;
  std::vector<std::vector<double>> before(R), after(R);
  for (int r = 0; r < R; ++r) {
    IncrementField eta = s.sample(-1, L + 1, 31, static_cast<std::uint32_t>(r));
    before[static_cast<size_t>(r)].resize(L + 1);
    for (int x = 0; x <= L; ++x) before[static_cast<size_t>(r)][static_cast<size_t>(x)] = eta.at(0, Site{x});
    IncrementField next = evolve_increment_step(eta, k, noise, 31, static_cast<std::uint32_t>(r));
    after[static_cast<size_t>(r)].resize(L + 1);
    for (int x = 0; x <= L; ++x) after[static_cast<size_t>(r)][static_cast<size_t>(x)] = next.at(0, Site{x});
  }
  CovMatrix cb = covariance_jackknife(before);
  CovMatrix ca = covariance_jackknife(after);
  for (int x = 0; x <= L; ++x) {
    double se = std::hypot(cb.stderr_at(0, static_cast<size_t>(x)), ca.stderr_at(0, static_cast<size_t>(x)));
    CHECK(std::abs(cb.cov_at(0, static_cast<size_t>(x)) - ca.cov_at(0, static_cast<size_t>(x))) <
          3.0 * se);
  }
}

TEST_CASE("harmonic checks") {
  const KernelAnalysis& lazy_k = lazy();
  Box window{Site{-5}, Site{5}};
  Box big{Site{-7}, Site{7}};

  CHECK(check_harmonic(lazy_k, constant_harmonic(big, 1, {5.0}), window) ==
        doctest::Approx(0.0).epsilon(1e-15));

  // u(x) = x under the drifting lazy kernel misses by the mean step.
  CHECK(check_harmonic(lazy_k, linear_harmonic(big, 1, {1.0}), window) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // Centered kernel: linear maps are harmonic.
  CHECK(check_harmonic(centered3(), linear_harmonic(big, 1, {1.0}), window) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("adding a harmonic shifts the mean and keeps the variance") {
  const KernelAnalysis& k = centered3();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 63;
  StationarySampler s(k, noise, cfg);

  Box big{Site{-2}, Site{6}};
  HarmonicTable u = linear_harmonic(big, 1, {0.7});

  // Identity for u = 0.
  IncrementField base = s.sample(0, 4, 8, 0);
  IncrementField same = add_harmonic(base, constant_harmonic(big, 1, {0.0}));
  for (int x = 0; x <= 4; ++x) CHECK(same.at(0, Site{x}) == base.at(0, Site{x}));

  const int R = 6000;
  std::vector<double> at2_plain(R), at2_shift(R);
  for (int r = 0; r < R; ++r) {
    IncrementField eta = s.sample(0, 4, 8, static_cast<std::uint32_t>(r));
    at2_plain[static_cast<size_t>(r)] = eta.at(0, Site{2});
    at2_shift[static_cast<size_t>(r)] = add_harmonic(eta, u).at(0, Site{2});
  }
  double m = mean(at2_shift);
  double se = std::sqrt(sample_variance(at2_shift) / R);
  CHECK(std::abs(m - 0.7 * 2.0) < 3.0 * se);
  // Deterministic shift: variance unchanged, sample by sample.
  CHECK(sample_variance(at2_shift) == doctest::Approx(sample_variance(at2_plain)).epsilon(1e-9));
}

TEST_CASE("chi sampler in d=3") {
  const KernelAnalysis& k = lazy_product_3d();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  Box site{Site{0, 0, 0}, Site{0, 0, 0}};

  // K = 0 is the bare noise field.
  ChiSample c0 = sample_chi(k, noise, 0, site, 5, 3);
  CHECK(c0.field.at(Site{0, 0, 0}) ==
        doctest::Approx(sample_noise(noise, 5, 3, NoiseLane::Dynamics, 0, 0, 0, 0)));

  // Variance across replicas matches sigma_xi^2 * sum_{k<=K} q^k(0,0).
  const int K = 16;
  const int R = 4000;
  std::vector<double> vals(R);
  for (int r = 0; r < R; ++r)
    vals[static_cast<size_t>(r)] = sample_chi(k, noise, K, site, 5, static_cast<std::uint32_t>(r))
                                       .field.at(Site{0, 0, 0});
  DensePowerStream qs(k, WalkKernel::Q);
  double partial = 1.0;
  for (int kk = 1; kk <= K; ++kk) {
    qs.step();
    partial += qs.at(Site{0, 0, 0});
  }
  double est = sample_variance(vals);
  double se = variance_stderr_jackknife(vals);
  CHECK(std::abs(est - partial) < 3.0 * se);

  // One evolution step preserves the empirical variance (stationarity).
  std::vector<double> evolved(R);
  Box small{Site{-1, -1, -1}, Site{1, 1, 1}};
  for (int r = 0; r < R; ++r) {
    ChiSample cs = sample_chi(k, noise, K, small, 6, static_cast<std::uint32_t>(r));
    HeightField next = evolve_height_step(cs.field, k, noise, 6, static_cast<std::uint32_t>(r));
    evolved[static_cast<size_t>(r)] = next.at(Site{0, 0, 0});
  }
  std::vector<double> fresh(R);
  for (int r = 0; r < R; ++r)
    fresh[static_cast<size_t>(r)] = sample_chi(k, noise, K, site, 6, static_cast<std::uint32_t>(r))
                                        .field.at(Site{0, 0, 0});
  double se2 = std::hypot(variance_stderr_jackknife(evolved), variance_stderr_jackknife(fresh));
  CHECK(std::abs(sample_variance(evolved) - sample_variance(fresh)) < 3.0 * se2);

  CHECK_THROWS_AS(sample_chi(lazy(), noise, 4, Box{Site{0}, Site{0}}, 1, 0), DimensionUnsupported);
}

TEST_CASE("characteristic-function diagnostic") {
  const KernelAnalysis& k = lazy();
  NoiseModel noise = NoiseModel::gaussian(0.04);
  std::vector<long> ts{0, 8, 64};
  auto rows = charfn_diagnostic(k, noise, 1.0, ts, 4000, 99, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].empirical == doctest::Approx(1.0));
  CHECK(rows[0].theory == doctest::Approx(1.0));
  for (size_t j = 0; j + 1 < rows.size(); ++j) CHECK(rows[j + 1].empirical < rows[j].empirical);
  for (const auto& r : rows)
    if (r.t > 0) CHECK(std::abs(r.empirical - r.theory) < 3.0 * r.boot_stderr);
}

TEST_CASE("convergence probe relaxes toward the stationary variance") {
  const KernelAnalysis& k = lazy();
  NoiseModel noise = NoiseModel::gaussian(1.0);
  const double v00 = v0(k, 1.0, 0);

  // i.i.d. start with 4x the stationary variance, desk scale.
  NoiseModel wide = NoiseModel::gaussian(4.0 * v00);
  auto iid_sampler = [&](int lo, int hi, std::uint64_t seed, std::uint32_t replica) {
    Box box{Site{lo}, Site{hi}};
    IncrementField eta = make_increment_field(box, 1, 0);
    for (int x = lo; x <= hi; ++x)
      eta.comp[static_cast<size_t>(x - lo)] =
          sample_noise(wide, seed, replica, NoiseLane::Innovation, 0, x);
    return eta;
  };
  auto rows = convergence_probe(k, noise, iid_sampler, {0, 50, 200, 600}, 3000, 12, 2);
  CHECK(rows.front().variance > 3.0 * v00);
  for (size_t j = 0; j + 1 < rows.size(); ++j) CHECK(rows[j + 1].variance < rows[j].variance);
  // Minimal variance: never materially below V0(0,0).
  for (const auto& r : rows) CHECK(r.variance > v00 - 3.0 * r.stderr_);

  // Zero noise with an i.i.d. start: pure averaging contracts the variance.
  auto rows0 = convergence_probe(k, NoiseModel{NoiseFamily::Gaussian, 0.0, 0.2}, iid_sampler,
                                 {0, 200}, 800, 13, 2);
  CHECK(rows0.back().variance < 0.2 * rows0.front().variance);
}

}  // TEST_SUITE
