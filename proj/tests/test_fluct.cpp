#include <doctest.h>

#include <cmath>
#include <memory>

#include "harness/fluct.hpp"
#include "harness/invariant.hpp"
#include "helpers.hpp"

using namespace harness;
using namespace testutil;

namespace {
NoiseModel zero_noise() { return NoiseModel{NoiseFamily::Gaussian, 0.0, 0.2}; }
}  // namespace

TEST_SUITE("fluct") {

TEST_CASE("scaled indices use plain floors") {
  const KernelAnalysis& k = lazy();  // b = -1/2
  CHECK(scaled_time(10000, 0.25) == 2500);
  CHECK(scaled_site(k, 10000, 0.25, 0.0) == -1250);
  CHECK(scaled_site(k, 10000, 1.0, 1.0) == 100 - 5000);
  CHECK(scaled_site(k, 100, 0.0, -0.35) == -4);  // floor(-3.5)
}

TEST_CASE("the origin point evaluates to exactly zero") {
  const KernelAnalysis& k = lazy();
  auto law = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.3);
  FluctExperiment ex{k, NoiseModel::gaussian(1.0), law, 256, {SpaceTimePoint{0.0, 0.0}}};
  auto vals = eval_field(ex, 5, 17);
  CHECK(vals[0] == 0.0);
}

TEST_CASE("flat profile with zero noise stays within the floor-error bound") {
  const KernelAnalysis& k = lazy();
  const double mu0 = 0.8;
  auto law = InitialIncrementLaw::flat(mu0);
  for (long n : {64L, 256L, 1024L}) {
    FluctExperiment ex{k, zero_noise(), law, n,
                       {SpaceTimePoint{1.0, 1.0}, SpaceTimePoint{0.5, -0.7}}};
    auto vals = eval_field(ex, 3, 0);
    const double bound = 3.0 * mu0 * (1.0 + std::abs(k.drift_b())) *
                         std::pow(static_cast<double>(n), -0.25);
    for (double v : vals) CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("t = 0 points are centered initial partial sums") {
  const KernelAnalysis& k = lazy();
  auto law = InitialIncrementLaw::iid(NoiseModel::uniform(1.0), 0.25);
  const long n = 400;
  const double r = 0.9;
  FluctExperiment ex{k, NoiseModel::gaussian(1.0), law, n, {SpaceTimePoint{0.0, r}}};
  auto vals = eval_field(ex, 21, 4);

  const long site = scaled_site(k, n, 0.0, r);
  double h = 0.0;
  for (long i = 1; i <= site; ++i)
    h += law.sample_eta(static_cast<int>(i), static_cast<int>(i), 21, 4).at(0, Site{static_cast<int>(i)});
  double expect = std::pow(static_cast<double>(n), -0.25) *
                  (h - 0.25 * r * std::sqrt(static_cast<double>(n)));
  CHECK(vals[0] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("decomposition: degenerate pieces vanish") {
  const KernelAnalysis& k = lazy();
  const SpaceTimePoint pt{0.5, 0.6};

  // Zero noise kills the dynamical term.
  auto iid = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.1);
  FluctExperiment quiet{k, zero_noise(), iid, 128, {pt}};
  Decomposition d1 = decompose(quiet, pt, 7, 0);
  CHECK(d1.f_bar == 0.0);

  // Flat initial increments kill the initial-data term.
  auto flat = InitialIncrementLaw::flat(0.7);
  FluctExperiment noisy{k, NoiseModel::gaussian(1.0), flat, 128, {pt}};
  Decomposition d2 = decompose(noisy, pt, 7, 0);
  CHECK(d2.s_bar == 0.0);
}

TEST_CASE("decomposition reproduces the field exactly for all three laws") {
  const KernelAnalysis& k = lazy();
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  StationarySamplerConfig cfg;
  cfg.depth = 127;
  auto sampler = std::make_shared<StationarySampler>(k, noise, cfg);

  std::vector<InitialIncrementLaw> laws;
  laws.push_back(InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.4));
  laws.push_back(InitialIncrementLaw::moving_average({1.0, 1.0}, NoiseModel::gaussian(1.0), -0.2));
  laws.push_back(InitialIncrementLaw::pi0(sampler));

  for (const auto& law : laws) {
    for (const SpaceTimePoint pt : {SpaceTimePoint{1.0, 0.0}, SpaceTimePoint{0.5, 1.1}}) {
      FluctExperiment ex{k, noise, law, 128, {pt}};
      auto direct = eval_field(ex, 42, 3);
      Decomposition dec = decompose(ex, pt, 42, 3);
      double scale = std::max(1.0, std::abs(direct[0]));
      CHECK(std::abs(dec.total() - direct[0]) / scale < 1e-8);
    }
  }
}

TEST_CASE("drift term obeys the explicit floor-error bound") {
  const KernelAnalysis& k = skewed();
  auto law = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.9);
  const double c = 2.0 + std::abs(k.drift_b());
  for (long n : {64L, 128L, 256L}) {
    FluctExperiment ex{k, NoiseModel::gaussian(1.0), law, n, {}};
    for (double t : {0.3, 1.0})
      for (double r : {-1.2, 0.0, 2.3}) {
        Decomposition dec = decompose(ex, SpaceTimePoint{t, r}, 3, 0);
        CHECK(std::abs(dec.h_bar) <= 0.9 * c * std::pow(static_cast<double>(n), -0.25) + 1e-12);
      }
  }
}

TEST_CASE("dynamical and initial terms are uncorrelated") {
  const KernelAnalysis& k = lazy();
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  auto law = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.0);
  const SpaceTimePoint pt{1.0, 0.0};
  FluctExperiment ex{k, noise, law, 64, {pt}};
  const int R = 2000;
  std::vector<double> f(R), s(R);
  for (int r = 0; r < R; ++r) {
    Decomposition dec = decompose(ex, pt, 17, static_cast<std::uint32_t>(r));
    f[static_cast<size_t>(r)] = dec.f_bar;
    s[static_cast<size_t>(r)] = dec.s_bar;
  }
  double mf = mean(f), ms = mean(s);
  double acc = 0.0, vf = 0.0, vs = 0.0;
  for (int r = 0; r < R; ++r) {
    acc += (f[static_cast<size_t>(r)] - mf) * (s[static_cast<size_t>(r)] - ms);
    vf += (f[static_cast<size_t>(r)] - mf) * (f[static_cast<size_t>(r)] - mf);
    vs += (s[static_cast<size_t>(r)] - ms) * (s[static_cast<size_t>(r)] - ms);
  }
  double corr = acc / std::sqrt(vf * vs);
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("covariance estimator basics") {
  const KernelAnalysis& k = lazy();

  // Deterministic field: zero matrix.
  auto flat = InitialIncrementLaw::flat(0.5);
  FluctExperiment det{k, zero_noise(), flat, 64, {SpaceTimePoint{0.5, 0.0}, SpaceTimePoint{1.0, 1.0}}};
  CovEstimate cz = estimate_cov(det, 60, 5, 2);
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j) CHECK(std::abs(cz.matrix.cov_at(i, j)) < 1e-24);

  // Noisy run: symmetric matrix, positive diagonal, reproducible across seeds.
  auto law = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.0);
  FluctExperiment ex{k, NoiseModel::gaussian(1.0), law, 256,
                     {SpaceTimePoint{0.5, 0.0}, SpaceTimePoint{1.0, 0.5}}};
  CovEstimate c1 = estimate_cov(ex, 400, 11, 2);
  CovEstimate c2 = estimate_cov(ex, 400, 1213, 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(c1.matrix.cov_at(i, i) > 0.0);
    for (size_t j = 0; j < 2; ++j) {
      CHECK(c1.matrix.cov_at(i, j) == c1.matrix.cov_at(j, i));
      double se = std::hypot(c1.matrix.stderr_at(i, j), c2.matrix.stderr_at(i, j));
      CHECK(std::abs(c1.matrix.cov_at(i, j) - c2.matrix.cov_at(i, j)) < 3.0 * se);
    }
  }
}

TEST_CASE("comparison report flags nothing when theory equals estimate") {
  CovEstimate est;
  est.points = {SpaceTimePoint{0.5, 0.0}, SpaceTimePoint{1.0, 0.0}};
  LimitParams params{0.25, 1.0, 4.0};
  est.matrix.dim = 2;
  est.matrix.cov.resize(4);
  est.matrix.stderr_.assign(4, 1.0);
  for (size_t i = 0; i < 2; ++i)
    for (size_t j = 0; j < 2; ++j)
      est.matrix.cov[i * 2 + j] = z_cov(params, est.points[i], est.points[j]);
  est.replicas = 100;
  CompareReport rep = compare(est, params);
  for (const auto& e : rep.entries) CHECK(e.z == 0.0);
  CHECK(rep.all_within(3.0));
}

TEST_CASE("hydrodynamic limit: zero and linear profiles") {
  const KernelAnalysis& k = lazy();

  // u0 = 0: the error is pure noise, shrinking in n.
  auto rows = hydro_check(k, NoiseModel::gaussian(0.25), [](double) { return 0.0; },
                          {64, 256, 1024}, 1.0, 2.0, 7);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].sup_error < rows[0].sup_error);
  CHECK(rows[2].sup_error < rows[1].sup_error);

  // Zero noise, centered kernel, linear profile: only floor errors remain.
  auto lin = hydro_check(centered3(), zero_noise(), [](double x) { return 0.3 * x; },
                         {64, 256}, 1.0, 1.5, 7);
  for (const auto& r : lin) CHECK(r.sup_error <= 2.0 / static_cast<double>(r.n));
}

TEST_CASE("variance scaling at desk scale") {
  const KernelAnalysis& k = lazy();
  std::vector<long> ts;
  for (long t = 64; t <= 1024; t *= 2) ts.push_back(t);
  ScalingReport rep = variance_scaling(k, NoiseModel::gaussian(1.0), ts, 400, 19, 2);
  CHECK(rep.slope_exact == doctest::Approx(0.5).epsilon(0.06));
  for (const auto& row : rep.rows)
    CHECK(std::abs(row.mc - row.exact) < 3.0 * row.mc_stderr);
}

}  // TEST_SUITE
