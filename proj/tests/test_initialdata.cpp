#include <doctest.h>

#include <cmath>
#include <memory>

#include "harness/initialdata.hpp"
#include "harness/stats.hpp"
#include "helpers.hpp"

using namespace harness;
using namespace testutil;

TEST_SUITE("initialdata") {

TEST_CASE("analytic rho0 per variant") {
  CHECK(InitialIncrementLaw::iid(NoiseModel::gaussian(2.0), 0.0).rho0() == doctest::Approx(2.0));

  auto ma = InitialIncrementLaw::moving_average({1.0, 1.0}, NoiseModel::gaussian(1.0), 0.0);
  CHECK(ma.rho0() == doctest::Approx(4.0));
  CHECK(ma.sigma0_sq() == doctest::Approx(2.0));

  StationarySamplerConfig cfg;
  cfg.depth = 63;
  auto sampler = std::make_shared<StationarySampler>(lazy(), NoiseModel::gaussian(1.0), cfg);
  auto pi0 = InitialIncrementLaw::pi0(sampler);
  CHECK(pi0.rho0() == doctest::Approx(4.0).epsilon(1e-9));   // sigma_xi^2/sigma_1^2
  CHECK(pi0.sigma0_sq() == doctest::Approx(4.0).epsilon(1e-9));  // 2 sigma_xi^2 a(1)

  CHECK(InitialIncrementLaw::flat(0.5).rho0() == 0.0);
}

TEST_CASE("flat law: exact linear heights") {
  auto law = InitialIncrementLaw::flat(0.75);
  auto [eta, h] = law.sample_initial(-6, 6, 1, 0);
  for (int x = -6; x <= 6; ++x) CHECK(eta.at(0, Site{x}) == 0.75);
  for (int x = -7; x <= 6; ++x) CHECK(h.at(Site{x}) == doctest::Approx(0.75 * x).epsilon(1e-12));
  CHECK(h.at(Site{0}) == 0.0);
}

TEST_CASE("iid law: empirical lag-1 covariance vanishes") {
  auto law = InitialIncrementLaw::iid(NoiseModel::uniform(1.3), 0.2);
  const int R = 20000;
  std::vector<std::vector<double>> rows(R);
  for (int r = 0; r < R; ++r) {
    IncrementField eta = law.sample_eta(0, 1, 77, static_cast<std::uint32_t>(r));
    rows[static_cast<size_t>(r)] = {eta.at(0, Site{0}), eta.at(0, Site{1})};
  }
  CovMatrix cm = covariance_jackknife(rows);
  CHECK(std::abs(cm.cov_at(0, 1)) < 3.0 * cm.stderr_at(0, 1));
  CHECK(std::abs(cm.cov_at(0, 0) - 1.3) < 3.0 * cm.stderr_at(0, 0));
  double m = 0.0;
  for (const auto& row : rows) m += row[0];
  m /= R;
  CHECK(std::abs(m - 0.2) < 3.0 * std::sqrt(1.3 / R));
}

TEST_CASE("moving average law: lag-1 covariance equals the innovation variance") {
  auto law = InitialIncrementLaw::moving_average({1.0, 1.0}, NoiseModel::gaussian(0.8), 0.0);
  const int R = 20000;
  std::vector<std::vector<double>> rows(R);
  for (int r = 0; r < R; ++r) {
    IncrementField eta = law.sample_eta(0, 2, 91, static_cast<std::uint32_t>(r));
    rows[static_cast<size_t>(r)] = {eta.at(0, Site{0}), eta.at(0, Site{1}), eta.at(0, Site{2})};
  }
  CovMatrix cm = covariance_jackknife(rows);
  CHECK(std::abs(cm.cov_at(0, 1) - 0.8) < 3.0 * cm.stderr_at(0, 1));
  CHECK(std::abs(cm.cov_at(0, 0) - 1.6) < 3.0 * cm.stderr_at(0, 0));
  // Beyond the order the covariance vanishes.
  CHECK(std::abs(cm.cov_at(0, 2)) < 3.0 * cm.stderr_at(0, 2));
}

TEST_CASE("summed covariances converge to rho0") {
  // MA with window L = m + 2.
  auto ma = InitialIncrementLaw::moving_average({0.5, 1.0, 0.25}, NoiseModel::gaussian(1.0), 0.0);
  const int R = 30000;
  {
    const int L = 4;
    std::vector<std::vector<double>> rows(R);
    for (int r = 0; r < R; ++r) {
      IncrementField eta = ma.sample_eta(-L, L, 13, static_cast<std::uint32_t>(r));
      auto& row = rows[static_cast<size_t>(r)];
      row.resize(2 * L + 1);
      for (int x = -L; x <= L; ++x) row[static_cast<size_t>(x + L)] = eta.at(0, Site{x});
    }
    CovMatrix cm = covariance_jackknife(rows);
    double sum = 0.0, se_sq = 0.0;
    for (int x = -L; x <= L; ++x) {
      sum += cm.cov_at(static_cast<size_t>(L), static_cast<size_t>(x + L));
      se_sq += cm.stderr_at(static_cast<size_t>(L), static_cast<size_t>(x + L)) *
               cm.stderr_at(static_cast<size_t>(L), static_cast<size_t>(x + L));
    }
    CHECK(std::abs(sum - ma.rho0()) < 3.0 * std::sqrt(se_sq));
  }
}

TEST_CASE("stationarity: moments do not depend on the window position") {
  auto law = InitialIncrementLaw::moving_average({1.0, -0.5}, NoiseModel::uniform(1.0), 0.1);
  const int R = 15000;
  std::vector<double> near(R), far(R);
  for (int r = 0; r < R; ++r) {
    near[static_cast<size_t>(r)] = law.sample_eta(0, 0, 55, static_cast<std::uint32_t>(r)).at(0, Site{0});
    far[static_cast<size_t>(r)] =
        law.sample_eta(225, 225, 55, static_cast<std::uint32_t>(r)).at(0, Site{225});
  }
  double se_m = std::sqrt(sample_variance(near) / R + sample_variance(far) / R);
  CHECK(std::abs(mean(near) - mean(far)) < 3.0 * se_m);
  double se_v = std::hypot(variance_stderr_jackknife(near), variance_stderr_jackknife(far));
  CHECK(std::abs(sample_variance(near) - sample_variance(far)) < 3.0 * se_v);
}

TEST_CASE("mixing certificates") {
  auto iid = InitialIncrementLaw::iid(NoiseModel::gaussian(1.0), 0.0);
  CHECK(iid.mixing_certificate().thm_fd == MixingCertificate::State::Yes);
  CHECK(iid.mixing_certificate().thm_tight == MixingCertificate::State::Yes);

  auto ma = InitialIncrementLaw::moving_average({1, 1, 1, 1}, NoiseModel::uniform(1.0), 0.0);
  CHECK(ma.mixing_certificate().thm_fd == MixingCertificate::State::Yes);
  CHECK(ma.mixing_certificate().thm_tight == MixingCertificate::State::Yes);

  StationarySamplerConfig cfg;
  cfg.depth = 31;
  auto gsampler = std::make_shared<StationarySampler>(lazy(), NoiseModel::gaussian(1.0), cfg);
  CHECK(InitialIncrementLaw::pi0(gsampler).mixing_certificate().thm_fd ==
        MixingCertificate::State::Yes);

  auto rsampler = std::make_shared<StationarySampler>(lazy(), NoiseModel::rademacher(1.0), cfg);
  auto cert = InitialIncrementLaw::pi0(rsampler).mixing_certificate();
  CHECK(cert.thm_fd == MixingCertificate::State::Unknown);
  CHECK(cert.thm_tight == MixingCertificate::State::Unknown);
}

TEST_CASE("window must reach the normalization site") {
  auto law = InitialIncrementLaw::flat(1.0);
  CHECK_THROWS_AS(law.sample_initial(5, 9, 1, 0), WindowTooSmall);
}

}  // TEST_SUITE
