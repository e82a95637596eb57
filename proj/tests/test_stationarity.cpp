#include <catch2/catch_amalgamated.hpp>

#include "arimacast/stationarity.hpp"
#include "oracles.hpp"

using namespace arimacast;
using Catch::Approx;

TEST_CASE("critical values match the tabulated quantiles", "[kpss]") {
  CHECK(kpss_critical_value(KpssNull::Level, 0.05) == Approx(0.463));
  CHECK(kpss_critical_value(KpssNull::Level, 0.10) == Approx(0.347));
  CHECK(kpss_critical_value(KpssNull::Trend, 0.01) == Approx(0.216));
  CHECK(kpss_critical_value(KpssNull::Trend, 0.025) == Approx(0.176));
  // Halfway between 5% and 10% by linear interpolation.
  CHECK(kpss_critical_value(KpssNull::Level, 0.075) == Approx(0.405));
  REQUIRE_THROWS_AS(kpss_critical_value(KpssNull::Level, 0.2), Error);
}

TEST_CASE("default bandwidth", "[kpss]") {
  CHECK(kpss_default_bandwidth(100) == 4);
  CHECK(kpss_default_bandwidth(200) == 4);
  CHECK(kpss_default_bandwidth(53) == 3);
}

TEST_CASE("reject flag agrees with the 5% critical value", "[kpss]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto y = oracle::cumsum(oracle::white_noise(120, s));
    const auto r = kpss_test(y, KpssNull::Level);
    CHECK(r.reject_at_5pct == (r.statistic > 0.463));
    CHECK(r.critical_values.size() == 4);
  }
}

TEST_CASE("KPSS size on white noise", "[kpss][montecarlo]") {
  int accepted = 0;
  for (std::uint64_t s = 0; s < 500; ++s)
    accepted += !kpss_test(oracle::white_noise(200, 1000 + s), KpssNull::Level).reject_at_5pct;
  CHECK(accepted >= 450);
}

TEST_CASE("KPSS power on random walks", "[kpss][montecarlo]") {
  int rejected = 0;
  for (std::uint64_t s = 0; s < 500; ++s)
    rejected +=
        kpss_test(oracle::cumsum(oracle::white_noise(200, 2000 + s)), KpssNull::Level).reject_at_5pct;
  CHECK(rejected >= 450);
}

TEST_CASE("linear trend plus noise: trend null accepts, level null rejects", "[kpss]") {
  int trend_accept = 0, level_reject = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto y = oracle::white_noise(200, 3000 + s);
    for (std::size_t t = 0; t < y.size(); ++t)
      y[t] += 0.05 * static_cast<double>(t);
    trend_accept += !kpss_test(y, KpssNull::Trend).reject_at_5pct;
    level_reject += kpss_test(y, KpssNull::Level).reject_at_5pct;
  }
  CHECK(trend_accept >= 45);
  CHECK(level_reject == 50);
}

TEST_CASE("KPSS invariances", "[kpss][property]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto y = oracle::ar1_series(150, 0.4, s);
    auto shifted = y, trended = y;
    for (std::size_t t = 0; t < y.size(); ++t) {
      shifted[t] += 37.5;
      trended[t] += 3.0 - 0.25 * static_cast<double>(t);
    }
    const double l0 = kpss_test(y, KpssNull::Level).statistic;
    const double t0 = kpss_test(y, KpssNull::Trend).statistic;
    CHECK(std::abs(kpss_test(shifted, KpssNull::Level).statistic - l0) <= 1e-10 * l0);
    CHECK(std::abs(kpss_test(trended, KpssNull::Trend).statistic - t0) <= 1e-10 * t0);
  }
}

TEST_CASE("KPSS rejects constant and short input", "[kpss]") {
  const std::vector<double> flat(50, 4.0);
  try {
    kpss_test(flat, KpssNull::Level);
    FAIL("expected degenerate-series error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DegenerateSeries);
  }
  REQUIRE_THROWS_AS(kpss_test(std::vector<double>{1, 2, 3}, KpssNull::Level), Error);
}

TEST_CASE("choose_d on simulated processes", "[kpss][choose_d]") {
  int hits0 = 0, hits1 = 0, hits2 = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto e = oracle::white_noise(300, 4000 + s);
    const auto y0 = oracle::ar1_series(300, 0.5, 5000 + s);
    const auto y1 = oracle::cumsum(e);
    const auto y2 = oracle::cumsum(y1);
    hits0 += choose_d(y0) == 0;
    hits1 += choose_d(y1) == 1;
    hits2 += choose_d(y2) == 2;
    CHECK(choose_d(y2, 1) <= 1);
  }
  CHECK(hits0 >= 17);
  CHECK(hits1 >= 17);
  CHECK(hits2 >= 17);
}
