#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "arimacast/diagnostics.hpp"
#include "oracles.hpp"

using namespace arimacast;
using Catch::Approx;

TEST_CASE("Ljung-Box hand computation", "[ljung_box]") {
  const std::vector<double> e{1.0, -1.0, 2.0, 0.0, -2.0, 1.0};
  // mean 1/6; compute r_1, r_2 directly.
  const double m = 1.0 / 6.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  for (std::size_t t = 0; t < e.size(); ++t) {
    c0 += (e[t] - m) * (e[t] - m);
    if (t >= 1)
      c1 += (e[t] - m) * (e[t - 1] - m);
    if (t >= 2)
      c2 += (e[t] - m) * (e[t - 2] - m);
  }
  const double r1 = c1 / c0, r2 = c2 / c0;
  const double q = 6.0 * 8.0 * (r1 * r1 / 5.0 + r2 * r2 / 4.0);
  const auto lb = ljung_box(e, 2);
  CHECK(lb.statistic == Approx(q).epsilon(1e-12));
  CHECK(lb.df == 2);
  CHECK(lb.p_value == Approx(std::exp(-q / 2.0)).epsilon(1e-10)); // chi-square(2) tail
}

TEST_CASE("Ljung-Box null extreme", "[ljung_box]") {
  const std::vector<double> flat(30, 0.7);
  const auto lb = ljung_box(flat, 10);
  CHECK(lb.statistic == 0.0);
  CHECK(lb.p_value == 1.0);
  CHECK(lb.decision == "no autocorrelation");
}

TEST_CASE("Ljung-Box degrees of freedom", "[ljung_box]") {
  const auto e = oracle::white_noise(100, 1);
  CHECK(ljung_box(e, 10, 3).df == 7);
  try {
    ljung_box(e, 3, 3);
    FAIL("expected degrees-of-freedom error");
  } catch (const Error &err) {
    CHECK(err.kind() == ErrorKind::DegreesOfFreedom);
  }
  REQUIRE_THROWS_AS(ljung_box(e, 100), Error);
}

TEST_CASE("Ljung-Box is scale invariant", "[ljung_box][property]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto e = oracle::ar1_series(80, 0.3, s);
    for (double c : {-3.0, 0.01, 250.0}) {
      std::vector<double> scaled(e);
      for (double &v : scaled)
        v *= c;
      const double q0 = ljung_box(e, 12).statistic;
      CHECK(std::abs(ljung_box(scaled, 12).statistic - q0) <= 1e-10 * q0);
    }
  }
}

TEST_CASE("p-value decreases in Q", "[ljung_box][property]") {
  for (int df : {1, 4, 10, 20}) {
    double prev = 1.0;
    for (double q = 0.0; q < 60.0; q += 0.5) {
      const double p = chi_square_sf(q, df);
      CHECK(p <= prev);
      CHECK(p >= 0.0);
      prev = p;
    }
  }
  CHECK(chi_square_sf(3.841458820694124, 1) == Approx(0.05).epsilon(1e-9));
}

TEST_CASE("Ljung-Box size on white noise", "[ljung_box][montecarlo]") {
  int rejected = 0;
  for (std::uint64_t s = 0; s < 1000; ++s)
    rejected += ljung_box(oracle::white_noise(200, 10000 + s), 10).p_value < 0.05;
  CHECK(std::abs(rejected / 1000.0 - 0.05) <= 0.02);
}

TEST_CASE("lag schedule for the three country windows", "[lag_schedule]") {
  const auto italy = lag_schedule(53);
  REQUIRE(italy.size() == 5);
  CHECK(italy[0].nominal == 13.25);
  CHECK(italy[0].lag == 13);
  CHECK(italy[0].label() == "T/4=13.25");
  CHECK(italy[1].lag == 12);
  CHECK(italy[1].label() == "12");
  CHECK(italy[2].nominal == Approx(17.28).margin(0.005));
  CHECK(italy[2].lag == 17);
  CHECK(italy[2].label() == "sqrt(T)+10=17.28");
  CHECK(italy[3].lag == 20);
  CHECK(italy[4].lag == 10);

  const auto russia = lag_schedule(62);
  CHECK(russia[0].nominal == 15.5);
  CHECK(russia[2].nominal == Approx(17.87).margin(0.005));
  const auto usa = lag_schedule(69);
  CHECK(usa[0].nominal == 17.25);
  CHECK(usa[2].nominal == Approx(18.31).margin(0.005));
  REQUIRE_THROWS_AS(lag_schedule(20), Error);
}

TEST_CASE("ARCH LM statistic equals (n - m) R^2 of the auxiliary regression", "[arch]") {
  const auto e = oracle::arch1_series(150, 1.0, 0.5, 3);
  for (int m : {1, 3}) {
    const std::size_t rows = e.size() - static_cast<std::size_t>(m);
    std::vector<double> y(rows);
    std::vector<std::vector<double>> x(static_cast<std::size_t>(m), std::vector<double>(rows));
    for (std::size_t t = 0; t < rows; ++t) {
      const std::size_t i = t + static_cast<std::size_t>(m);
      y[t] = e[i] * e[i];
      for (std::size_t j = 0; j < x.size(); ++j)
        x[j][t] = e[i - j - 1] * e[i - j - 1];
    }
    const auto r = arch_lm(e, m);
    CHECK(r.statistic == Approx(static_cast<double>(rows) * oracle::ols_r2(y, x)).epsilon(1e-9));
    CHECK(r.lag == m);
  }
}

TEST_CASE("ARCH LM size with m = 12", "[arch][montecarlo]") {
  int quiet = 0;
  for (std::uint64_t s = 0; s < 500; ++s)
    quiet += arch_lm(oracle::white_noise(200, 20000 + s), 12).p_value > 0.05;
  CHECK(quiet >= 450);
}

TEST_CASE("ARCH LM power against a strong ARCH(1)", "[arch][montecarlo]") {
  int hits = 0;
  for (std::uint64_t s = 0; s < 200; ++s)
    hits += arch_lm(oracle::arch1_series(500, 1.0, 0.8, 30000 + s), 1).p_value < 0.05;
  CHECK(hits >= 180);
}

TEST_CASE("permuting ARCH residuals removes the effect", "[arch][montecarlo]") {
  std::mt19937_64 rng(99);
  int rejected = 0;
  constexpr int reps = 300;
  for (std::uint64_t s = 0; s < reps; ++s) {
    auto e = oracle::arch1_series(300, 1.0, 0.5, 40000 + s);
    std::shuffle(e.begin(), e.end(), rng);
    rejected += arch_lm(e, 1).p_value < 0.05;
  }
  const double rate = rejected / static_cast<double>(reps);
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.09);
}

TEST_CASE("ARCH LM input checks", "[arch]") {
  const auto e = oracle::white_noise(25, 1);
  try {
    arch_lm(e, 12);
    FAIL("expected insufficient-data error");
  } catch (const Error &err) {
    CHECK(err.kind() == ErrorKind::InsufficientData);
  }
  CHECK_NOTHROW(arch_lm(e, 11));
}

TEST_CASE("whiteness verdict", "[whiteness]") {
  // Barker-13: aperiodic autocorrelation sidelobes of at most 1/13.
  const std::vector<double> barker{1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1};
  const auto ok = whiteness_verdict(barker, 4);
  CHECK(ok.pass);
  CHECK(ok.acf_offenders.empty());

  const auto ar = oracle::ar1_series(300, 0.9, 8);
  const auto bad = whiteness_verdict(ar, 10);
  CHECK_FALSE(bad.pass);
  REQUIRE_FALSE(bad.acf_offenders.empty());
  CHECK(bad.acf_offenders.front() == 1);
  CHECK(bad.pacf_offenders.front() == 1);
}
