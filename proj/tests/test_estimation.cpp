#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numbers>

#include "arimacast/estimation.hpp"
#include "arimacast/optimize.hpp"
#include "oracles.hpp"

using namespace arimacast;
using Catch::Approx;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TimeSeries series_of(std::vector<double> v) { return {make_date(2020, 1, 1), std::move(v)}; }

} // namespace

TEST_CASE("white-noise likelihood is the iid Gaussian closed form", "[likelihood]") {
  const std::vector<double> y{0.3, -1.2, 0.8, 2.1, -0.4};
  const double s2 = 1.7;
  double expected = 0.0;
  for (double v : y)
    expected += -0.5 * std::log(2.0 * std::numbers::pi * s2) - v * v / (2.0 * s2);
  CHECK(log_likelihood({0, 0, 0}, {}, {}, 0.0, s2, y) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("AR(1) likelihood on a 5-point hand series", "[likelihood]") {
  const std::vector<double> y{1.0, 0.2, -0.7, 0.4, 1.5};
  const std::vector<double> ar{0.5};
  CHECK(log_likelihood({1, 0, 0}, ar, {}, std::nullopt, 0.8, y) ==
        Approx(oracle::ar1_exact_loglik(y, 0.5, 0.8)).epsilon(1e-12));
}

TEST_CASE("MA(1) likelihood matches the analytic covariance", "[likelihood]") {
  const std::vector<double> y{0.4, -0.9, 1.3, 0.2};
  const double psi = 0.3, s2 = 1.1;
  std::vector<std::vector<double>> cov(4, std::vector<double>(4, 0.0));
  for (std::size_t i = 0; i < 4; ++i) {
    cov[i][i] = s2 * (1.0 + psi * psi);
    if (i + 1 < 4)
      cov[i][i + 1] = cov[i + 1][i] = s2 * psi;
  }
  const std::vector<double> ma{psi};
  CHECK(log_likelihood({0, 0, 1}, {}, ma, std::nullopt, s2, y) ==
        Approx(oracle::mvn_logpdf(y, cov)).epsilon(1e-12));
}

TEST_CASE("likelihood matches the dense oracle on small ARMA instances", "[likelihood][oracle]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> sig(0.3, 3.0), mu(-2.0, 2.0);
  double worst = 0.0;
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q)
      for (std::size_t n = 1; n <= 8; ++n)
        for (int draw = 0; draw < 3; ++draw) {
          const auto ar = oracle::random_stable(static_cast<std::size_t>(p), rng);
          auto ma = oracle::random_stable(static_cast<std::size_t>(q), rng);
          for (double &v : ma)
            v = -v; // MA polynomial is 1 + sum theta_i z^i
          const double s2 = sig(rng), c = mu(rng);
          auto y = oracle::white_noise(n, rng());
          std::vector<double> centered(y.size());
          for (std::size_t i = 0; i < y.size(); ++i)
            centered[i] = y[i] - c;
          const double got = log_likelihood({p, 0, q}, ar, ma, c, s2, y);
          const double want = oracle::arma_dense_loglik(centered, ar, ma, s2);
          worst = std::max(worst, std::abs(got - want));
        }
  CHECK(worst < 1e-8);
}

TEST_CASE("non-stationary coefficients are a domain error", "[likelihood]") {
  const std::vector<double> y{1, 2, 3, 4};
  const std::vector<double> ar{1.0};
  try {
    log_likelihood({1, 0, 0}, ar, {}, std::nullopt, 1.0, y);
    FAIL("expected domain error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("CSS objective by hand", "[css]") {
  const std::vector<double> y{1.0, -2.0, 0.5, 3.0};
  CHECK(css_objective({0, 0, 0}, {}, {}, std::nullopt, y) == Approx(1 + 4 + 0.25 + 9));
  // Unit AR coefficient is allowed here: residuals telescope to differences.
  const std::vector<double> unit{1.0};
  CHECK(css_objective({1, 0, 0}, unit, {}, std::nullopt, y) == Approx(9 + 6.25 + 6.25));
}

TEST_CASE("CSS optimum lies in the exact-likelihood basin", "[css][fit]") {
  const std::vector<double> ar{0.5}, ma{0.3};
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = simulate({1, 0, 1}, ar, ma, std::nullopt, 1.0, 300, 100 + seed);
    const auto w = s.values();
    auto css = [&](std::span<const double> x) {
      return css_objective({1, 0, 1}, x.subspan(0, 1), x.subspan(1, 1), std::nullopt, w);
    };
    const auto start = nelder_mead(css, std::vector<double>{0.0, 0.0}).x;
    auto nll = [&](std::span<const double> x) {
      try {
        return -model_at(s, {1, 0, 1}, x.subspan(0, 1), x.subspan(1, 1), std::nullopt).loglik;
      } catch (const Error &) {
        return std::numeric_limits<double>::infinity();
      }
    };
    NelderMeadOptions o;
    o.rel_tol = 1e-12;
    const auto local = nelder_mead(nll, start, o);
    const auto m = fit(s, {1, 0, 1}, false);
    agree += std::abs(-local.value - m.loglik) < 1e-4 && std::abs(local.x[0] - m.ar[0]) < 1e-2 &&
             std::abs(local.x[1] - m.ma[0]) < 1e-2;
  }
  CHECK(agree == 20);
}

TEST_CASE("ARIMA(1,1,1) coefficients are recovered", "[fit][simulation]") {
  const std::vector<double> ar{0.5}, ma{0.3};
  std::vector<double> err_ar, err_ma;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = simulate({1, 1, 1}, ar, ma, std::nullopt, 1.0, 500, seed);
    const auto m = fit(s, {1, 1, 1}, false);
    err_ar.push_back(std::abs(m.ar[0] - 0.5));
    err_ma.push_back(std::abs(m.ma[0] - 0.3));
  }
  CHECK(median(err_ar) <= 0.1);
  CHECK(median(err_ma) <= 0.1);
}

TEST_CASE("ARIMA(0,2,0) variance is the mean squared second difference", "[fit]") {
  const auto y = oracle::cumsum(oracle::cumsum(oracle::white_noise(60, 8)));
  const auto m = fit(series_of(y), {0, 2, 0}, false);
  const auto w = difference(y, 2);
  double ms = 0.0;
  for (double v : w)
    ms += v * v;
  ms /= static_cast<double>(w.size());
  CHECK(m.sigma2 == Approx(ms).epsilon(1e-12));
  CHECK(m.num_parameters() == 1);
  CHECK(m.n_effective == 58);
}

TEST_CASE("fit is differencing-consistent", "[fit][property]") {
  const std::vector<double> ar{0.4}, ma{-0.3};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = simulate({1, 1, 1}, ar, ma, std::nullopt, 1.0, 200, 40 + seed);
    const auto a = fit(s, {1, 1, 1}, false);
    const auto b = fit(differenced(s, 1), {1, 0, 1}, false);
    CHECK(std::abs(a.ar[0] - b.ar[0]) < 1e-4);
    CHECK(std::abs(a.ma[0] - b.ma[0]) < 1e-4);
  }
}

TEST_CASE("Hessian standard error matches the AR(1) asymptotic value", "[fit]") {
  const double lambda = 0.6;
  const std::vector<double> ar{lambda};
  const auto s = simulate({1, 0, 0}, ar, {}, std::nullopt, 1.0, 2000, 3);
  const auto m = fit(s, {1, 0, 0}, false);
  const double analytic = std::sqrt((1.0 - lambda * lambda) / 2000.0);
  REQUIRE(m.standard_errors.size() == 1);
  CHECK(std::abs(m.standard_errors[0] / analytic - 1.0) <= 0.25);
}

TEST_CASE("residual mean is small when a constant is fitted", "[fit]") {
  const std::vector<double> ar{0.5};
  const auto s = simulate({1, 0, 0}, ar, {}, 5.0, 1.0, 300, 12);
  const auto m = fit(s, {1, 0, 0}, true);
  REQUIRE(m.constant.has_value());
  CHECK(*m.constant == Approx(5.0).margin(0.5));
  CHECK(std::abs(mean(m.residuals)) <= 0.1 * std::sqrt(m.sigma2));
}

TEST_CASE("fitted roots stay beyond the boundary tolerance", "[fit]") {
  // A near-unit-root MA(1) series pushes the optimiser to the boundary.
  const auto y = difference(oracle::white_noise(120, 77), 1);
  const auto m = fit(series_of(y), {0, 0, 1}, false);
  CHECK(m.min_ma_root >= 1.001 - 1e-9);
  CHECK(m.ma[0] < -0.9);
}

TEST_CASE("fit bookkeeping", "[fit]") {
  const std::vector<double> ar{0.3, 0.2}, ma{0.4};
  const auto s = simulate({2, 1, 1}, ar, ma, std::nullopt, 2.0, 150, 5);
  const auto m = fit(s, {2, 1, 1}, false);
  CHECK(m.num_parameters() == 4);
  CHECK(m.coefficient_names() == std::vector<std::string>{"AR(1)", "AR(2)", "MA(1)"});
  CHECK(m.aic == Approx(-2.0 * m.loglik + 8.0));
  CHECK(m.aicc == Approx(aicc(m.loglik, 4, 149)));
  CHECK(m.residuals.size() == 149);
  CHECK(m.standard_errors.size() == 3);
}

TEST_CASE("insufficient data and non-convergence are reported", "[fit]") {
  const auto s = series_of(oracle::white_noise(10, 1));
  try {
    fit(s, {2, 0, 2}, false);
    FAIL("expected insufficient-data error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
  const std::vector<double> ar{0.5, -0.2}, ma{0.3, 0.1};
  const auto longer = simulate({2, 0, 2}, ar, ma, std::nullopt, 1.0, 200, 9);
  FitOptions tight;
  tight.max_evaluations = 8;
  tight.restarts = 0;
  try {
    fit(longer, {2, 0, 2}, false, tight);
    FAIL("expected convergence error");
  } catch (const ConvergenceError &e) {
    CHECK(e.kind() == ErrorKind::Convergence);
    CHECK(e.best_so_far().order == ArimaOrder{2, 0, 2});
    CHECK(std::isfinite(e.best_so_far().loglik));
  }
}

TEST_CASE("AICc arithmetic", "[aicc]") {
  CHECK(aicc(-10.0, 2, 20) == Approx(24.0 + 12.0 / 17.0).epsilon(1e-14));
  CHECK(std::abs(aicc(-10.0, 2, 100000000) - aic(-10.0, 2)) < 1e-6);
  for (std::size_t n = 4; n < 200; n += 7)
    for (int k = 1; k + 1 < static_cast<int>(n); k += 2)
      CHECK(aicc(-50.0, k, n) > aic(-50.0, k));
  try {
    aicc(-10.0, 3, 4);
    FAIL("expected domain error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("simulate", "[simulate]") {
  const auto c = simulate({0, 0, 0}, {}, {}, 3.25, 0.0, 20, 1);
  for (double v : c.values())
    CHECK(v == 3.25);

  const auto w = simulate({0, 0, 0}, {}, {}, std::nullopt, 1.0, 100000, 2);
  const double m = mean(w.values());
  double var = 0.0;
  for (double v : w.values())
    var += (v - m) * (v - m);
  CHECK(std::abs(var / 100000.0 - 1.0) <= 0.02);

  const std::vector<double> ar{0.9};
  const auto x = simulate({1, 0, 0}, ar, {}, std::nullopt, 1.0, 100000, 3);
  CHECK(std::abs(autocorrelations(x.values(), 1)[1] - 0.9) <= 0.03);

  const auto a = simulate({1, 1, 0}, ar, {}, std::nullopt, 1.0, 50, 4);
  const auto b = simulate({1, 1, 0}, ar, {}, std::nullopt, 1.0, 50, 4);
  CHECK(a == b);

  const std::vector<double> explosive{1.2};
  REQUIRE_THROWS_AS(simulate({1, 0, 0}, explosive, {}, std::nullopt, 1.0, 10, 0), Error);
}
