#pragma once

// Residual adequacy checks: Ljung-Box portmanteau, Engle's ARCH LM test and
// the correlogram whiteness verdict.

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "arimacast/core.hpp"

namespace arimacast {

struct PortmanteauResult {
  int lag = 0;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::string decision;
};

struct ArchLmResult {
  int lag = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  std::string decision;
};

/// Upper tail of the chi-square distribution.
inline double chi_square_sf(double x, int df) {
  detail::require(df >= 1, ErrorKind::DegreesOfFreedom, "chi-square needs df >= 1");
  if (x <= 0.0)
    return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

inline PortmanteauResult ljung_box(std::span<const double> residuals, int lag, int fitdf = 0,
                                   double alpha = 0.05) {
  const auto n = static_cast<int>(residuals.size());
  detail::require(lag >= 1 && lag < n, ErrorKind::Domain,
                  "Ljung-Box lag must satisfy 1 <= H < n");
  detail::require(fitdf >= 0 && lag > fitdf, ErrorKind::DegreesOfFreedom,
                  "Ljung-Box lag " + std::to_string(lag) + " leaves no degrees of freedom after " +
                      std::to_string(fitdf) + " fitted parameters");
  const double m = mean(residuals);
  double c0 = 0.0;
  for (double e : residuals)
    c0 += (e - m) * (e - m);
  PortmanteauResult out;
  out.lag = lag;
  out.df = lag - fitdf;
  if (!detail::negligible_spread(residuals, c0)) {
    double q = 0.0;
    for (int k = 1; k <= lag; ++k) {
      double ck = 0.0;
      for (int t = k; t < n; ++t)
        ck += (residuals[static_cast<std::size_t>(t)] - m) *
              (residuals[static_cast<std::size_t>(t - k)] - m);
      const double r = ck / c0;
      q += r * r / (n - k);
    }
    out.statistic = n * (n + 2.0) * q;
  }
  out.p_value = chi_square_sf(out.statistic, out.df);
  out.decision = out.p_value < alpha ? "autocorrelation" : "no autocorrelation";
  return out;
}

struct LagChoice {
  std::string rule;     // e.g. "T/4"
  double nominal = 0.0; // value as the rule produces it, e.g. 13.25
  int lag = 0;          // floored value used in computation
  std::string label() const {
    if (rule == std::to_string(lag))
      return rule;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%.2f", rule.c_str(), nominal);
    return buf;
  }
};

/// The five conventional portmanteau lag choices: T/4, 12, sqrt(T)+10, 20, 10.
inline std::vector<LagChoice> lag_schedule(std::size_t n) {
  detail::require(n >= 24, ErrorKind::InsufficientData, "lag schedule needs n >= 24");
  const double nd = static_cast<double>(n);
  auto make = [](std::string rule, double nominal) {
    return LagChoice{std::move(rule), nominal, static_cast<int>(std::floor(nominal))};
  };
  return {make("T/4", nd / 4.0), make("12", 12.0), make("sqrt(T)+10", std::sqrt(nd) + 10.0),
          make("20", 20.0), make("10", 10.0)};
}

/// Engle's LM test: regress e_t^2 on an intercept and m lags of e^2;
/// statistic (n - m) R^2 ~ chi-square(m).
inline ArchLmResult arch_lm(std::span<const double> residuals, int m, double alpha = 0.05) {
  const auto n = static_cast<Eigen::Index>(residuals.size());
  detail::require(m >= 1, ErrorKind::Domain, "ARCH LM lag must be positive");
  detail::require(n > 2 * m + 1, ErrorKind::InsufficientData,
                  "ARCH LM with " + std::to_string(m) + " lags needs more than " +
                      std::to_string(2 * m + 1) + " residuals");
  const Eigen::Index rows = n - m;
  Eigen::MatrixXd x(rows, m + 1);
  Eigen::VectorXd y(rows);
  for (Eigen::Index t = m; t < n; ++t) {
    const double e = residuals[static_cast<std::size_t>(t)];
    y(t - m) = e * e;
    x(t - m, 0) = 1.0;
    for (Eigen::Index j = 1; j <= m; ++j) {
      const double l = residuals[static_cast<std::size_t>(t - j)];
      x(t - m, j) = l * l;
    }
  }
  ArchLmResult out;
  out.lag = m;
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  if (sst > 0.0) {
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    const double sse = (y - x * beta).squaredNorm();
    const double r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
    out.statistic = static_cast<double>(rows) * r2;
  }
  out.p_value = chi_square_sf(out.statistic, m);
  out.decision = out.p_value < alpha ? "ARCH effect" : "no ARCH effect";
  return out;
}

struct WhitenessVerdict {
  Correlogram acf;
  Correlogram pacf;
  std::vector<int> acf_offenders;
  std::vector<int> pacf_offenders;
  bool pass = true;
};

/// Passes when no ACF or PACF spike at lags 1..max_lag leaves the 95% band.
inline WhitenessVerdict whiteness_verdict(std::span<const double> residuals, int max_lag) {
  WhitenessVerdict v{acf(residuals, max_lag), pacf(residuals, max_lag), {}, {}, true};
  v.acf_offenders = v.acf.outside_band();
  v.pacf_offenders = v.pacf.outside_band();
  v.pass = v.acf_offenders.empty() && v.pacf_offenders.empty();
  return v;
}

} // namespace arimacast
