#pragma once

// KPSS stationarity test and the differencing-order rule built on it.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "arimacast/core.hpp"

namespace arimacast {

enum class KpssNull { Level, Trend };

inline const char *to_string(KpssNull k) { return k == KpssNull::Level ? "level" : "trend"; }

struct KpssResult {
  double statistic = 0.0;
  KpssNull null_kind = KpssNull::Level;
  int bandwidth = 0;
  std::map<double, double> critical_values; // significance level -> critical value
  bool reject_at_5pct = false;
};

namespace detail {

struct KpssTableRow {
  double alpha;
  double level;
  double trend;
};

// Upper-tail quantiles from Kwiatkowski, Phillips, Schmidt & Shin (1992).
inline constexpr std::array<KpssTableRow, 4> kKpssTable{{
    {0.10, 0.347, 0.119},
    {0.05, 0.463, 0.146},
    {0.025, 0.574, 0.176},
    {0.01, 0.739, 0.216},
}};

} // namespace detail

/// Critical value at `alpha`, linearly interpolated between tabulated levels.
inline double kpss_critical_value(KpssNull null_kind, double alpha) {
  const auto &t = detail::kKpssTable;
  detail::require(alpha <= t.front().alpha + 1e-12 && alpha >= t.back().alpha - 1e-12,
                  ErrorKind::Domain, "KPSS alpha must lie in [0.01, 0.10]");
  auto pick = [null_kind](const detail::KpssTableRow &r) {
    return null_kind == KpssNull::Level ? r.level : r.trend;
  };
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (alpha <= t[i].alpha && alpha >= t[i + 1].alpha) {
      const double w = (t[i].alpha - alpha) / (t[i].alpha - t[i + 1].alpha);
      return pick(t[i]) + w * (pick(t[i + 1]) - pick(t[i]));
    }
  }
  return pick(t.back());
}

/// Short-lag Newey-West bandwidth floor(4 (n/100)^(1/4)).
inline int kpss_default_bandwidth(std::size_t n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

inline KpssResult kpss_test(std::span<const double> values, KpssNull null_kind,
                            std::optional<int> bandwidth = std::nullopt) {
  const std::size_t n = values.size();
  detail::require(n >= 10, ErrorKind::InsufficientData, "KPSS test needs at least 10 observations");
  for (double v : values)
    detail::require(std::isfinite(v), ErrorKind::Domain, "KPSS input contains non-finite values");

  std::vector<double> resid(n);
  const double ybar = mean(values);
  if (null_kind == KpssNull::Level) {
    for (std::size_t t = 0; t < n; ++t)
      resid[t] = values[t] - ybar;
  } else {
    const double tbar = (static_cast<double>(n) - 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double dt = static_cast<double>(t) - tbar;
      sxy += dt * (values[t] - ybar);
      sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    for (std::size_t t = 0; t < n; ++t)
      resid[t] = values[t] - ybar - slope * (static_cast<double>(t) - tbar);
  }

  const int lag = bandwidth.value_or(kpss_default_bandwidth(n));
  detail::require(lag >= 0 && static_cast<std::size_t>(lag) < n, ErrorKind::Domain,
                  "KPSS bandwidth out of range");

  const double nd = static_cast<double>(n);
  double long_run = 0.0;
  for (double e : resid)
    long_run += e * e;
  for (int s = 1; s <= lag; ++s) {
    double cov = 0.0;
    for (std::size_t t = static_cast<std::size_t>(s); t < n; ++t)
      cov += resid[t] * resid[t - static_cast<std::size_t>(s)];
    long_run += 2.0 * (1.0 - s / (lag + 1.0)) * cov;
  }
  long_run /= nd;

  double scale = 0.0;
  for (double v : values)
    scale = std::max(scale, std::abs(v));
  detail::require(long_run > 1e-20 * std::max(1.0, scale * scale), ErrorKind::DegenerateSeries,
                  "KPSS long-run variance is zero (constant or deterministic series)");

  double partial = 0.0, sum_sq = 0.0;
  for (double e : resid) {
    partial += e;
    sum_sq += partial * partial;
  }

  KpssResult out;
  out.statistic = sum_sq / (nd * nd * long_run);
  out.null_kind = null_kind;
  out.bandwidth = lag;
  for (const auto &row : detail::kKpssTable)
    out.critical_values[row.alpha] = null_kind == KpssNull::Level ? row.level : row.trend;
  out.reject_at_5pct = out.statistic > out.critical_values.at(0.05);
  return out;
}

/// Smallest d <= max_d whose d-th difference passes the level-null KPSS test
/// at `alpha`; max_d when none does.
inline int choose_d(std::span<const double> values, int max_d = 2, double alpha = 0.05) {
  detail::require(max_d >= 0, ErrorKind::Domain, "max_d must be nonnegative");
  detail::require(values.size() >= static_cast<std::size_t>(max_d) + 10,
                  ErrorKind::InsufficientData,
                  "choose_d needs at least 10 observations after differencing");
  const double critical = kpss_critical_value(KpssNull::Level, alpha);
  for (int d = 0; d < max_d; ++d) {
    const auto dy = difference(values, d);
    if (kpss_test(dy, KpssNull::Level).statistic <= critical)
      return d;
  }
  return max_d;
}

inline int choose_d(const TimeSeries &series, int max_d = 2, double alpha = 0.05) {
  return choose_d(series.values(), max_d, alpha);
}

} // namespace arimacast
