#pragma once

// Daily time-series container, differencing / integration and sample
// correlograms (ACF, PACF via Durbin-Levinson).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arimacast/error.hpp"

namespace arimacast {

using Date = std::chrono::sys_days;

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline std::string format_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// Strict YYYY-MM-DD.
inline Date parse_iso_date(const std::string &text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3)
    detail::fail(ErrorKind::Parse, "invalid ISO date '" + text + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok())
    detail::fail(ErrorKind::Parse, "invalid calendar date '" + text + "'");
  return Date{ymd};
}

/// A gap-free daily series. Dates are implied by the start date, so the
/// one-day-step invariant holds by construction.
class TimeSeries {
public:
  TimeSeries(Date start, std::vector<double> values, std::string label = {})
      : start_(start), values_(std::move(values)), label_(std::move(label)) {
    detail::require(!values_.empty(), ErrorKind::InsufficientData,
                    "time series needs at least one observation");
    for (std::size_t i = 0; i < values_.size(); ++i)
      detail::require(std::isfinite(values_[i]), ErrorKind::Domain,
                      "non-finite value at index " + std::to_string(i));
  }

  /// Validates an explicit date column: strictly increasing, one-day steps.
  TimeSeries(const std::vector<Date> &dates, std::vector<double> values, std::string label = {})
      : TimeSeries(dates.empty() ? Date{} : dates.front(), std::move(values), std::move(label)) {
    detail::require(dates.size() == values_.size(), ErrorKind::Domain,
                    "dates and values differ in length");
    for (std::size_t i = 1; i < dates.size(); ++i) {
      const auto step = (dates[i] - dates[i - 1]).count();
      if (step == 0)
        detail::fail(ErrorKind::DataIntegrity, "duplicate date " + format_date(dates[i]));
      if (step < 0)
        detail::fail(ErrorKind::DataIntegrity, "dates out of order at " + format_date(dates[i]));
      if (step > 1)
        detail::fail(ErrorKind::DataIntegrity,
                     "missing date " + format_date(dates[i - 1] + std::chrono::days{1}));
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::string &label() const noexcept { return label_; }

  Date start() const noexcept { return start_; }
  Date end() const noexcept { return date(size() - 1); }
  Date date(std::size_t i) const { return start_ + std::chrono::days{static_cast<long>(i)}; }

  std::vector<Date> dates() const {
    std::vector<Date> out(size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = date(i);
    return out;
  }

  /// Inclusive calendar window.
  TimeSeries slice(Date from, Date to) const {
    detail::require(from <= to, ErrorKind::Domain, "window start after window end");
    detail::require(from >= start_ && to <= end(), ErrorKind::DataIntegrity,
                    "window " + format_date(from) + ".." + format_date(to) +
                        " outside data range " + format_date(start_) + ".." + format_date(end()));
    const auto first = static_cast<std::size_t>((from - start_).count());
    const auto last = static_cast<std::size_t>((to - start_).count());
    return {from, std::vector<double>(values_.begin() + first, values_.begin() + last + 1), label_};
  }

  friend bool operator==(const TimeSeries &, const TimeSeries &) = default;

private:
  Date start_;
  std::vector<double> values_;
  std::string label_;
};

/// d-th order differences; length n - d.
inline std::vector<double> difference(std::span<const double> values, int d) {
  detail::require(d >= 0, ErrorKind::Domain, "differencing order must be nonnegative");
  detail::require(values.size() > static_cast<std::size_t>(d), ErrorKind::InsufficientData,
                  "series of length " + std::to_string(values.size()) +
                      " cannot be differenced " + std::to_string(d) + " times");
  std::vector<double> out(values.begin(), values.end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
      out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

inline std::vector<double> difference(const TimeSeries &series, int d) {
  return difference(series.values(), d);
}

/// The differenced series keeps the dates of the surviving observations.
inline TimeSeries differenced(const TimeSeries &series, int d) {
  return {series.date(static_cast<std::size_t>(d)), difference(series, d), series.label()};
}

/// Inverse of `difference`. `pivots` are the d original-scale observations
/// immediately preceding the differenced segment, oldest first.
inline std::vector<double> integrate(std::span<const double> diffs, std::span<const double> pivots,
                                     int d) {
  detail::require(d >= 0, ErrorKind::Domain, "integration order must be nonnegative");
  detail::require(pivots.size() == static_cast<std::size_t>(d), ErrorKind::Domain,
                  "integration needs exactly d pivot values");
  std::vector<double> out(diffs.begin(), diffs.end());
  // level_last[k] = last value of the k-th difference of the pivot window.
  std::vector<double> level(pivots.begin(), pivots.end());
  std::vector<double> level_last(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    level_last[static_cast<std::size_t>(k)] = level.back();
    for (std::size_t i = 0; i + 1 < level.size(); ++i)
      level[i] = level[i + 1] - level[i];
    level.pop_back();
  }
  for (int k = d - 1; k >= 0; --k) {
    double acc = level_last[static_cast<std::size_t>(k)];
    for (double &v : out) {
      acc += v;
      v = acc;
    }
  }
  return out;
}

inline double mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

/// Two-sided 95% band used on every correlogram.
inline constexpr double kCorrelogramZ = 1.96;

struct Correlogram {
  std::vector<int> lags;             // 1..max_lag
  std::vector<double> coefficients;  // aligned with lags
  double band_halfwidth = 0.0;       // kCorrelogramZ / sqrt(n)
  std::size_t n = 0;

  std::vector<int> outside_band() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < lags.size(); ++i)
      if (std::abs(coefficients[i]) > band_halfwidth)
        out.push_back(lags[i]);
    return out;
  }
};

namespace detail {

inline void check_correlogram_input(std::span<const double> values, int max_lag) {
  require(max_lag >= 1, ErrorKind::Domain, "max_lag must be positive");
  require(values.size() >= static_cast<std::size_t>(max_lag) + 1, ErrorKind::InsufficientData,
          "correlogram to lag " + std::to_string(max_lag) + " needs at least " +
              std::to_string(max_lag + 1) + " observations");
}

/// True when a centred sum of squares is rounding noise relative to the
/// magnitude of the data (e.g. a constant series whose mean is inexact).
inline bool negligible_spread(std::span<const double> values, double centred_ss) {
  double scale = 0.0;
  for (double v : values)
    scale = std::max(scale, std::abs(v));
  const double floor = 1e-12 * scale;
  return !(centred_ss > static_cast<double>(values.size()) * floor * floor);
}

inline Correlogram make_correlogram(std::vector<double> coefficients, std::size_t n) {
  Correlogram c;
  c.lags.resize(coefficients.size());
  std::iota(c.lags.begin(), c.lags.end(), 1);
  c.coefficients = std::move(coefficients);
  c.band_halfwidth = kCorrelogramZ / std::sqrt(static_cast<double>(n));
  c.n = n;
  return c;
}

} // namespace detail

/// Sample autocorrelations r_0..r_max_lag (biased, lag-0 denominator).
inline std::vector<double> autocorrelations(std::span<const double> values, int max_lag) {
  detail::check_correlogram_input(values, max_lag);
  const double m = mean(values);
  const std::size_t n = values.size();
  double denom = 0.0;
  for (double v : values)
    denom += (v - m) * (v - m);
  detail::require(std::isfinite(denom) && !detail::negligible_spread(values, denom),
                  ErrorKind::DegenerateSeries,
                  "series has zero sample variance");
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1);
  r[0] = 1.0;
  for (std::size_t k = 1; k < r.size(); ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < n; ++t)
      s += (values[t] - m) * (values[t - k] - m);
    r[k] = s / denom;
  }
  return r;
}

inline Correlogram acf(std::span<const double> values, int max_lag) {
  auto r = autocorrelations(values, max_lag);
  r.erase(r.begin());
  return detail::make_correlogram(std::move(r), values.size());
}

/// Partial autocorrelations at lags 1..m from autocorrelations r_0..r_m.
inline std::vector<double> durbin_levinson(std::span<const double> rho) {
  const std::size_t m = rho.size() - 1;
  std::vector<double> pacf(m), phi(m + 1, 0.0), prev(m + 1, 0.0);
  double v = rho[0];
  for (std::size_t k = 1; k <= m; ++k) {
    if (v <= 0.0)
      break; // perfectly predictable; higher partials stay zero
    double num = rho[k];
    for (std::size_t j = 1; j < k; ++j)
      num -= prev[j] * rho[k - j];
    const double a = num / v;
    phi[k] = a;
    for (std::size_t j = 1; j < k; ++j)
      phi[j] = prev[j] - a * prev[k - j];
    v *= (1.0 - a * a);
    pacf[k - 1] = a;
    prev = phi;
  }
  return pacf;
}

inline Correlogram pacf(std::span<const double> values, int max_lag) {
  const auto r = autocorrelations(values, max_lag);
  return detail::make_correlogram(durbin_levinson(r), values.size());
}

} // namespace arimacast
