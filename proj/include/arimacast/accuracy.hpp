#pragma once

// Forecast-accuracy measures, the Lewis MAPE bands, adjusted R^2 and
// predicted-vs-actual deviation summaries.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arimacast/core.hpp"

namespace arimacast {

namespace detail {

inline void check_pair(std::span<const double> actual, std::span<const double> predicted) {
  require(!actual.empty(), ErrorKind::InsufficientData, "accuracy metrics need observations");
  require(actual.size() == predicted.size(), ErrorKind::Domain,
          "actual and predicted differ in length");
}

} // namespace detail

inline double mae(std::span<const double> actual, std::span<const double> predicted) {
  detail::check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i)
    s += std::abs(actual[i] - predicted[i]);
  return s / static_cast<double>(actual.size());
}

/// Mean absolute percentage error in percent. Zero actuals are an error.
inline double mape(std::span<const double> actual, std::span<const double> predicted) {
  detail::check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    detail::require(actual[i] != 0.0, ErrorKind::Domain,
                    "MAPE undefined: actual value is zero at index " + std::to_string(i));
    s += std::abs((actual[i] - predicted[i]) / actual[i]);
  }
  return 100.0 * s / static_cast<double>(actual.size());
}

inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
  detail::check_pair(actual, predicted);
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i)
    s += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
  return std::sqrt(s / static_cast<double>(actual.size()));
}

/// Mean absolute scaled error: MAE divided by the in-sample MAE of the
/// one-step naive (last value) forecast on `training`.
///
/// The scaling follows Hyndman & Koehler (2006). Pass `training = actual`
/// for an in-sample figure.
inline double mase(std::span<const double> actual, std::span<const double> predicted,
                   std::span<const double> training) {
  detail::require(training.size() >= 2, ErrorKind::InsufficientData,
                  "MASE needs at least two training observations");
  double scale = 0.0;
  for (std::size_t t = 1; t < training.size(); ++t)
    scale += std::abs(training[t] - training[t - 1]);
  scale /= static_cast<double>(training.size() - 1);
  detail::require(scale > 0.0, ErrorKind::DegenerateSeries,
                  "MASE undefined: training series is constant");
  return mae(actual, predicted) / scale;
}

/// Lewis (1982) interpretation of MAPE; a value on a band edge takes the
/// better class.
inline std::string lewis_class(double mape_pct) {
  detail::require(mape_pct >= 0.0, ErrorKind::Domain, "MAPE must be nonnegative");
  if (mape_pct <= 10.0)
    return "highly accurate";
  if (mape_pct <= 20.0)
    return "good";
  if (mape_pct <= 50.0)
    return "reasonable";
  return "inaccurate";
}

inline double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  detail::check_pair(actual, predicted);
  const double m = mean(actual);
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    sse += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    sst += (actual[i] - m) * (actual[i] - m);
  }
  detail::require(sst > 0.0, ErrorKind::Domain, "R^2 undefined: actual series has zero variance");
  return 1.0 - sse / sst;
}

/// 1 - (1 - R^2)(n - 1)/(n - k - 1) with R^2 = 1 - SSE/SST.
inline double adj_r2(std::span<const double> actual, std::span<const double> predicted, int k) {
  const double n = static_cast<double>(actual.size());
  detail::require(k >= 1 && n > k + 1.0, ErrorKind::Domain, "adjusted R^2 needs n > k + 1");
  return 1.0 - (1.0 - r_squared(actual, predicted)) * (n - 1.0) / (n - k - 1.0);
}

struct AccuracyReport {
  double mae = 0.0;
  double mape_pct = 0.0;
  double mase = 0.0;
  double rmse = 0.0;
  double forecast_accuracy_pct = 100.0; // 100 - MAPE
  std::string lewis_class;
  std::optional<double> adj_r2;
  std::size_t n = 0;
};

inline AccuracyReport accuracy_report(std::span<const double> actual,
                                      std::span<const double> predicted,
                                      std::span<const double> training,
                                      std::optional<int> k = std::nullopt) {
  AccuracyReport r;
  r.mae = mae(actual, predicted);
  r.mape_pct = mape(actual, predicted);
  r.mase = mase(actual, predicted, training);
  r.rmse = rmse(actual, predicted);
  r.forecast_accuracy_pct = 100.0 - r.mape_pct;
  r.lewis_class = lewis_class(r.mape_pct);
  if (k)
    r.adj_r2 = adj_r2(actual, predicted, *k);
  r.n = actual.size();
  return r;
}

struct DeviationReport {
  std::string label;
  double predicted_total = 0.0;
  double actual_total = 0.0;
  double overall_deviation = 0.0;     // predicted total - actual total
  double overall_pct_deviation = 0.0; // (predicted / actual - 1) * 100
  double mape_pct = 0.0;
  double mae = 0.0;
  std::size_t n_days = 0;
};

inline DeviationReport deviation_report(std::span<const double> actual_future,
                                        std::span<const double> predicted_future,
                                        std::string label = {}) {
  detail::check_pair(actual_future, predicted_future);
  DeviationReport r;
  r.label = std::move(label);
  for (std::size_t i = 0; i < actual_future.size(); ++i) {
    r.actual_total += actual_future[i];
    r.predicted_total += predicted_future[i];
  }
  detail::require(r.actual_total != 0.0, ErrorKind::Domain,
                  "deviation report undefined: actual total is zero");
  r.overall_deviation = r.predicted_total - r.actual_total;
  r.overall_pct_deviation = (r.predicted_total / r.actual_total - 1.0) * 100.0;
  r.mape_pct = mape(actual_future, predicted_future);
  r.mae = mae(actual_future, predicted_future);
  r.n_days = actual_future.size();
  return r;
}

} // namespace arimacast
