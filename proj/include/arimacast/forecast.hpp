#pragma once

// h-step forecasts with Gaussian prediction intervals on the original scale.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "arimacast/estimation.hpp"

namespace arimacast {

struct PredictionInterval {
  double level = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct Forecast {
  int horizon = 0;
  std::vector<Date> dates;
  std::vector<double> mean;
  std::vector<double> variance; // sigma2 * sum_{i<j} psi_i^2
  std::vector<PredictionInterval> intervals;
  std::vector<double> psi_weights; // psi_0 = 1 first
  double sigma2 = 0.0;
};

/// Coefficients of the full autoregressive operator ar(B) (1 - B)^d written
/// as 1 - sum_i phi*_i B^i; returns phi*_1..phi*_{p+d}.
inline std::vector<double> integrated_ar(std::span<const double> ar, int d) {
  std::vector<double> poly(ar.size() + 1);
  poly[0] = 1.0;
  for (std::size_t i = 0; i < ar.size(); ++i)
    poly[i + 1] = -ar[i];
  for (int k = 0; k < d; ++k) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> phi(poly.size() - 1);
  for (std::size_t i = 1; i < poly.size(); ++i)
    phi[i - 1] = -poly[i];
  return phi;
}

/// First h psi-weights of the ARIMA model's infinite moving-average form.
inline std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> ma,
                                       int d, int h) {
  const auto phi = integrated_ar(ar, d);
  std::vector<double> psi(static_cast<std::size_t>(h), 0.0);
  if (h == 0)
    return psi;
  psi[0] = 1.0;
  for (std::size_t j = 1; j < psi.size(); ++j) {
    double v = j <= ma.size() ? ma[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(j, phi.size()); ++i)
      v += phi[i - 1] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

inline Forecast forecast(const ArimaModel &model, int h, std::span<const double> levels) {
  detail::require(h >= 1, ErrorKind::Domain, "forecast horizon must be positive");
  detail::require(static_cast<std::size_t>(h) <= 10 * model.n_effective, ErrorKind::HorizonTooLong,
                  "horizon " + std::to_string(h) + " exceeds 10x the " +
                      std::to_string(model.n_effective) + " effective observations");
  for (double level : levels)
    detail::require(level > 0.0 && level < 1.0, ErrorKind::Domain,
                    "confidence levels must lie in (0, 1)");

  const int d = model.order.d;
  const double mu = model.constant.value_or(0.0);
  const auto w = difference(model.series, d);
  const auto ss = detail::make_state_space(model.ar, model.ma);
  const auto filt = detail::kalman_filter(ss, detail::centered(w, mu));
  detail::require(filt.ok, ErrorKind::Domain, "Kalman filter failed on the fitted model");

  // Conditional means of future differences from the filtered state with
  // future innovations at zero.
  std::vector<double> diff_mean(static_cast<std::size_t>(h));
  Eigen::VectorXd a = filt.next_state;
  for (auto &v : diff_mean) {
    v = a(0) + mu;
    a = (ss.transition * a).eval();
  }
  const auto values = model.series.values();
  const auto pivots = values.subspan(values.size() - static_cast<std::size_t>(d));

  Forecast fc;
  fc.horizon = h;
  fc.sigma2 = model.sigma2;
  fc.mean = integrate(diff_mean, pivots, d);
  fc.psi_weights = psi_weights(model.ar, model.ma, d, h);
  fc.variance.resize(static_cast<std::size_t>(h));
  double acc = 0.0;
  for (std::size_t j = 0; j < fc.variance.size(); ++j) {
    acc += fc.psi_weights[j] * fc.psi_weights[j];
    fc.variance[j] = model.sigma2 * acc;
  }
  for (int j = 1; j <= h; ++j)
    fc.dates.push_back(model.series.end() + std::chrono::days{j});

  const boost::math::normal_distribution<double> std_normal;
  for (double level : levels) {
    const double z = boost::math::quantile(std_normal, 0.5 * (1.0 + level));
    PredictionInterval pi{level, {}, {}};
    for (std::size_t j = 0; j < fc.mean.size(); ++j) {
      const double half = z * std::sqrt(fc.variance[j]);
      pi.lower.push_back(fc.mean[j] - half);
      pi.upper.push_back(fc.mean[j] + half);
    }
    fc.intervals.push_back(std::move(pi));
  }
  return fc;
}

/// Floors means and bounds at zero (incidence counts cannot be negative).
inline Forecast clamp_at_zero(Forecast fc) {
  auto clamp = [](std::vector<double> &v) {
    for (double &x : v)
      x = std::max(x, 0.0);
  };
  clamp(fc.mean);
  for (auto &pi : fc.intervals) {
    clamp(pi.lower);
    clamp(pi.upper);
  }
  return fc;
}

/// One-step in-sample predictions on the original scale. The first d
/// positions have no prediction.
inline std::vector<std::optional<double>> fitted_values(const ArimaModel &model) {
  const auto values = model.series.values();
  const auto d = static_cast<std::size_t>(model.order.d);
  std::vector<std::optional<double>> out(values.size());
  for (std::size_t t = d; t < values.size(); ++t)
    out[t] = values[t] - model.residuals[t - d];
  return out;
}

struct FinalSizeEstimate {
  double observed_total = 0.0; // prior cumulative + sum of the window
  double forecast_total = 0.0; // sum of forecast means before the crossing
  double final_size = 0.0;
  int days_forecast = 0;
  std::optional<Date> near_zero_date; // first day whose mean drops below threshold
  bool capped = false;
};

/// Cumulative-size projection: observed cases plus forecast means until the
/// mean falls below `threshold` cases/day or `cap` days are reached.
inline FinalSizeEstimate final_size(const ArimaModel &model, double prior_total = 0.0,
                                    double threshold = 1.0, int cap = 365) {
  const int h = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cap),
                                                       10 * model.n_effective));
  const auto fc = forecast(model, h, {});
  FinalSizeEstimate out;
  out.observed_total = prior_total;
  for (double v : model.series.values())
    out.observed_total += v;
  for (int j = 0; j < h; ++j) {
    if (fc.mean[static_cast<std::size_t>(j)] < threshold) {
      out.near_zero_date = fc.dates[static_cast<std::size_t>(j)];
      break;
    }
    out.forecast_total += fc.mean[static_cast<std::size_t>(j)];
    ++out.days_forecast;
  }
  out.capped = !out.near_zero_date.has_value();
  out.final_size = out.observed_total + out.forecast_total;
  return out;
}

} // namespace arimacast
