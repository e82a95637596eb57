#pragma once

// Out-of-sample evaluation: forecast totals against later actuals at
// cumulative checkpoints.

#include <algorithm>
#include <span>
#include <vector>

#include "arimacast/accuracy.hpp"
#include "arimacast/forecast.hpp"

namespace arimacast {

struct CheckpointEvaluation {
  Forecast forecast;
  std::vector<double> actual; // aligned with forecast.mean
  std::vector<DeviationReport> checkpoints;
};

/// Forecasts max(checkpoints) days past the model window and compares the
/// first k forecast days with `actuals` for every checkpoint k. `actuals`
/// may be any series covering those dates (e.g. the full bundled file).
inline CheckpointEvaluation evaluate_checkpoints(const ArimaModel &model, const TimeSeries &actuals,
                                                 std::span<const int> checkpoints) {
  detail::require(!checkpoints.empty(), ErrorKind::Domain, "at least one checkpoint is required");
  for (int k : checkpoints)
    detail::require(k >= 1, ErrorKind::Domain, "checkpoints must be positive");
  const int h = *std::max_element(checkpoints.begin(), checkpoints.end());
  const Date first = model.series.end() + std::chrono::days{1};
  const Date last = model.series.end() + std::chrono::days{h};
  detail::require(actuals.start() <= first && actuals.end() >= last, ErrorKind::DataIntegrity,
                  "actuals cover " + format_date(actuals.start()) + ".." +
                      format_date(actuals.end()) + " but the evaluation needs " +
                      format_date(first) + ".." + format_date(last));

  CheckpointEvaluation out{forecast(model, h, {}), {}, {}};
  const auto offset = static_cast<std::size_t>((first - actuals.start()).count());
  out.actual.assign(actuals.values().begin() + static_cast<long>(offset),
                    actuals.values().begin() + static_cast<long>(offset) + h);
  for (int k : checkpoints) {
    const auto n = static_cast<std::size_t>(k);
    out.checkpoints.push_back(deviation_report(
        std::span<const double>(out.actual).first(n),
        std::span<const double>(out.forecast.mean).first(n),
        "until " + format_date(first + std::chrono::days{k - 1})));
  }
  return out;
}

} // namespace arimacast
