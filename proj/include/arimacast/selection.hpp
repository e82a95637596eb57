#pragma once

// AICc-driven order search: local stepwise moves and an exhaustive grid.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "arimacast/accuracy.hpp"
#include "arimacast/estimation.hpp"
#include "arimacast/forecast.hpp"
#include "arimacast/stationarity.hpp"

namespace arimacast {

struct SearchConfig {
  int max_p = 8;
  int max_q = 8;
  int max_d = 2;
  bool stepwise = true;
  bool allow_constant = true;
  std::optional<int> fixed_d;
  /// Stepwise moves never adopt a boundary-flagged fit unless nothing else fits.
  bool stepwise_avoid_boundary = true;
  double kpss_alpha = 0.05;
  unsigned threads = 0; // 0: hardware concurrency
  FitOptions fit;
};

struct CandidateRow {
  ArimaOrder order;
  bool constant = false;
  double aicc = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  double mase = 0.0;
  double rmse = 0.0;
  double adj_r2 = 0.0;
  bool near_root_boundary = false;
  ArimaModel model;
};

struct CandidateFailure {
  ArimaOrder order;
  bool constant = false;
  std::string reason;
};

struct GridResult {
  int d = 0;
  std::vector<CandidateRow> rows; // ascending AICc
  std::vector<CandidateFailure> failures;
};

struct StepwiseResult {
  int d = 0;
  std::vector<CandidateRow> visited; // in evaluation order
  std::vector<CandidateFailure> failures;
  std::size_t best_index = 0;

  const CandidateRow &best() const { return visited.at(best_index); }
};

/// In-sample accuracy over the whole window. The first d observations are
/// reproduced exactly by the differencing pivots and enter with zero error.
inline AccuracyReport in_sample_accuracy(const ArimaModel &model) {
  const auto actual = model.series.values();
  const auto fitted = fitted_values(model);
  std::vector<double> predicted(actual.size());
  for (std::size_t t = 0; t < actual.size(); ++t)
    predicted[t] = fitted[t].value_or(actual[t]);

  AccuracyReport r;
  r.n = actual.size();
  r.mae = mae(actual, predicted);
  r.rmse = rmse(actual, predicted);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto guarded = [](auto &&f) {
    try {
      return f();
    } catch (const Error &) {
      return nan;
    }
  };
  r.mape_pct = guarded([&] { return mape(actual, predicted); });
  r.forecast_accuracy_pct = 100.0 - r.mape_pct;
  r.lewis_class = std::isnan(r.mape_pct) ? "undefined" : lewis_class(r.mape_pct);
  r.mase = guarded([&] { return mase(actual, predicted, actual); });
  const int k = model.order.p + model.order.q + (model.constant ? 1 : 0);
  r.adj_r2 = guarded([&] {
    return k >= 1 ? adj_r2(actual, predicted, k) : r_squared(actual, predicted);
  });
  return r;
}

inline CandidateRow make_candidate(ArimaModel model) {
  const auto acc = in_sample_accuracy(model);
  return CandidateRow{model.order, model.constant.has_value(), model.aicc, acc.mae,
                      acc.mape_pct, acc.mase, acc.rmse, acc.adj_r2.value_or(std::nan("")),
                      model.near_root_boundary, std::move(model)};
}

/// Ranking: AICc, then fewer coefficients, then lower p, then no constant.
inline bool candidate_less(const CandidateRow &a, const CandidateRow &b) {
  auto key = [](const CandidateRow &r) {
    return std::make_tuple(r.aicc, r.order.p + r.order.q, r.order.p, r.constant);
  };
  return key(a) < key(b);
}

namespace detail {

struct CandidateSpec {
  ArimaOrder order;
  bool constant = false;
};

struct Evaluated {
  std::optional<CandidateRow> row;
  std::optional<CandidateFailure> failure;
};

/// Fits every spec; results land in input order whatever the thread
/// interleaving.
inline std::vector<Evaluated> evaluate_all(const TimeSeries &series,
                                           const std::vector<CandidateSpec> &specs,
                                           const SearchConfig &cfg) {
  std::vector<Evaluated> out(specs.size());
  auto work = [&](std::size_t i) {
    const auto &s = specs[i];
    try {
      out[i].row = make_candidate(fit(series, s.order, s.constant, cfg.fit));
    } catch (const Error &e) {
      out[i].failure = CandidateFailure{s.order, s.constant, e.what()};
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(specs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < specs.size();)
        work(i);
    });
  return out; // jthreads join here
}

inline std::vector<bool> constant_options(const SearchConfig &cfg, int d) {
  if (cfg.allow_constant && d <= 1)
    return {false, true};
  return {false};
}

inline std::string failure_summary(const std::vector<CandidateFailure> &failures) {
  std::string msg;
  for (const auto &f : failures)
    msg += "\n  ARIMA" + f.order.to_string() + (f.constant ? "+c" : "") + ": " + f.reason;
  return msg;
}

inline int search_d(const TimeSeries &series, const SearchConfig &cfg) {
  require(cfg.max_p >= 0 && cfg.max_q >= 0 && cfg.max_d >= 0, ErrorKind::Domain,
          "search maxima must be nonnegative");
  if (cfg.fixed_d) {
    require(*cfg.fixed_d >= 0 && *cfg.fixed_d <= cfg.max_d, ErrorKind::Domain,
            "fixed_d must lie in [0, max_d]");
    return *cfg.fixed_d;
  }
  return choose_d(series, cfg.max_d, cfg.kpss_alpha);
}

} // namespace detail

/// Fits every (p, q) with p <= max_p, q <= max_q at the chosen d. Failed
/// cells are recorded, not fatal.
inline GridResult grid_search(const TimeSeries &series, const SearchConfig &cfg) {
  GridResult res;
  res.d = detail::search_d(series, cfg);
  std::vector<detail::CandidateSpec> specs;
  for (int p = 0; p <= cfg.max_p; ++p)
    for (int q = 0; q <= cfg.max_q; ++q)
      for (bool c : detail::constant_options(cfg, res.d))
        specs.push_back({{p, res.d, q}, c});
  for (auto &e : detail::evaluate_all(series, specs, cfg)) {
    if (e.row)
      res.rows.push_back(std::move(*e.row));
    else
      res.failures.push_back(std::move(*e.failure));
  }
  if (res.rows.empty())
    detail::fail(ErrorKind::SearchFailure,
                 "every grid candidate failed:" + detail::failure_summary(res.failures));
  std::stable_sort(res.rows.begin(), res.rows.end(), candidate_less);
  return res;
}

/// Local search from the conventional seeds, moving p and/or q by one (and
/// toggling the constant where allowed) while AICc strictly improves.
inline StepwiseResult stepwise_search(const TimeSeries &series, const SearchConfig &cfg) {
  StepwiseResult res;
  res.d = detail::search_d(series, cfg);
  const int d = res.d;
  const auto constants = detail::constant_options(cfg, d);
  const bool seed_constant = constants.size() > 1;

  std::map<std::tuple<int, int, bool>, std::optional<std::size_t>> seen; // -> index in visited
  auto evaluate = [&](const std::vector<detail::CandidateSpec> &wanted) {
    std::vector<detail::CandidateSpec> fresh;
    for (const auto &s : wanted) {
      const auto key = std::make_tuple(s.order.p, s.order.q, s.constant);
      if (s.order.p < 0 || s.order.q < 0 || s.order.p > cfg.max_p || s.order.q > cfg.max_q ||
          seen.contains(key))
        continue;
      seen[key] = std::nullopt;
      fresh.push_back(s);
    }
    for (auto &e : detail::evaluate_all(series, fresh, cfg)) {
      if (e.row) {
        const auto key = std::make_tuple(e.row->order.p, e.row->order.q, e.row->constant);
        seen[key] = res.visited.size();
        res.visited.push_back(std::move(*e.row));
      } else {
        res.failures.push_back(std::move(*e.failure));
      }
    }
  };

  evaluate({{{2, d, 2}, seed_constant},
            {{0, d, 0}, seed_constant},
            {{1, d, 0}, seed_constant},
            {{0, d, 1}, seed_constant}});
  if (res.visited.empty())
    detail::fail(ErrorKind::SearchFailure,
                 "every stepwise seed failed:" + detail::failure_summary(res.failures));

  // Near-cancelling AR and MA roots on the unit circle fit noise as a
  // sinusoid; such fits are recorded but cannot lead the search.
  const bool avoid = cfg.stepwise_avoid_boundary &&
               std::any_of(res.visited.begin(), res.visited.end(),
                           [](const CandidateRow &r) { return !r.near_root_boundary; });
  auto eligible = [&](const CandidateRow &r) { return !(avoid && r.near_root_boundary); };

  std::size_t incumbent = res.visited.size();
  for (std::size_t i = 0; i < res.visited.size(); ++i)
    if (eligible(res.visited[i]) &&
        (incumbent == res.visited.size() || candidate_less(res.visited[i], res.visited[incumbent])))
      incumbent = i;
  for (;;) {
    const CandidateRow cur = res.visited[incumbent];
    std::vector<detail::CandidateSpec> moves;
    for (int dp = -1; dp <= 1; ++dp)
      for (int dq = -1; dq <= 1; ++dq)
        if (dp != 0 || dq != 0)
          moves.push_back({{cur.order.p + dp, d, cur.order.q + dq}, cur.constant});
    if (constants.size() > 1)
      moves.push_back({cur.order, !cur.constant});
    evaluate(moves);

    std::optional<std::size_t> challenger;
    for (const auto &m : moves) {
      const auto it = seen.find(std::make_tuple(m.order.p, m.order.q, m.constant));
      if (it == seen.end() || !it->second)
        continue;
      const auto &row = res.visited[*it->second];
      if (eligible(row) && row.aicc < cur.aicc &&
          (!challenger || candidate_less(row, res.visited[*challenger])))
        challenger = *it->second;
    }
    if (!challenger)
      break;
    incumbent = *challenger;
  }
  res.best_index = incumbent;
  return res;
}

} // namespace arimacast
