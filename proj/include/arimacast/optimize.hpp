#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace arimacast {

struct NelderMeadOptions {
  double rel_tol = 1e-8;
  int max_evaluations = 5000;
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimisation. Non-finite objective values are
/// treated as +inf, which lets callers reject infeasible points.
template <class Objective>
NelderMeadResult nelder_mead(Objective &&objective, std::vector<double> start,
                             const NelderMeadOptions &opts = {}) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t n = start.size();
  NelderMeadResult res;

  auto eval = [&](const std::vector<double> &x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  if (n == 0) {
    res.value = eval(start);
    res.x = std::move(start);
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = opts.initial_step * std::max(1.0, std::abs(start[i]));
    simplex[i + 1][i] += step;
  }
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    f[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  while (res.evaluations < opts.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    if (std::isfinite(f[worst]) &&
        std::abs(f[worst] - f[best]) <= opts.rel_tol * (std::abs(f[best]) + opts.rel_tol)) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j)
          centroid[j] += simplex[i][j] / static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j)
      trial[j] = centroid[j] + kReflect * (centroid[j] - simplex[worst][j]);
    const double fr = eval(trial);

    if (fr < f[best]) {
      for (std::size_t j = 0; j < n; ++j)
        trial2[j] = centroid[j] + kExpand * (trial[j] - centroid[j]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        f[worst] = fe;
      } else {
        simplex[worst] = trial;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second]) {
      simplex[worst] = trial;
      f[worst] = fr;
      continue;
    }

    const bool outside = fr < f[worst];
    for (std::size_t j = 0; j < n; ++j)
      trial2[j] = outside ? centroid[j] + kContract * (trial[j] - centroid[j])
                          : centroid[j] + kContract * (simplex[worst][j] - centroid[j]);
    const double fc = eval(trial2);
    if (fc < std::min(fr, f[worst])) {
      simplex[worst] = trial2;
      f[worst] = fc;
      continue;
    }

    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best)
        continue;
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      f[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  res.x = simplex[best];
  res.value = f[best];
  return res;
}

} // namespace arimacast
