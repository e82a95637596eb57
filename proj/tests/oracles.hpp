#pragma once

// Test-only reference computations. Nothing here calls into the library's
// likelihood, filtering or forecasting code.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Psi-weights of a stationary ARMA by direct recursion (no differencing).
inline std::vector<double> arma_psi(const std::vector<double> &ar, const std::vector<double> &ma,
                                    std::size_t count) {
  std::vector<double> psi(count, 0.0);
  psi[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) {
    double v = j <= ma.size() ? ma[j - 1] : 0.0;
    for (std::size_t i = 1; i <= ar.size() && i <= j; ++i)
      v += ar[i - 1] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

/// Autocovariances gamma_0..gamma_{lags} from a long truncated MA(infinity) sum.
inline std::vector<double> arma_autocovariance(const std::vector<double> &ar,
                                               const std::vector<double> &ma, double sigma2,
                                               std::size_t lags, std::size_t terms = 20000) {
  const auto psi = arma_psi(ar, ma, terms + lags + 1);
  std::vector<double> gamma(lags + 1, 0.0);
  for (std::size_t k = 0; k <= lags; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < terms; ++j)
      s += psi[j] * psi[j + k];
    gamma[k] = sigma2 * s;
  }
  return gamma;
}

/// log N(y; 0, Sigma) for a symmetric positive-definite Sigma via Cholesky.
inline double mvn_logpdf(const std::vector<double> &y, std::vector<std::vector<double>> sigma) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = sigma[i][j];
      for (std::size_t k = 0; k < j; ++k)
        s -= l[i][k] * l[j][k];
      l[i][j] = i == j ? std::sqrt(s) : s / l[j][j];
    }
  }
  // Solve L z = y.
  std::vector<double> z(n);
  double log_det = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k)
      s -= l[i][k] * z[k];
    z[i] = s / l[i][i];
    log_det += 2.0 * std::log(l[i][i]);
  }
  double quad = 0.0;
  for (double v : z)
    quad += v * v;
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

inline std::vector<std::vector<double>> toeplitz(const std::vector<double> &gamma, std::size_t n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = gamma[i > j ? i - j : j - i];
  return m;
}

inline double arma_dense_loglik(const std::vector<double> &y, const std::vector<double> &ar,
                                const std::vector<double> &ma, double sigma2) {
  const auto gamma = arma_autocovariance(ar, ma, sigma2, y.size());
  return mvn_logpdf(y, toeplitz(gamma, y.size()));
}

/// Exact AR(1) likelihood: stationary first term times Gaussian transitions.
inline double ar1_exact_loglik(const std::vector<double> &y, double phi, double sigma2) {
  const double n = static_cast<double>(y.size());
  double ss = (1.0 - phi * phi) * y[0] * y[0];
  for (std::size_t t = 1; t < y.size(); ++t)
    ss += (y[t] - phi * y[t - 1]) * (y[t] - phi * y[t - 1]);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * sigma2) + 0.5 * std::log(1.0 - phi * phi) -
         ss / (2.0 * sigma2);
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> out(n);
  for (double &v : out)
    v = z(rng);
  return out;
}

inline std::vector<double> cumsum(std::vector<double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    v[i] += v[i - 1];
  return v;
}

/// AR(1) by direct recursion with a stationary first draw.
inline std::vector<double> ar1_series(std::size_t n, double phi, std::uint64_t seed) {
  auto e = white_noise(n, seed);
  std::vector<double> x(n);
  x[0] = e[0] / std::sqrt(1.0 - phi * phi);
  for (std::size_t t = 1; t < n; ++t)
    x[t] = phi * x[t - 1] + e[t];
  return x;
}

/// ARCH(1): e_t = z_t sqrt(omega + alpha e_{t-1}^2).
inline std::vector<double> arch1_series(std::size_t n, double omega, double alpha,
                                        std::uint64_t seed) {
  auto z = white_noise(n + 100, seed);
  std::vector<double> e(n + 100);
  double prev = 0.0;
  for (std::size_t t = 0; t < e.size(); ++t) {
    e[t] = z[t] * std::sqrt(omega + alpha * prev * prev);
    prev = e[t];
  }
  return {e.begin() + 100, e.end()};
}

/// R^2 of y on [1, X] by normal equations and Gauss-Jordan elimination.
inline double ols_r2(const std::vector<double> &y, const std::vector<std::vector<double>> &x) {
  const std::size_t n = y.size(), k = x.size() + 1;
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  auto col = [&](std::size_t j, std::size_t t) { return j == 0 ? 1.0 : x[j - 1][t]; };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < n; ++t)
        a[i][j] += col(i, t) * col(j, t);
    for (std::size_t t = 0; t < n; ++t)
      a[i][k] += col(i, t) * y[t];
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t piv = i;
    for (std::size_t r = i + 1; r < k; ++r)
      if (std::abs(a[r][i]) > std::abs(a[piv][i]))
        piv = r;
    std::swap(a[i], a[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == i)
        continue;
      const double f = a[r][i] / a[i][i];
      for (std::size_t c = i; c <= k; ++c)
        a[r][c] -= f * a[i][c];
    }
  }
  double ybar = 0.0;
  for (double v : y)
    ybar += v;
  ybar /= static_cast<double>(n);
  double sse = 0.0, sst = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double fit = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      fit += a[j][k] / a[j][j] * col(j, t);
    sse += (y[t] - fit) * (y[t] - fit);
    sst += (y[t] - ybar) * (y[t] - ybar);
  }
  return 1.0 - sse / sst;
}

} // namespace oracle

namespace oracle {

/// Coefficients with every root outside the unit circle: partial
/// autocorrelations drawn from (-bound, bound) and stepped up.
inline std::vector<double> random_stable(std::size_t order, std::mt19937_64 &rng,
                                         double bound = 0.8) {
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> phi;
  for (std::size_t k = 0; k < order; ++k) {
    const double a = u(rng);
    std::vector<double> next(phi.size() + 1);
    for (std::size_t j = 0; j < phi.size(); ++j)
      next[j] = phi[j] - a * phi[phi.size() - 1 - j];
    next.back() = a;
    phi = std::move(next);
  }
  return phi;
}

} // namespace oracle
