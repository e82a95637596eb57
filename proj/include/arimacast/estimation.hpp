#pragma once

// Gaussian maximum-likelihood ARIMA(p,d,q) estimation.
//
// The model on the d-times differenced series w_t is
//
//   w_t - mu = sum_i ar_i (w_{t-i} - mu) + e_t + sum_j ma_j e_{t-j},
//
// i.e. moving-average terms enter with a plus sign. The exact likelihood is
// evaluated with a Kalman filter on the Harvey state-space form, started
// from the stationary state covariance.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arimacast/core.hpp"
#include "arimacast/optimize.hpp"

namespace arimacast {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;

  friend auto operator<=>(const ArimaOrder &, const ArimaOrder &) = default;

  std::string to_string() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
  }
};

struct ArimaModel {
  ArimaOrder order;
  std::vector<double> ar;
  std::vector<double> ma;
  std::optional<double> constant; // mean of the differenced series
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  double aicc = 0.0;
  std::size_t n_effective = 0;
  std::vector<double> residuals; // one-step innovations, differenced scale
  std::vector<double> fitted;    // differenced scale
  std::vector<double> standard_errors; // ar..., ma..., constant
  TimeSeries series;             // the estimation window, original scale

  double min_ar_root = std::numeric_limits<double>::infinity();
  double min_ma_root = std::numeric_limits<double>::infinity();
  bool near_root_boundary = false;
  bool converged = true;
  int evaluations = 0;

  /// Estimated parameters including the innovation variance.
  int num_parameters() const {
    return order.p + order.q + 1 + (constant.has_value() ? 1 : 0);
  }

  std::vector<std::string> coefficient_names() const {
    std::vector<std::string> names;
    for (int i = 1; i <= order.p; ++i)
      names.push_back("AR(" + std::to_string(i) + ")");
    for (int i = 1; i <= order.q; ++i)
      names.push_back("MA(" + std::to_string(i) + ")");
    if (constant)
      names.emplace_back("constant");
    return names;
  }

  std::vector<double> coefficients() const {
    std::vector<double> c(ar);
    c.insert(c.end(), ma.begin(), ma.end());
    if (constant)
      c.push_back(*constant);
    return c;
  }
};

/// Thrown when the optimiser fails to converge; carries the best fit found.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, ArimaModel best)
      : Error(ErrorKind::Convergence, what), best_(std::move(best)) {}

  const ArimaModel &best_so_far() const noexcept { return best_; }

private:
  ArimaModel best_;
};

struct FitOptions {
  double rel_tol = 1e-8;
  int max_evaluations = 5000;
  int restarts = 3;
  std::uint64_t seed = 0;
  /// Fitted AR and MA roots are kept at modulus >= this value.
  double root_tolerance = 1.001;
  bool compute_stderr = true;
};

/// Fits with a root inside this modulus are flagged as boundary solutions.
inline constexpr double kBoundaryFlagModulus = 1.01;

inline double aic(double loglik, int k) { return -2.0 * loglik + 2.0 * k; }

/// Small-sample corrected AIC; n is the number of observations after
/// differencing.
inline double aicc(double loglik, int k, std::size_t n) {
  const double nd = static_cast<double>(n);
  detail::require(k >= 1 && nd > k + 1.0, ErrorKind::Domain,
                  "AICc needs n > k + 1 (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  return aic(loglik, k) + 2.0 * k * (k + 1.0) / (nd - k - 1.0);
}

namespace detail {

/// Smallest root modulus of 1 + c_1 z + ... + c_k z^k (infinity for a constant).
inline double min_root_modulus(std::span<const double> c) {
  std::size_t k = c.size();
  while (k > 0 && c[k - 1] == 0.0)
    --k;
  if (k == 0)
    return std::numeric_limits<double>::infinity();
  // Eigenvalues of the companion matrix of the reversed polynomial are the
  // reciprocal roots.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                    static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j)
    companion(0, static_cast<Eigen::Index>(j)) = -c[j];
  for (std::size_t i = 1; i < k; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  double largest = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    largest = std::max(largest, std::abs(eig(i)));
  return largest > 0.0 ? 1.0 / largest : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Smallest root modulus of the AR polynomial 1 - ar_1 z - ... - ar_p z^p.
inline double ar_min_root(std::span<const double> ar) {
  std::vector<double> c(ar.size());
  std::transform(ar.begin(), ar.end(), c.begin(), [](double a) { return -a; });
  return detail::min_root_modulus(c);
}

/// Smallest root modulus of the MA polynomial 1 + ma_1 z + ... + ma_q z^q.
inline double ma_min_root(std::span<const double> ma) { return detail::min_root_modulus(ma); }

namespace detail {

struct StateSpace {
  Eigen::MatrixXd transition;
  Eigen::VectorXd loading; // R: (1, ma_1, ..., ma_{r-1})
  Eigen::MatrixXd initial_cov;
};

/// Stationary covariance solving P = T P T' + R R' by the doubling iteration.
inline Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd &transition,
                                             const Eigen::VectorXd &loading) {
  Eigen::MatrixXd p = loading * loading.transpose();
  Eigen::MatrixXd a = transition;
  for (int it = 0; it < 128; ++it) {
    p += a * p * a.transpose();
    a = (a * a).eval();
    if (a.cwiseAbs().maxCoeff() < 1e-17)
      break;
  }
  return p;
}

inline StateSpace make_state_space(std::span<const double> ar, std::span<const double> ma) {
  const auto r = static_cast<Eigen::Index>(std::max(ar.size(), ma.size() + 1));
  StateSpace ss;
  ss.transition = Eigen::MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < ar.size(); ++i)
    ss.transition(static_cast<Eigen::Index>(i), 0) = ar[i];
  for (Eigen::Index i = 0; i + 1 < r; ++i)
    ss.transition(i, i + 1) = 1.0;
  ss.loading = Eigen::VectorXd::Zero(r);
  ss.loading(0) = 1.0;
  for (std::size_t j = 0; j < ma.size(); ++j)
    ss.loading(static_cast<Eigen::Index>(j + 1)) = ma[j];
  ss.initial_cov = stationary_covariance(ss.transition, ss.loading);
  return ss;
}

struct FilterOutput {
  std::vector<double> innovations; // v_t
  std::vector<double> gains;       // F_t (variance of v_t in units of sigma2)
  double sum_log_gain = 0.0;
  double sum_sq = 0.0; // sum v_t^2 / F_t
  Eigen::VectorXd next_state;
  Eigen::MatrixXd next_cov;
  bool ok = true;
};

/// Prediction-error decomposition of a zero-mean ARMA series.
inline FilterOutput kalman_filter(const StateSpace &ss, std::span<const double> w) {
  FilterOutput out;
  const auto r = ss.transition.rows();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
  Eigen::MatrixXd p = ss.initial_cov;
  const Eigen::MatrixXd rr = ss.loading * ss.loading.transpose();
  Eigen::VectorXd k(r);
  out.innovations.reserve(w.size());
  out.gains.reserve(w.size());
  for (double y : w) {
    const double v = y - a(0);
    const double f = p(0, 0);
    if (!(f > 0.0) || !std::isfinite(f)) {
      out.ok = false;
      return out;
    }
    out.innovations.push_back(v);
    out.gains.push_back(f);
    out.sum_log_gain += std::log(f);
    out.sum_sq += v * v / f;
    k.noalias() = ss.transition * p.col(0) / f;
    a = (ss.transition * a).eval() + k * v;
    p = (ss.transition * p * ss.transition.transpose()).eval() + rr - k * k.transpose() * f;
  }
  out.next_state = std::move(a);
  out.next_cov = std::move(p);
  return out;
}

inline std::vector<double> centered(std::span<const double> w, double mu) {
  std::vector<double> out(w.begin(), w.end());
  for (double &v : out)
    v -= mu;
  return out;
}

inline void check_order_lengths(const ArimaOrder &order, std::span<const double> ar,
                                std::span<const double> ma) {
  require(order.p >= 0 && order.d >= 0 && order.q >= 0, ErrorKind::Domain,
          "ARIMA orders must be nonnegative");
  require(ar.size() == static_cast<std::size_t>(order.p) &&
              ma.size() == static_cast<std::size_t>(order.q),
          ErrorKind::Domain, "coefficient lengths do not match order " + order.to_string());
}

inline void check_admissible(std::span<const double> ar, std::span<const double> ma) {
  require(ar_min_root(ar) > 1.0, ErrorKind::Domain, "AR polynomial is not stationary");
  require(ma_min_root(ma) > 1.0, ErrorKind::Domain, "MA polynomial is not invertible");
}

/// Concentrated (sigma2 profiled out) negative log-likelihood divided by n,
/// up to an additive constant. +inf when the filter breaks down.
inline double profile_objective(std::span<const double> ar, std::span<const double> ma,
                                std::span<const double> w_centered) {
  const auto ss = make_state_space(ar, ma);
  const auto f = kalman_filter(ss, w_centered);
  const double n = static_cast<double>(w_centered.size());
  if (!f.ok || !(f.sum_sq > 0.0))
    return std::numeric_limits<double>::infinity();
  return 0.5 * (std::log(f.sum_sq / n) + f.sum_log_gain / n);
}

} // namespace detail

/// Exact Gaussian log-likelihood of an ARMA(p,q) model for the differenced
/// values (order.d is informational only).
inline double log_likelihood(const ArimaOrder &order, std::span<const double> ar,
                             std::span<const double> ma, std::optional<double> constant,
                             double sigma2, std::span<const double> diff_values) {
  detail::check_order_lengths(order, ar, ma);
  detail::require(!diff_values.empty(), ErrorKind::InsufficientData,
                  "log-likelihood needs at least one observation");
  detail::require(sigma2 > 0.0, ErrorKind::Domain, "innovation variance must be positive");
  detail::check_admissible(ar, ma);
  const auto w = detail::centered(diff_values, constant.value_or(0.0));
  const auto f = detail::kalman_filter(detail::make_state_space(ar, ma), w);
  detail::require(f.ok, ErrorKind::Domain, "Kalman filter produced a nonpositive variance");
  const double n = static_cast<double>(w.size());
  return -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + f.sum_log_gain + f.sum_sq / sigma2);
}

/// Conditional sum of squares with pre-sample innovations set to zero,
/// conditioning on the first p observations. No stationarity requirement.
inline double css_objective(const ArimaOrder &order, std::span<const double> ar,
                            std::span<const double> ma, std::optional<double> constant,
                            std::span<const double> diff_values) {
  detail::check_order_lengths(order, ar, ma);
  const std::size_t n = diff_values.size();
  const auto p = static_cast<std::size_t>(order.p);
  detail::require(n > p, ErrorKind::InsufficientData, "CSS needs more than p observations");
  const auto w = detail::centered(diff_values, constant.value_or(0.0));
  std::vector<double> e(n, 0.0);
  double ssq = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double v = w[t];
    for (std::size_t i = 0; i < p; ++i)
      v -= ar[i] * w[t - i - 1];
    for (std::size_t j = 0; j < ma.size() && j < t; ++j)
      v -= ma[j] * e[t - j - 1];
    e[t] = v;
    ssq += v * v;
  }
  return ssq;
}

namespace detail {

/// Unconstrained reals -> AR coefficients whose roots all exceed `radius`
/// (partial autocorrelations via tanh, then Durbin-Levinson step-up).
inline std::vector<double> unconstrained_to_ar(std::span<const double> u, double radius) {
  const std::size_t k = u.size();
  std::vector<double> phi(k, 0.0), prev(k, 0.0);
  for (std::size_t m = 0; m < k; ++m) {
    const double r = std::tanh(u[m]);
    phi[m] = r;
    for (std::size_t j = 0; j < m; ++j)
      phi[j] = prev[j] - r * prev[m - 1 - j];
    std::copy(phi.begin(), phi.begin() + static_cast<long>(m) + 1, prev.begin());
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    scale /= radius;
    phi[i] *= scale;
  }
  return phi;
}

/// Inverse of unconstrained_to_ar; nullopt when `phi` lies outside the region.
inline std::optional<std::vector<double>> ar_to_unconstrained(std::span<const double> phi,
                                                              double radius) {
  const std::size_t k = phi.size();
  std::vector<double> a(phi.begin(), phi.end());
  double scale = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    scale *= radius;
    a[i] *= scale;
  }
  std::vector<double> u(k);
  for (std::size_t m = k; m-- > 0;) {
    const double r = a[m];
    if (!(std::abs(r) < 1.0))
      return std::nullopt;
    u[m] = std::atanh(r);
    std::vector<double> lower(m);
    for (std::size_t j = 0; j < m; ++j)
      lower[j] = (a[j] + r * a[m - 1 - j]) / (1.0 - r * r);
    std::copy(lower.begin(), lower.end(), a.begin());
  }
  return u;
}

/// Pulls polynomial roots out to at least `target` by rescaling z.
inline std::vector<double> shrink_ar(std::vector<double> phi, double target) {
  const double m = ar_min_root(phi);
  if (m >= target)
    return phi;
  const double s = m / target;
  double f = 1.0;
  for (double &v : phi) {
    f *= s;
    v *= f;
  }
  return phi;
}

struct ParamLayout {
  int p = 0;
  int q = 0;
  bool constant = false;
  std::size_t size() const {
    return static_cast<std::size_t>(p + q) + (constant ? 1u : 0u);
  }
};

struct Decoded {
  std::vector<double> ar, ma;
  double mu = 0.0;
};

inline Decoded decode(const ParamLayout &lay, std::span<const double> x, double radius,
                      double mu_scale) {
  Decoded d;
  const auto p = static_cast<std::size_t>(lay.p), q = static_cast<std::size_t>(lay.q);
  d.ar = unconstrained_to_ar(x.subspan(0, p), radius);
  d.ma = unconstrained_to_ar(x.subspan(p, q), radius);
  for (double &v : d.ma)
    v = -v;
  if (lay.constant)
    d.mu = x[p + q] * mu_scale;
  return d;
}

} // namespace detail

/// Evaluates ARIMA(p,d,q) at given coefficients: residuals, likelihood and
/// information criteria. Without `sigma2` the innovation variance takes its
/// maximum-likelihood value given the coefficients.
inline ArimaModel model_at(const TimeSeries &series, const ArimaOrder &order,
                           std::span<const double> ar, std::span<const double> ma,
                           std::optional<double> constant,
                           std::optional<double> sigma2 = std::nullopt) {
  detail::check_order_lengths(order, ar, ma);
  detail::check_admissible(ar, ma);
  const auto w = difference(series, order.d);
  const std::size_t n_eff = w.size();
  const auto filt = detail::kalman_filter(detail::make_state_space(ar, ma),
                                          detail::centered(w, constant.value_or(0.0)));
  detail::require(filt.ok, ErrorKind::Domain,
                  "likelihood evaluation failed for ARIMA" + order.to_string());

  ArimaModel m{.order = order, .series = series};
  m.ar.assign(ar.begin(), ar.end());
  m.ma.assign(ma.begin(), ma.end());
  m.constant = constant;
  const double nd = static_cast<double>(n_eff);
  if (sigma2) {
    detail::require(*sigma2 > 0.0, ErrorKind::Domain, "innovation variance must be positive");
    m.sigma2 = *sigma2;
    m.loglik = -0.5 * (nd * std::log(2.0 * std::numbers::pi * m.sigma2) + filt.sum_log_gain +
                       filt.sum_sq / m.sigma2);
  } else {
    detail::require(filt.sum_sq > 0.0, ErrorKind::DegenerateSeries,
                    "zero residual variance for ARIMA" + order.to_string());
    m.sigma2 = filt.sum_sq / nd;
    m.loglik =
        -0.5 * (nd * (std::log(2.0 * std::numbers::pi * m.sigma2) + 1.0) + filt.sum_log_gain);
  }
  m.n_effective = n_eff;
  m.aic = aic(m.loglik, m.num_parameters());
  m.aicc = nd > m.num_parameters() + 1.0 ? aicc(m.loglik, m.num_parameters(), n_eff)
                                          : std::numeric_limits<double>::infinity();
  m.residuals = filt.innovations;
  m.fitted.resize(n_eff);
  for (std::size_t t = 0; t < n_eff; ++t)
    m.fitted[t] = w[t] - m.residuals[t];
  m.min_ar_root = ar_min_root(m.ar);
  m.min_ma_root = ma_min_root(m.ma);
  m.near_root_boundary = std::min(m.min_ar_root, m.min_ma_root) < kBoundaryFlagModulus;
  return m;
}

/// Exact-likelihood fit of ARIMA(p,d,q). The constant, when included, is the
/// mean of the differenced series.
inline ArimaModel fit(const TimeSeries &series, const ArimaOrder &order, bool include_constant,
                      const FitOptions &opts = {}) {
  detail::require(order.p >= 0 && order.d >= 0 && order.q >= 0, ErrorKind::Domain,
                  "ARIMA orders must be nonnegative");
  const std::size_t n = series.size();
  const std::size_t needed =
      static_cast<std::size_t>(order.d) +
      std::max<std::size_t>(8, 3 * static_cast<std::size_t>(order.p + order.q + 1));
  detail::require(n >= needed, ErrorKind::InsufficientData,
                  "ARIMA" + order.to_string() + " needs at least " + std::to_string(needed) +
                      " observations, got " + std::to_string(n));

  const auto w = difference(series, order.d);
  const std::size_t n_eff = w.size();
  const double w_mean = mean(w);
  double w_sd = 0.0;
  for (double v : w)
    w_sd += (v - w_mean) * (v - w_mean);
  w_sd = std::sqrt(w_sd / static_cast<double>(n_eff));
  const double mu_scale = w_sd > 0.0 ? w_sd : 1.0;

  const detail::ParamLayout lay{order.p, order.q, include_constant};
  const auto p = static_cast<std::size_t>(order.p), q = static_cast<std::size_t>(order.q);

  // Conditional-sum-of-squares start in raw coefficient space.
  std::vector<double> raw0(lay.size(), 0.0);
  if (include_constant)
    raw0.back() = w_mean / mu_scale;
  auto css = [&](const std::vector<double> &x) {
    std::span<const double> xs(x);
    const std::optional<double> mu =
        include_constant ? std::optional<double>(x.back() * mu_scale) : std::nullopt;
    return css_objective(order, xs.subspan(0, p), xs.subspan(p, q), mu, w);
  };
  const auto css_fit = nelder_mead(css, raw0, {opts.rel_tol, opts.max_evaluations, 0.1});

  constexpr double kStartRoot = 1.05;
  std::vector<double> css_ar(css_fit.x.begin(), css_fit.x.begin() + static_cast<long>(p));
  std::vector<double> css_ma_neg(q);
  for (std::size_t j = 0; j < q; ++j)
    css_ma_neg[j] = -css_fit.x[p + j];
  css_ar = detail::shrink_ar(std::move(css_ar), kStartRoot);
  css_ma_neg = detail::shrink_ar(std::move(css_ma_neg), kStartRoot);

  std::vector<double> start(lay.size(), 0.0);
  if (auto u = detail::ar_to_unconstrained(css_ar, opts.root_tolerance))
    std::copy(u->begin(), u->end(), start.begin());
  if (auto u = detail::ar_to_unconstrained(css_ma_neg, opts.root_tolerance))
    std::copy(u->begin(), u->end(), start.begin() + static_cast<long>(p));
  if (include_constant)
    start.back() = css_fit.x.back();
  for (double &v : start)
    v = std::clamp(v, -6.0, 6.0);

  auto objective = [&](const std::vector<double> &x) {
    const auto dec = detail::decode(lay, x, opts.root_tolerance, mu_scale);
    const auto wc = detail::centered(w, dec.mu);
    return detail::profile_objective(dec.ar, dec.ma, wc);
  };

  const NelderMeadOptions nm{opts.rel_tol, opts.max_evaluations, 0.1};
  int evaluations = css_fit.evaluations;
  NelderMeadResult best;
  auto consider = [&](NelderMeadResult r) {
    evaluations += r.evaluations;
    const double tol = opts.rel_tol * (std::abs(best.value) + opts.rel_tol);
    if (r.value < best.value - tol || !std::isfinite(best.value)) {
      best = std::move(r);
    } else if (r.converged && std::abs(r.value - best.value) <= tol) {
      best.converged = true;
    }
  };
  std::vector<double> zero(lay.size(), 0.0);
  if (include_constant)
    zero.back() = w_mean / mu_scale;
  consider(nelder_mead(objective, start, nm));
  if (lay.size() > 0)
    consider(nelder_mead(objective, zero, nm));
  // Restarts from the incumbent: the first with a fresh simplex, the rest jittered.
  std::mt19937_64 rng(opts.seed ^ (0x9E3779B97F4A7C15ULL *
                                   static_cast<std::uint64_t>(1 + order.p * 31 + order.q * 7 +
                                                              (include_constant ? 1000 : 0))));
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (int k = 0; k < opts.restarts && lay.size() > 0; ++k) {
    auto s = best.x;
    if (k > 0)
      for (double &v : s)
        v += jitter(rng);
    consider(nelder_mead(objective, s, nm));
  }

  const auto dec = detail::decode(lay, best.x, opts.root_tolerance, mu_scale);
  ArimaModel m = model_at(series, order, dec.ar, dec.ma,
                          include_constant ? std::optional<double>(dec.mu) : std::nullopt);
  m.near_root_boundary =
      std::min(m.min_ar_root, m.min_ma_root) < std::max(kBoundaryFlagModulus, opts.root_tolerance + 1e-3);
  m.converged = best.converged;
  m.evaluations = evaluations;
  const double nd = static_cast<double>(n_eff);

  if (opts.compute_stderr) {
    // Inverse numerical Hessian of the profile negative log-likelihood in the
    // natural coefficient space.
    const std::vector<double> theta = m.coefficients();
    const std::size_t k = theta.size();
    m.standard_errors.assign(k, std::numeric_limits<double>::quiet_NaN());
    auto negll = [&](const std::vector<double> &c) {
      std::span<const double> cs(c);
      const auto ar = cs.subspan(0, p), ma = cs.subspan(p, q);
      if (!(ar_min_root(ar) > 1.0) || !(ma_min_root(ma) > 1.0))
        return std::numeric_limits<double>::quiet_NaN();
      const auto wc2 = detail::centered(w, include_constant ? c.back() : 0.0);
      return nd * detail::profile_objective(ar, ma, wc2);
    };
    std::vector<double> h(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double typical = (include_constant && i + 1 == k) ? mu_scale : 1.0;
      h[i] = 1e-4 * std::max(std::abs(theta[i]), typical);
    }
    Eigen::MatrixXd hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    bool finite = true;
    const double f0 = negll(theta);
    for (std::size_t i = 0; i < k && finite; ++i) {
      for (std::size_t j = i; j < k && finite; ++j) {
        double val;
        auto at = [&](double si, double sj) {
          auto c = theta;
          c[i] += si * h[i];
          c[j] += sj * h[j];
          return negll(c);
        };
        if (i == j) {
          val = (at(1, 0) - 2.0 * f0 + at(-1, 0)) / (h[i] * h[i]);
        } else {
          val = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
        }
        finite = std::isfinite(val);
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
        hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = val;
      }
    }
    if (finite && k > 0) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
      if (lu.isInvertible()) {
        const Eigen::MatrixXd cov = lu.inverse();
        for (std::size_t i = 0; i < k; ++i) {
          const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
          if (v > 0.0)
            m.standard_errors[i] = std::sqrt(v);
        }
      }
    }
  }

  if (!m.converged)
    throw ConvergenceError("optimizer did not converge for ARIMA" + order.to_string() + " after " +
                               std::to_string(opts.restarts) + " restarts",
                           std::move(m));
  return m;
}

/// Simulates ARIMA(p,d,q): ARMA innovations after a discarded burn-in,
/// integrated d times from zero. Deterministic for a fixed seed.
inline TimeSeries simulate(const ArimaOrder &order, std::span<const double> ar,
                           std::span<const double> ma, std::optional<double> constant,
                           double sigma2, std::size_t n, std::uint64_t seed,
                           Date start = make_date(2020, 1, 1)) {
  detail::check_order_lengths(order, ar, ma);
  detail::require(n >= 1, ErrorKind::Domain, "simulation length must be positive");
  detail::require(sigma2 >= 0.0, ErrorKind::Domain, "innovation variance must be nonnegative");
  detail::check_admissible(ar, ma);

  constexpr std::size_t kBurnIn = 200;
  const std::size_t total = n + kBurnIn;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = std::sqrt(sigma2);
  const double mu = constant.value_or(0.0);
  std::vector<double> e(total), x(total);
  for (std::size_t t = 0; t < total; ++t) {
    e[t] = sd * noise(rng);
    double v = e[t];
    for (std::size_t i = 0; i < ar.size() && i < t; ++i)
      v += ar[i] * x[t - i - 1];
    for (std::size_t j = 0; j < ma.size() && j < t; ++j)
      v += ma[j] * e[t - j - 1];
    x[t] = v;
  }
  std::vector<double> w(x.begin() + static_cast<long>(kBurnIn), x.end());
  for (double &v : w)
    v += mu;
  const std::vector<double> pivots(static_cast<std::size_t>(order.d), 0.0);
  return {start, integrate(w, pivots, order.d), "simulated ARIMA" + order.to_string()};
}

} // namespace arimacast
