// arimacast: fit, select, forecast, diagnose and evaluate ARIMA models on
// daily incidence CSVs.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "arimacast/arimacast.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace arimacast;

namespace {

struct Options {
  // input
  std::string data;
  std::string country;
  std::string data_dir = ARIMACAST_DATA_DIR;
  std::string date_column = "date";
  std::string value_column = "value";
  std::string date_format = "%Y-%m-%d";
  std::string start, end;
  bool cumulative = false;
  double prior_total = 0.0;
  // model
  std::string order;
  bool constant = false;
  bool grid = false;
  int max_p = 8, max_q = 8, max_d = 2;
  std::optional<int> fixed_d;
  bool no_constant_search = false;
  int top = 10;
  std::uint64_t seed = 0;
  std::optional<int> max_evaluations;
  std::optional<int> restarts;
  // forecast
  int horizon = 30;
  std::string levels = "80,95";
  bool clamp_zero = false;
  double near_zero_threshold = 1.0;
  // diagnose
  int max_lag = 20;
  int fitdf = 0;
  std::string arch_lags = "1,12,24";
  // evaluate
  std::string actuals;
  std::string checkpoints = "10,20,30";
  // output
  std::string out_dir = "arimacast_out";
  bool json_out = false;
  bool csv_out = false;
};

std::string num(double v, int prec = 4) {
  if (std::isnan(v))
    return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty())
      out.push_back(item);
  return out;
}

template <class T> std::vector<T> parse_list(const std::string &s, const std::string &what) {
  std::vector<T> out;
  for (const auto &item : split(s, ',')) {
    std::istringstream in(item);
    T v{};
    if (!(in >> v) || !in.eof())
      detail::fail(ErrorKind::Domain, "invalid " + what + " '" + item + "'");
    out.push_back(v);
  }
  detail::require(!out.empty(), ErrorKind::Domain, what + " list is empty");
  return out;
}

ArimaOrder parse_order(const std::string &s) {
  const auto v = parse_list<int>(s, "order");
  detail::require(v.size() == 3, ErrorKind::Domain, "--order expects p,d,q");
  return {v[0], v[1], v[2]};
}

std::vector<double> parse_levels(const std::string &s) {
  auto v = parse_list<double>(s, "level");
  for (double &l : v)
    l = l > 1.0 ? l / 100.0 : l;
  return v;
}

std::uint64_t fnv1a(const std::string &bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  detail::require(static_cast<bool>(in), ErrorKind::Parse, "cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorKind::Parse, "cannot write " + p.string());
  out << text;
}

// ---------------------------------------------------------------------------

struct Input {
  std::string source;
  std::string file_hash;
  TimeSeries full; // whole file (daily), used for actuals
  DatasetWindow window;
};

Input load_input(const Options &o) {
  detail::require(o.data.empty() != o.country.empty(), ErrorKind::Domain,
                  "give exactly one of --data or --country");
  fs::path path = o.data;
  std::string label;
  std::optional<Date> start, end;
  if (!o.country.empty()) {
    const auto &b = bundled_dataset(o.country);
    path = fs::path(o.data_dir) / b.file;
    label = b.label;
    start = b.window_start;
    end = b.window_end;
  }
  CsvOptions csv{o.date_column, o.value_column, o.date_format, label};
  TimeSeries data = load_csv(path, csv);
  if (o.cumulative) {
    auto conv = cumulative_to_daily(data);
    for (Date d : conv.negative_days)
      std::cerr << "warning: negative daily value on " << format_date(d)
                << " (reporting correction kept)\n";
    data = conv.daily;
  }
  if (!o.start.empty())
    start = parse_iso_date(o.start);
  if (!o.end.empty())
    end = parse_iso_date(o.end);
  auto w = make_window(data, start.value_or(data.start()), end.value_or(data.end()), data.label(),
                       path.string());
  for (const auto &msg : w.warnings)
    std::cerr << "warning: " << msg << "\n";
  return {path.string(), hex64(fnv1a(read_file(path))), std::move(data), std::move(w)};
}

FitOptions fit_options(const Options &o) {
  FitOptions fo;
  fo.seed = o.seed;
  if (o.max_evaluations)
    fo.max_evaluations = *o.max_evaluations;
  if (o.restarts)
    fo.restarts = *o.restarts;
  return fo;
}

SearchConfig search_config(const Options &o) {
  SearchConfig cfg;
  cfg.max_p = o.max_p;
  cfg.max_q = o.max_q;
  cfg.max_d = o.max_d;
  cfg.fixed_d = o.fixed_d;
  cfg.stepwise = !o.grid;
  cfg.allow_constant = !o.no_constant_search;
  cfg.fit = fit_options(o);
  return cfg;
}

struct Search {
  std::string method;
  int d = 0;
  std::vector<CandidateRow> rows; // ascending AICc
  std::vector<CandidateFailure> failures;
};

Search run_search(const TimeSeries &s, const Options &o) {
  const auto cfg = search_config(o);
  Search out;
  if (o.grid) {
    auto g = grid_search(s, cfg);
    out = {"grid", g.d, std::move(g.rows), std::move(g.failures)};
  } else {
    auto r = stepwise_search(s, cfg);
    const auto best = r.best();
    std::stable_sort(r.visited.begin(), r.visited.end(), candidate_less);
    // The stepwise winner leads even if a boundary-flagged fit scored lower.
    std::stable_partition(r.visited.begin(), r.visited.end(), [&](const CandidateRow &row) {
      return row.order == best.order && row.constant == best.constant;
    });
    out = {"stepwise", r.d, std::move(r.visited), std::move(r.failures)};
  }
  return out;
}

struct Selected {
  ArimaModel model;
  std::optional<Search> search;
};

Selected select_model(const TimeSeries &s, const Options &o) {
  if (!o.order.empty())
    return {fit(s, parse_order(o.order), o.constant, fit_options(o)), std::nullopt};
  auto search = run_search(s, o);
  auto model = search.rows.front().model;
  return {std::move(model), std::move(search)};
}

// --- JSON blocks -----------------------------------------------------------

json order_json(const ArimaOrder &o) { return json::array({o.p, o.d, o.q}); }

json model_json(const ArimaModel &m) {
  json coefs = json::array();
  const auto names = m.coefficient_names();
  const auto values = m.coefficients();
  for (std::size_t i = 0; i < names.size(); ++i)
    coefs.push_back({{"name", names[i]},
                     {"estimate", values[i]},
                     {"std_error", i < m.standard_errors.size() ? jnum(m.standard_errors[i])
                                                                : json(nullptr)}});
  return {{"order", order_json(m.order)},
          {"constant", m.constant.has_value()},
          {"coefficients", coefs},
          {"sigma2", m.sigma2},
          {"loglik", m.loglik},
          {"aic", m.aic},
          {"aicc", jnum(m.aicc)},
          {"n_effective", m.n_effective},
          {"min_ar_root", jnum(m.min_ar_root)},
          {"min_ma_root", jnum(m.min_ma_root)},
          {"near_root_boundary", m.near_root_boundary}};
}

json accuracy_json(const AccuracyReport &a) {
  return {{"mae", a.mae},
          {"mape", jnum(a.mape_pct)},
          {"mase", jnum(a.mase)},
          {"rmse", a.rmse},
          {"adj_r2", a.adj_r2 ? jnum(*a.adj_r2) : json(nullptr)},
          {"forecast_accuracy_pct", jnum(a.forecast_accuracy_pct)},
          {"lewis_class", a.lewis_class},
          {"n", a.n}};
}

json candidates_json(const Search &s, int top) {
  json rows = json::array();
  for (std::size_t i = 0; i < s.rows.size() && static_cast<int>(i) < top; ++i) {
    const auto &r = s.rows[i];
    rows.push_back({{"order", order_json(r.order)},
                    {"constant", r.constant},
                    {"aicc", jnum(r.aicc)},
                    {"mae", r.mae},
                    {"mape", jnum(r.mape)},
                    {"mase", jnum(r.mase)},
                    {"rmse", r.rmse},
                    {"adj_r2", jnum(r.adj_r2)},
                    {"near_root_boundary", r.near_root_boundary}});
  }
  json failures = json::array();
  for (const auto &f : s.failures)
    failures.push_back({{"order", order_json(f.order)}, {"constant", f.constant}, {"reason", f.reason}});
  return {{"method", s.method}, {"d", s.d}, {"evaluated", s.rows.size()}, {"rows", rows},
          {"failures", failures}};
}

struct Diagnostics {
  std::vector<std::pair<LagChoice, PortmanteauResult>> ljung_box;
  std::vector<ArchLmResult> arch;
  std::vector<std::string> skipped;
  WhitenessVerdict whiteness;
};

Diagnostics run_diagnostics(const ArimaModel &m, const Options &o) {
  const auto &e = m.residuals;
  const int max_lag = std::min<int>(o.max_lag, static_cast<int>(e.size()) - 1);
  Diagnostics d{{}, {}, {}, whiteness_verdict(e, max_lag)};
  for (const auto &l : lag_schedule(e.size())) {
    try {
      d.ljung_box.emplace_back(l, ljung_box(e, l.lag, o.fitdf));
    } catch (const Error &err) {
      d.skipped.push_back("Ljung-Box " + l.label() + ": " + err.what());
    }
  }
  for (int m_lag : parse_list<int>(o.arch_lags, "ARCH lag")) {
    try {
      d.arch.push_back(arch_lm(e, m_lag));
    } catch (const Error &err) {
      d.skipped.push_back("ARCH LM lag " + std::to_string(m_lag) + ": " + err.what());
    }
  }
  return d;
}

json diagnostics_json(const Diagnostics &d) {
  json lb = json::array(), arch = json::array();
  for (const auto &[l, r] : d.ljung_box)
    lb.push_back({{"label", l.label()}, {"lag", r.lag}, {"statistic", r.statistic}, {"df", r.df},
                  {"p_value", r.p_value}, {"decision", r.decision}});
  for (const auto &r : d.arch)
    arch.push_back({{"lag", r.lag}, {"statistic", r.statistic}, {"p_value", r.p_value},
                    {"decision", r.decision}});
  return {{"ljung_box", lb},
          {"arch_lm", arch},
          {"whiteness",
           {{"max_lag", d.whiteness.acf.lags.size()},
            {"band", d.whiteness.acf.band_halfwidth},
            {"acf", d.whiteness.acf.coefficients},
            {"pacf", d.whiteness.pacf.coefficients},
            {"acf_offenders", d.whiteness.acf_offenders},
            {"pacf_offenders", d.whiteness.pacf_offenders},
            {"pass", d.whiteness.pass}}},
          {"skipped", d.skipped}};
}

Forecast run_forecast(const ArimaModel &m, const Options &o) {
  const auto levels = parse_levels(o.levels);
  auto fc = forecast(m, o.horizon, levels);
  return o.clamp_zero ? clamp_at_zero(std::move(fc)) : fc;
}

json forecast_json(const Forecast &fc, const FinalSizeEstimate &fs, const Options &o) {
  json rows = json::array();
  for (std::size_t j = 0; j < fc.mean.size(); ++j) {
    json iv = json::array();
    for (const auto &pi : fc.intervals)
      iv.push_back({{"level", pi.level}, {"lower", pi.lower[j]}, {"upper", pi.upper[j]}});
    rows.push_back({{"date", format_date(fc.dates[j])},
                    {"mean", fc.mean[j]},
                    {"variance", fc.variance[j]},
                    {"intervals", iv}});
  }
  json levels = json::array();
  for (const auto &pi : fc.intervals)
    levels.push_back(pi.level);
  return {{"horizon", fc.horizon},
          {"levels", levels},
          {"clamped_at_zero", o.clamp_zero},
          {"rows", rows},
          {"final_size",
           {{"threshold", o.near_zero_threshold},
            {"prior_total", o.prior_total},
            {"observed_total", fs.observed_total},
            {"forecast_total", fs.forecast_total},
            {"final_size", fs.final_size},
            {"days_forecast", fs.days_forecast},
            {"near_zero_date",
             fs.near_zero_date ? json(format_date(*fs.near_zero_date)) : json(nullptr)},
            {"capped", fs.capped}}}};
}

std::optional<CheckpointEvaluation> run_evaluation(const ArimaModel &m, const Input &in,
                                                   const Options &o, bool required) {
  TimeSeries actuals = in.full;
  if (!o.actuals.empty()) {
    CsvOptions csv{o.date_column, o.value_column, o.date_format, "actuals"};
    actuals = load_csv(o.actuals, csv);
    if (o.cumulative)
      actuals = cumulative_to_daily(actuals).daily;
  }
  auto cps = parse_list<int>(o.checkpoints, "checkpoint");
  if (!required) {
    // Report mode: keep the checkpoints the available actuals can cover.
    const auto avail = (actuals.end() - m.series.end()).count();
    std::erase_if(cps, [&](int k) { return k > avail; });
    if (cps.empty() || actuals.start() > m.series.end() + std::chrono::days{1})
      return std::nullopt;
  }
  return evaluate_checkpoints(m, actuals, cps);
}

json evaluation_json(const CheckpointEvaluation &ev) {
  json rows = json::array();
  for (const auto &d : ev.checkpoints)
    rows.push_back({{"label", d.label},
                    {"n_days", d.n_days},
                    {"predicted_total", d.predicted_total},
                    {"actual_total", d.actual_total},
                    {"overall_deviation", d.overall_deviation},
                    {"overall_pct_deviation", d.overall_pct_deviation},
                    {"mape", d.mape_pct},
                    {"mae", d.mae}});
  return {{"checkpoints", rows}};
}

json manifest_json(const Options &o, const Input &in, const std::string &command) {
  json cfg = {{"order", o.order.empty() ? json(nullptr) : json(o.order)},
              {"constant", o.constant},
              {"search", o.grid ? "grid" : "stepwise"},
              {"max_p", o.max_p},
              {"max_q", o.max_q},
              {"max_d", o.max_d},
              {"fixed_d", o.fixed_d ? json(*o.fixed_d) : json(nullptr)},
              {"allow_constant", !o.no_constant_search},
              {"seed", o.seed},
              {"max_evaluations", o.max_evaluations ? json(*o.max_evaluations) : json(nullptr)},
              {"restarts", o.restarts ? json(*o.restarts) : json(nullptr)},
              {"horizon", o.horizon},
              {"levels", parse_levels(o.levels)},
              {"clamp_zero", o.clamp_zero},
              {"near_zero_threshold", o.near_zero_threshold},
              {"prior_total", o.prior_total},
              {"cumulative", o.cumulative},
              {"max_lag", o.max_lag},
              {"fitdf", o.fitdf},
              {"arch_lags", parse_list<int>(o.arch_lags, "ARCH lag")},
              {"checkpoints", parse_list<int>(o.checkpoints, "checkpoint")},
              {"actuals", o.actuals.empty() ? json(nullptr) : json(o.actuals)}};
  return {{"tool", "arimacast"},
          {"command", command},
          {"input",
           {{"path", in.source},
            {"country", o.country.empty() ? json(nullptr) : json(o.country)},
            {"fnv1a64", in.file_hash},
            {"date_column", o.date_column},
            {"value_column", o.value_column},
            {"date_format", o.date_format}}},
          {"window",
           {{"label", in.window.label},
            {"start", format_date(in.window.series.start())},
            {"end", format_date(in.window.series.end())},
            {"n", in.window.series.size()},
            {"warnings", in.window.warnings}}},
          {"config", cfg},
          {"versions",
           {{"arimacast", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION},
            {"compiler", __VERSION__}}}};
}

// --- text / CSV blocks -----------------------------------------------------

void print_model(std::ostream &os, const ArimaModel &m) {
  os << "ARIMA" << m.order.to_string() << (m.constant ? " with constant" : "") << "  n_eff="
     << m.n_effective << "\n";
  os << "  parameter        estimate   std.error\n";
  const auto names = m.coefficient_names();
  const auto values = m.coefficients();
  for (std::size_t i = 0; i < names.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-12s %12.4f %11.4f\n", names[i].c_str(), values[i],
                  i < m.standard_errors.size() ? m.standard_errors[i] : std::nan(""));
    os << line;
  }
  os << "  sigma2 " << num(m.sigma2) << "  loglik " << num(m.loglik) << "  AIC " << num(m.aic, 2)
     << "  AICc " << num(m.aicc, 2) << "\n";
  if (m.near_root_boundary)
    os << "  note: a root lies near the unit circle (min AR " << num(m.min_ar_root)
       << ", min MA " << num(m.min_ma_root) << ")\n";
}

std::string candidates_csv(const Search &s) {
  std::string out = "p,d,q,constant,aicc,mae,mape,mase,rmse,adj_r2,near_root_boundary\n";
  for (const auto &r : s.rows)
    out += std::to_string(r.order.p) + "," + std::to_string(r.order.d) + "," +
           std::to_string(r.order.q) + "," + (r.constant ? "1" : "0") + "," +
           format_number(r.aicc) + "," + format_number(r.mae) + "," + format_number(r.mape) + "," +
           format_number(r.mase) + "," + format_number(r.rmse) + "," + format_number(r.adj_r2) +
           "," + (r.near_root_boundary ? "1" : "0") + "\n";
  return out;
}

void print_candidates(std::ostream &os, const Search &s, int top) {
  os << s.method << " search at d=" << s.d << ": " << s.rows.size() << " fitted, "
     << s.failures.size() << " failed\n";
  os << "  order      AICc        MAE      MAPE    MASE       RMSE   adj.R2\n";
  for (std::size_t i = 0; i < s.rows.size() && static_cast<int>(i) < top; ++i) {
    const auto &r = s.rows[i];
    char line[160];
    std::snprintf(line, sizeof line, "  %-9s %9.2f %10.2f %9.3f %7.4f %10.2f %8.3f%s\n",
                  (r.order.to_string() + (r.constant ? "+c" : "")).c_str(), r.aicc, r.mae, r.mape,
                  r.mase, r.rmse, r.adj_r2, r.near_root_boundary ? "  [boundary]" : "");
    os << line;
  }
}

std::string forecast_csv(const Forecast &fc) {
  std::string out = "date,mean";
  for (const auto &pi : fc.intervals) {
    const auto pct = std::to_string(static_cast<int>(std::lround(pi.level * 100)));
    out += ",lower_" + pct + ",upper_" + pct;
  }
  out += "\n";
  for (std::size_t j = 0; j < fc.mean.size(); ++j) {
    out += format_date(fc.dates[j]) + "," + format_number(fc.mean[j]);
    for (const auto &pi : fc.intervals)
      out += "," + format_number(pi.lower[j]) + "," + format_number(pi.upper[j]);
    out += "\n";
  }
  return out;
}

void print_diagnostics(std::ostream &os, const Diagnostics &d) {
  os << "Ljung-Box (fitdf applied to df)\n";
  for (const auto &[l, r] : d.ljung_box)
    os << "  Lags (" << l.label() << ")  Q=" << num(r.statistic) << "  df=" << r.df
       << "  p=" << num(r.p_value) << "  " << r.decision << "\n";
  os << "ARCH LM\n";
  for (const auto &r : d.arch)
    os << "  Lag (" << r.lag << ")  LM=" << num(r.statistic) << "  p=" << num(r.p_value) << "  "
       << r.decision << "\n";
  for (const auto &s : d.skipped)
    os << "  skipped: " << s << "\n";
  os << "Residual correlogram to lag " << d.whiteness.acf.lags.size() << " (band +/-"
     << num(d.whiteness.acf.band_halfwidth) << "): " << (d.whiteness.pass ? "white" : "not white");
  if (!d.whiteness.pass) {
    os << "; ACF spikes at";
    for (int k : d.whiteness.acf_offenders)
      os << " " << k;
    os << "; PACF spikes at";
    for (int k : d.whiteness.pacf_offenders)
      os << " " << k;
  }
  os << "\n";
}

std::string correlogram_csv(const Diagnostics &d) {
  std::string out = "lag,acf,pacf,band\n";
  for (std::size_t i = 0; i < d.whiteness.acf.lags.size(); ++i)
    out += std::to_string(d.whiteness.acf.lags[i]) + "," +
           format_number(d.whiteness.acf.coefficients[i]) + "," +
           format_number(d.whiteness.pacf.coefficients[i]) + "," +
           format_number(d.whiteness.acf.band_halfwidth) + "\n";
  return out;
}

void print_evaluation(std::ostream &os, const CheckpointEvaluation &ev) {
  os << "  window          days   deviation   pct.dev     MAPE        MAE\n";
  for (const auto &d : ev.checkpoints) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-16s %4zu %+11.0f %+8.2f%% %7.2f%% %10.2f\n",
                  d.label.c_str(), d.n_days, d.overall_deviation, d.overall_pct_deviation,
                  d.mape_pct, d.mae);
    os << line;
  }
}

std::string overlay_csv(const CheckpointEvaluation &ev) {
  std::string out = "date,actual,predicted\n";
  for (std::size_t j = 0; j < ev.actual.size(); ++j)
    out += format_date(ev.forecast.dates[j]) + "," + format_number(ev.actual[j]) + "," +
           format_number(ev.forecast.mean[j]) + "\n";
  return out;
}

std::string deviations_csv(const CheckpointEvaluation &ev) {
  std::string out = "label,n_days,predicted_total,actual_total,overall_deviation,"
                    "overall_pct_deviation,mape,mae\n";
  for (const auto &d : ev.checkpoints)
    out += d.label + "," + std::to_string(d.n_days) + "," + format_number(d.predicted_total) +
           "," + format_number(d.actual_total) + "," + format_number(d.overall_deviation) + "," +
           format_number(d.overall_pct_deviation) + "," + format_number(d.mape_pct) + "," +
           format_number(d.mae) + "\n";
  return out;
}

/// Flattens a JSON document into path,value rows.
void flatten(const json &j, const std::string &path, std::string &out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    std::string v = j.is_string() ? j.get<std::string>() : j.dump();
    if (v.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : v)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out += path + "," + v + "\n";
  }
}

// --- commands ----------------------------------------------------------------

class Run {
public:
  Run(const Options &o, std::string command) : o_(o), command_(std::move(command)), in_(load_input(o)) {
    fs::create_directories(o_.out_dir);
  }

  void finish() {
    write_text(fs::path(o_.out_dir) / "manifest.json", manifest_json(o_, in_, command_).dump(2) + "\n");
  }

  void fit_cmd() {
    detail::require(!o_.order.empty(), ErrorKind::Domain, "fit requires --order p,d,q");
    const auto sel = select_model(in_.window.series, o_);
    print_model(std::cout, sel.model);
    std::string csv = "name,estimate,std_error\n";
    const auto names = sel.model.coefficient_names();
    const auto values = sel.model.coefficients();
    for (std::size_t i = 0; i < names.size(); ++i)
      csv += names[i] + "," + format_number(values[i]) + "," +
             format_number(sel.model.standard_errors.at(i)) + "\n";
    write_text(fs::path(o_.out_dir) / "coefficients.csv", csv);
  }

  void auto_cmd() {
    const auto s = run_search(in_.window.series, o_);
    print_candidates(std::cout, s, o_.top);
    std::cout << "selected: ARIMA" << s.rows.front().order.to_string()
              << (s.rows.front().constant ? " with constant" : "") << "\n";
    write_text(fs::path(o_.out_dir) / "candidates.csv", candidates_csv(s));
  }

  void forecast_cmd() {
    const auto sel = select_model(in_.window.series, o_);
    const auto fc = run_forecast(sel.model, o_);
    const auto fs = final_size(sel.model, o_.prior_total, o_.near_zero_threshold);
    std::cout << "ARIMA" << sel.model.order.to_string() << " forecast, " << fc.horizon
              << " days from " << format_date(fc.dates.front()) << "\n";
    std::cout << forecast_csv(fc);
    std::cout << "near-zero crossing (mean < " << num(o_.near_zero_threshold, 2) << "/day): "
              << (fs.near_zero_date ? format_date(*fs.near_zero_date)
                                    : std::string("none within ") +
                                          std::to_string(fs.days_forecast) + " days")
              << "\n";
    std::cout << "final size: " << num(fs.final_size, 0) << " (observed " << num(fs.observed_total, 0)
              << " + forecast " << num(fs.forecast_total, 0) << ")\n";
    write_text(fs::path(o_.out_dir) / "forecast.csv", forecast_csv(fc));
  }

  void diagnose_cmd() {
    const auto sel = select_model(in_.window.series, o_);
    const auto d = run_diagnostics(sel.model, o_);
    std::cout << "ARIMA" << sel.model.order.to_string() << " residuals (n=" << sel.model.residuals.size()
              << ")\n";
    print_diagnostics(std::cout, d);
    write_text(fs::path(o_.out_dir) / "correlogram.csv", correlogram_csv(d));
  }

  void evaluate_cmd() {
    const auto sel = select_model(in_.window.series, o_);
    const auto ev = *run_evaluation(sel.model, in_, o_, true);
    std::cout << "ARIMA" << sel.model.order.to_string() << " forecast from "
              << format_date(ev.forecast.dates.front()) << " against actuals\n";
    print_evaluation(std::cout, ev);
    write_text(fs::path(o_.out_dir) / "overlay.csv", overlay_csv(ev));
    write_text(fs::path(o_.out_dir) / "deviations.csv", deviations_csv(ev));
  }

  void report_cmd() {
    const auto sel = select_model(in_.window.series, o_);
    const auto &m = sel.model;
    const auto search = sel.search ? *sel.search : run_search(in_.window.series, o_);
    const auto fc = run_forecast(m, o_);
    const auto fs = final_size(m, o_.prior_total, o_.near_zero_threshold);
    const auto ev = run_evaluation(m, in_, o_, false);
    json report = {{"schema_version", 1},
                   {"dataset",
                    {{"label", in_.window.label},
                     {"start", format_date(in_.window.series.start())},
                     {"end", format_date(in_.window.series.end())},
                     {"n", in_.window.series.size()},
                     {"warnings", in_.window.warnings}}},
                   {"model", model_json(m)},
                   {"accuracy", accuracy_json(in_sample_accuracy(m))},
                   {"candidates", candidates_json(search, o_.top)},
                   {"diagnostics", diagnostics_json(run_diagnostics(m, o_))},
                   {"forecast", forecast_json(fc, fs, o_)},
                   {"evaluation", ev ? evaluation_json(*ev) : json(nullptr)},
                   {"manifest", manifest_json(o_, in_, "report")}};
    std::string text;
    if (o_.csv_out) {
      text = "path,value\n";
      flatten(report, "", text);
      write_text(fs::path(o_.out_dir) / "report.csv", text);
    } else {
      text = report.dump(2) + "\n";
      write_text(fs::path(o_.out_dir) / "report.json", text);
    }
    std::cout << text;
  }

private:
  const Options &o_;
  std::string command_;
  Input in_;
};

void add_common(CLI::App *app, Options &o) {
  auto *src = app->add_option_group("input");
  src->add_option("--data", o.data, "daily-incidence CSV");
  src->add_option("--country", o.country, "bundled dataset: italy, russia or usa");
  src->require_option(1);
  app->add_option("--data-dir", o.data_dir, "directory of the bundled CSVs");
  app->add_option("--date-column", o.date_column);
  app->add_option("--value-column", o.value_column);
  app->add_option("--date-format", o.date_format, "%Y, %m and %d directives");
  app->add_option("--start", o.start, "window start (YYYY-MM-DD)");
  app->add_option("--end", o.end, "window end (YYYY-MM-DD)");
  app->add_flag("--cumulative", o.cumulative, "input holds cumulative totals");
  app->add_option("--prior-total", o.prior_total, "cases before the window, for the final size");
  app->add_option("--order", o.order, "p,d,q; omitted: automatic selection");
  app->add_flag("--constant", o.constant, "include a constant with --order");
  app->add_option("--seed", o.seed, "seed for optimiser restarts");
  app->add_option("--max-evaluations", o.max_evaluations, "likelihood evaluations per fit");
  app->add_option("--restarts", o.restarts, "optimiser restarts per fit");
  app->add_option("--out-dir", o.out_dir, "directory for CSV outputs and manifest.json");
  app->add_option("--top", o.top, "candidate rows to show");
  auto *search = app->add_option_group("search");
  search->add_flag("--grid", o.grid, "exhaustive grid instead of stepwise");
  search->add_flag("--stepwise", [&o](std::int64_t) { o.grid = false; }, "stepwise search (default)");
  search->add_option("--max-p", o.max_p);
  search->add_option("--max-q", o.max_q);
  search->add_option("--max-d", o.max_d);
  search->add_option("--fixed-d", o.fixed_d);
  search->add_flag("--no-constant", o.no_constant_search, "never consider a constant");
}

void add_forecast(CLI::App *app, Options &o) {
  app->add_option("--horizon", o.horizon, "days ahead");
  app->add_option("--levels", o.levels, "interval levels, e.g. 80,95");
  app->add_flag("--clamp-zero", o.clamp_zero, "floor means and bounds at zero");
  app->add_option("--near-zero-threshold", o.near_zero_threshold, "cases/day");
}

void add_diagnose(CLI::App *app, Options &o) {
  app->add_option("--max-lag", o.max_lag, "correlogram lags");
  app->add_option("--fitdf", o.fitdf, "parameters subtracted from Ljung-Box df");
  app->add_option("--arch-lags", o.arch_lags, "ARCH LM lags, e.g. 1,12,24");
}

void add_evaluate(CLI::App *app, Options &o) {
  app->add_option("--actuals", o.actuals, "CSV of later actuals (default: the input file)");
  app->add_option("--checkpoints", o.checkpoints, "days, e.g. 10,20,30");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"ARIMA modelling of daily incidence series"};
  app.require_subcommand(1);
  Options o;

  auto *fit_app = app.add_subcommand("fit", "fit one order and print its coefficients");
  auto *auto_app = app.add_subcommand("auto", "rank candidate orders by AICc");
  auto *fc_app = app.add_subcommand("forecast", "forecast with prediction intervals");
  auto *diag_app = app.add_subcommand("diagnose", "residual tests and correlogram");
  auto *eval_app = app.add_subcommand("evaluate", "forecast against later actuals");
  auto *rep_app = app.add_subcommand("report", "everything above as one document");
  for (auto *sub : {fit_app, auto_app, fc_app, diag_app, eval_app, rep_app})
    add_common(sub, o);
  for (auto *sub : {fc_app, rep_app})
    add_forecast(sub, o);
  for (auto *sub : {diag_app, rep_app})
    add_diagnose(sub, o);
  for (auto *sub : {eval_app, rep_app})
    add_evaluate(sub, o);
  auto *fmt = rep_app->add_option_group("format");
  fmt->add_flag("--json", o.json_out, "JSON (default)");
  fmt->add_flag("--csv", o.csv_out, "flattened path,value CSV");
  fmt->require_option(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App *sub = app.get_subcommands().front();
    Run run(o, sub->get_name());
    if (sub == fit_app)
      run.fit_cmd();
    else if (sub == auto_app)
      run.auto_cmd();
    else if (sub == fc_app)
      run.forecast_cmd();
    else if (sub == diag_app)
      run.diagnose_cmd();
    else if (sub == eval_app)
      run.evaluate_cmd();
    else
      run.report_cmd();
    run.finish();
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
