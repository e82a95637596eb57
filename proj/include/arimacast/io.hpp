#pragma once

// CSV ingestion/serialisation, cumulative-to-daily conversion and the
// estimation windows of the bundled country datasets.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "arimacast/core.hpp"

namespace arimacast {

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '"'))
      cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '"'))
      cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return cells;
}

inline bool read_uint(std::string_view &text, int digits, int &out) {
  if (text.size() < static_cast<std::size_t>(digits))
    return false;
  out = 0;
  for (int i = 0; i < digits; ++i) {
    const char c = text[static_cast<std::size_t>(i)];
    if (c < '0' || c > '9')
      return false;
    out = out * 10 + (c - '0');
  }
  text.remove_prefix(static_cast<std::size_t>(digits));
  return true;
}

} // namespace detail

/// Parses a date using a strftime-style format of %Y, %m, %d and literals.
inline Date parse_date(std::string_view text, std::string_view format) {
  const std::string original(text);
  int y = -1, m = -1, d = -1;
  for (std::size_t i = 0; i < format.size(); ++i) {
    bool ok = true;
    if (format[i] == '%' && i + 1 < format.size()) {
      switch (format[++i]) {
      case 'Y': ok = detail::read_uint(text, 4, y); break;
      case 'm': ok = detail::read_uint(text, 2, m); break;
      case 'd': ok = detail::read_uint(text, 2, d); break;
      default:
        detail::fail(ErrorKind::Domain, "unsupported date format directive in '" +
                                            std::string(format) + "'");
      }
    } else {
      ok = !text.empty() && text.front() == format[i];
      if (ok)
        text.remove_prefix(1);
    }
    if (!ok)
      detail::fail(ErrorKind::Parse, "date '" + original + "' does not match format '" +
                                         std::string(format) + "'");
  }
  detail::require(text.empty() && y >= 0 && m >= 0 && d >= 0, ErrorKind::Parse,
                  "date '" + original + "' does not match format '" + std::string(format) + "'");
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  detail::require(ymd.ok(), ErrorKind::Parse, "invalid calendar date '" + original + "'");
  return Date{ymd};
}

struct CsvOptions {
  std::string date_column = "date";
  std::string value_column = "value";
  std::string date_format = "%Y-%m-%d";
  std::string label; // defaults to the file stem
};

/// Parses CSV text with a header row. Rejects malformed rows, duplicate
/// dates and gaps, naming the offending line.
inline TimeSeries parse_csv(std::istream &in, const CsvOptions &opts = {},
                            const std::string &source = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line))
      return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    return true;
  };

  if (!next_line())
    detail::fail(ErrorKind::Parse, source + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  const auto header = detail::split_csv_line(line);
  auto column = [&](const std::string &name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
        return i;
    detail::fail(ErrorKind::Parse, where() + "missing column '" + name + "'");
  };
  const std::size_t date_col = column(opts.date_column);
  const std::size_t value_col = column(opts.value_column);

  std::vector<Date> dates;
  std::vector<double> values;
  while (next_line()) {
    if (line.empty())
      continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() <= std::max(date_col, value_col))
      detail::fail(ErrorKind::Parse, where() + "expected " + std::to_string(header.size()) +
                                         " fields, got " + std::to_string(cells.size()));
    Date date;
    try {
      date = parse_date(cells[date_col], opts.date_format);
    } catch (const Error &e) {
      detail::fail(ErrorKind::Parse, where() + e.what());
    }
    const std::string &cell = cells[value_col];
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
      detail::fail(ErrorKind::Parse, where() + "invalid value '" + cell + "'");
    if (!dates.empty()) {
      const auto step = (date - dates.back()).count();
      if (step == 0)
        detail::fail(ErrorKind::DataIntegrity, where() + "duplicate date " + format_date(date));
      if (step < 0)
        detail::fail(ErrorKind::DataIntegrity, where() + "date " + format_date(date) +
                                                   " is earlier than the previous row");
      if (step > 1)
        detail::fail(ErrorKind::DataIntegrity,
                     where() + "missing date " +
                         format_date(dates.back() + std::chrono::days{1}) + " before " +
                         format_date(date));
    }
    dates.push_back(date);
    values.push_back(value);
  }
  detail::require(!values.empty(), ErrorKind::Parse, source + ": no data rows");
  return {dates, std::move(values), opts.label};
}

inline TimeSeries load_csv(const std::filesystem::path &path, CsvOptions opts = {}) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorKind::Parse, "cannot open " + path.string());
  if (opts.label.empty())
    opts.label = path.stem().string();
  return parse_csv(in, opts, path.string());
}

/// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// `date,value` CSV, ISO dates, LF line endings.
inline std::string serialize_csv(const TimeSeries &series) {
  std::string out = "date,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out += format_date(series.date(i)) + "," + format_number(series[i]) + "\n";
  return out;
}

inline void write_csv(const TimeSeries &series, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorKind::Parse, "cannot write " + path.string());
  out << serialize_csv(series);
}

struct DailyConversion {
  TimeSeries daily;
  std::vector<Date> negative_days; // reporting corrections, kept as negative values
};

/// First differences of a cumulative series; the first day is kept as-is.
inline DailyConversion cumulative_to_daily(const TimeSeries &cumulative) {
  std::vector<double> daily(cumulative.size());
  std::vector<Date> negative;
  daily[0] = cumulative[0];
  for (std::size_t i = 1; i < daily.size(); ++i) {
    daily[i] = cumulative[i] - cumulative[i - 1];
    if (daily[i] < 0.0)
      negative.push_back(cumulative.date(i));
  }
  return {TimeSeries(cumulative.start(), std::move(daily), cumulative.label()), std::move(negative)};
}

inline constexpr std::size_t kMinWindowLength = 40;
inline constexpr std::size_t kRecommendedWindowLength = 50;

struct DatasetWindow {
  std::string source;
  std::string label;
  Date start;
  Date end;
  TimeSeries series;
  std::vector<std::string> warnings;
};

/// Slices [start, end] and enforces the 40-observation minimum (warning
/// below 50).
inline DatasetWindow make_window(const TimeSeries &data, Date start, Date end,
                                 std::string label = {}, std::string source = {}) {
  if (label.empty())
    label = data.label();
  TimeSeries s = data.slice(start, end);
  s = TimeSeries(s.start(), std::vector<double>(s.values().begin(), s.values().end()), label);
  detail::require(s.size() >= kMinWindowLength, ErrorKind::InsufficientData,
                  "window has " + std::to_string(s.size()) + " observations; at least " +
                      std::to_string(kMinWindowLength) + " are required");
  DatasetWindow w{std::move(source), std::move(label), start, end, std::move(s), {}};
  if (w.series.size() < kRecommendedWindowLength)
    w.warnings.push_back("window has " + std::to_string(w.series.size()) +
                         " observations; fewer than " +
                         std::to_string(kRecommendedWindowLength) + " is marginal for ARIMA");
  return w;
}

struct BundledDataset {
  std::string name;
  std::string label;
  std::string file;
  Date window_start;
  Date window_end;
};

inline const std::vector<BundledDataset> &bundled_datasets() {
  static const std::vector<BundledDataset> sets{
      {"italy", "Italy", "italy.csv", make_date(2020, 2, 22), make_date(2020, 4, 14)},
      {"russia", "Russia", "russia.csv", make_date(2020, 3, 22), make_date(2020, 5, 22)},
      {"usa", "USA", "usa.csv", make_date(2020, 3, 9), make_date(2020, 5, 16)},
  };
  return sets;
}

inline const BundledDataset &bundled_dataset(const std::string &name) {
  for (const auto &b : bundled_datasets())
    if (b.name == name)
      return b;
  detail::fail(ErrorKind::Domain, "unknown bundled dataset '" + name + "'");
}

} // namespace arimacast
