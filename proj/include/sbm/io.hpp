#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sbm/blocks.hpp"
#include "sbm/error.hpp"

namespace sbm::io {

enum class Sign { positive, negative };

inline Sign parse_sign(std::string_view s) {
  if (s == "positive" || s == "pos") return Sign::positive;
  if (s == "negative" || s == "neg") return Sign::negative;
  throw InputError("unknown sign '" + std::string(s) + "'");
}

inline std::string_view to_string(Sign s) { return s == Sign::positive ? "positive" : "negative"; }

struct CsvOptions {
  std::string column = "0";  ///< 0-based index, or a header name when has_header
  bool has_header = false;
  std::optional<std::string> label_column;
};

struct CsvData {
  TimeSeries series;
  std::vector<std::string> labels;  ///< empty unless a label column was selected
  std::size_t rows = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<std::size_t> as_index(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::size_t resolve_column(const std::string& selector,
                                  const std::vector<std::string_view>& header) {
  if (auto idx = as_index(selector)) return *idx;
  const auto it = std::find(header.begin(), header.end(), std::string_view(selector));
  if (it == header.end()) throw InputError("column '" + selector + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace detail

/// Parses a finite double; the whole cell must be consumed.
inline std::optional<double> parse_double(std::string_view cell) {
  cell = detail::trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Reads one numeric column of a comma-separated file. Blank lines are skipped.
inline CsvData ingest_csv(std::istream& in, const CsvOptions& opts, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> value_col;
  std::optional<std::size_t> label_col;
  std::vector<std::string> header_store;
  if (opts.has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) break;
    }
    if (detail::trim(line).empty()) throw InputError(source + ": missing header line");
    const auto cells = detail::split(line);
    value_col = detail::resolve_column(opts.column, cells);
    if (opts.label_column) label_col = detail::resolve_column(*opts.label_column, cells);
  } else {
    value_col = detail::as_index(opts.column);
    if (!value_col) throw InputError("column name '" + opts.column + "' requires --header");
    if (opts.label_column) {
      label_col = detail::as_index(*opts.label_column);
      if (!label_col) throw InputError("label column name requires --header");
    }
  }

  std::vector<double> values;
  CsvData out;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line);
    if (*value_col >= cells.size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": missing column " +
                       std::to_string(*value_col));
    }
    const auto v = parse_double(cells[*value_col]);
    if (!v) {
      throw InputError(source + ":" + std::to_string(line_no) + ": cannot parse '" +
                       std::string(cells[*value_col]) + "' as a finite number");
    }
    values.push_back(*v);
    if (label_col) {
      out.labels.emplace_back(*label_col < cells.size() ? cells[*label_col] : std::string_view{});
    }
  }
  if (values.empty()) throw InputError(source + ": no observations");
  out.rows = values.size();
  out.series = TimeSeries(std::move(values));
  return out;
}

inline CsvData ingest_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ingest_csv(in, opts, path);
}

/// r_t = log(p_{t+1} / p_t), negated for Sign::negative.
inline TimeSeries log_returns(const TimeSeries& prices, Sign sign) {
  if (prices.size() < 2) throw InputError("log returns need at least two prices");
  const auto p = prices.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) throw InputError("nonpositive price at index " + std::to_string(i));
  }
  std::vector<double> out(p.size() - 1);
  for (std::size_t t = 0; t + 1 < p.size(); ++t) {
    const double r = std::log(p[t + 1] / p[t]);
    out[t] = sign == Sign::positive ? r : -r;
  }
  return TimeSeries(std::move(out));
}

}  // namespace sbm::io
