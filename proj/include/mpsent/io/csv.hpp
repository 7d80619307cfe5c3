#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"

namespace mpsent::io {

using CsvTable = std::vector<std::vector<std::string>>;

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// newlines. Blank lines are skipped.
inline CsvTable parse_csv(std::string_view text) {
  CsvTable rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) fail(ErrorCode::ParseError, "csv: unterminated quoted field at line " + std::to_string(line));
  end_row();
  return rows;
}

inline std::string quote_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << content;
}

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

/// Parses a frame from CSV text with a `date` column. Rows are sorted by
/// date; empty cells and NA become missing.
inline TimeSeriesFrame parse_frame(std::string_view text) {
  CsvTable table = parse_csv(text);
  if (table.empty()) fail(ErrorCode::ParseError, "frame csv: empty input");
  const auto& header = table.front();
  std::size_t date_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (trim(header[j]) == "date") date_col = j;
  if (date_col == header.size()) fail(ErrorCode::ParseError, "frame csv: no 'date' column (row 1)");

  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != date_col) names.push_back(trim(header[j]));

  struct Row {
    Date date;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& r = table[i];
    const std::string where = "row " + std::to_string(i + 1);
    if (r.size() != header.size())
      fail(ErrorCode::ParseError, "frame csv: " + where + " has " + std::to_string(r.size()) +
                                      " fields, expected " + std::to_string(header.size()));
    auto d = parse_date(r[date_col]);
    if (!d) fail(ErrorCode::ParseError, "frame csv: " + where + ", column date: bad date '" + r[date_col] + "'");
    Row row{*d, {}};
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == date_col) continue;
      const std::string cell = trim(r[j]);
      if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        row.values.push_back(kMissing);
        continue;
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || p != cell.data() + cell.size())
        fail(ErrorCode::NonNumericCell,
             "frame csv: " + where + ", column " + trim(header[j]) + ": non-numeric '" + cell + "'");
      row.values.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].date == rows[i - 1].date)
      fail(ErrorCode::DuplicateDate, "frame csv: duplicate date " + format_date(rows[i].date));

  std::vector<Date> dates;
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dates.push_back(rows[i].date);
    for (std::size_t j = 0; j < names.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
  }
  return TimeSeriesFrame(std::move(dates), std::move(names), std::move(values));
}

inline TimeSeriesFrame load_frame(const std::string& path) { return parse_frame(read_file(path)); }

inline std::string format_frame(const TimeSeriesFrame& frame) {
  std::string out = "date";
  for (const auto& n : frame.names()) out += "," + quote_field(n);
  out += "\n";
  for (Eigen::Index i = 0; i < frame.rows(); ++i) {
    out += format_date(frame.dates()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < frame.cols(); ++j) out += "," + format_double(frame.values()(i, j));
    out += "\n";
  }
  return out;
}

inline void write_frame(const std::string& path, const TimeSeriesFrame& frame) {
  write_file(path, format_frame(frame));
}

}  // namespace mpsent::io
