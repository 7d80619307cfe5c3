#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"

namespace mpsent {

using Date = std::chrono::year_month_day;

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

namespace detail {
inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}
}  // namespace detail

/// Accepts ISO `YYYY-MM-DD` and quarterly `YYYY-Qn`; quarters map to their
/// first day.
inline std::optional<Date> parse_date(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  using namespace std::chrono;
  if (s.size() == 7 && s[4] == '-' && (s[5] == 'Q' || s[5] == 'q')) {
    auto y = detail::parse_int(s.substr(0, 4));
    auto q = detail::parse_int(s.substr(6, 1));
    if (!y || !q || *q < 1 || *q > 4) return std::nullopt;
    return Date{year{*y}, month{static_cast<unsigned>(3 * (*q - 1) + 1)}, day{1}};
  }
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    auto y = detail::parse_int(s.substr(0, 4));
    auto m = detail::parse_int(s.substr(5, 2));
    auto d = detail::parse_int(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    Date out{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!out.ok()) return std::nullopt;
    return out;
  }
  return std::nullopt;
}

inline Date add_months(const Date& d, int months) {
  using namespace std::chrono;
  int total = static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1 + months;
  return Date{year{total / 12}, month{static_cast<unsigned>(total % 12 + 1)}, d.day()};
}

/// n consecutive quarter-start dates beginning at (year, quarter).
inline std::vector<Date> quarterly_dates(int start_year, int start_quarter, std::size_t n) {
  using namespace std::chrono;
  Date first{year{start_year}, month{static_cast<unsigned>(3 * (start_quarter - 1) + 1)}, day{1}};
  std::vector<Date> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(add_months(first, 3 * static_cast<int>(i)));
  return out;
}

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Dated, named numeric columns. Dates are strictly increasing; NaN marks a
/// missing cell.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame() = default;

  TimeSeriesFrame(std::vector<Date> dates, std::vector<std::string> names, Eigen::MatrixXd values)
      : dates_(std::move(dates)), names_(std::move(names)), values_(std::move(values)) {
    require(static_cast<Eigen::Index>(dates_.size()) == values_.rows(), ErrorCode::InvalidArgument,
            "frame: date count does not match row count");
    require(static_cast<Eigen::Index>(names_.size()) == values_.cols(), ErrorCode::InvalidArgument,
            "frame: name count does not match column count");
    for (std::size_t i = 1; i < dates_.size(); ++i) {
      if (dates_[i] == dates_[i - 1])
        fail(ErrorCode::DuplicateDate, "frame: duplicate date " + format_date(dates_[i]));
      require(dates_[i - 1] < dates_[i], ErrorCode::InvalidArgument, "frame: dates not increasing");
    }
    for (std::size_t i = 0; i < names_.size(); ++i)
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        require(names_[i] != names_[j], ErrorCode::InvalidArgument, "frame: duplicate column " + names_[i]);
  }

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const std::vector<Date>& dates() const { return dates_; }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& values() const { return values_; }

  std::optional<Eigen::Index> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<Eigen::Index>(i);
    return std::nullopt;
  }

  Eigen::Index index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) fail(ErrorCode::InvalidArgument, "frame: no column named '" + std::string(name) + "'");
    return *i;
  }

  Eigen::VectorXd column(std::string_view name) const { return values_.col(index_of(name)); }

  void set_column(const std::string& name, const Eigen::VectorXd& v) {
    require(v.size() == rows(), ErrorCode::InvalidArgument, "frame: column length mismatch for " + name);
    if (auto i = find(name)) {
      values_.col(*i) = v;
      return;
    }
    values_.conservativeResize(rows(), cols() + 1);
    values_.col(cols() - 1) = v;
    names_.push_back(name);
  }

  TimeSeriesFrame select(const std::vector<std::string>& names) const {
    Eigen::MatrixXd v(rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = column(names[j]);
    return TimeSeriesFrame(dates_, names, std::move(v));
  }

  TimeSeriesFrame slice_rows(Eigen::Index begin, Eigen::Index end) const {
    require(0 <= begin && begin <= end && end <= rows(), ErrorCode::InvalidArgument, "frame: bad row slice");
    std::vector<Date> d(dates_.begin() + begin, dates_.begin() + end);
    return TimeSeriesFrame(std::move(d), names_, values_.middleRows(begin, end - begin));
  }

  bool has_missing() const { return values_.hasNaN(); }

 private:
  std::vector<Date> dates_;
  std::vector<std::string> names_;
  Eigen::MatrixXd values_;
};

/// Rescales the named columns to in-sample mean 0 and sample variance 1.
inline TimeSeriesFrame standardize(const TimeSeriesFrame& frame, const std::vector<std::string>& columns) {
  Eigen::MatrixXd v = frame.values();
  const double n = static_cast<double>(frame.rows());
  require(frame.rows() >= 2, ErrorCode::InsufficientData, "standardize: need at least two rows");
  for (const auto& name : columns) {
    const Eigen::Index j = frame.index_of(name);
    Eigen::VectorXd c = v.col(j);
    require(!c.hasNaN(), ErrorCode::InvalidArgument, "standardize: missing values in " + name);
    const double mean = c.mean();
    c.array() -= mean;
    const double var = c.squaredNorm() / (n - 1.0);
    if (!(var > 0.0) || var < 1e-300) fail(ErrorCode::ZeroVariance, "standardize: zero variance in " + name);
    c /= std::sqrt(var);
    // one correction pass removes the rounding left by the first
    c.array() -= c.mean();
    c /= std::sqrt(c.squaredNorm() / (n - 1.0));
    v.col(j) = c;
  }
  return TimeSeriesFrame(frame.dates(), frame.names(), std::move(v));
}

}  // namespace mpsent
