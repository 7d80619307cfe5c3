#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/econometrics/gmm.hpp"

namespace mpsent::econ {

enum class InstrumentSetKind { Rich, ForecastRevision, Close, Distant, Custom };

inline const char* to_string(InstrumentSetKind k) {
  switch (k) {
    case InstrumentSetKind::Rich: return "rich";
    case InstrumentSetKind::ForecastRevision: return "revision";
    case InstrumentSetKind::Close: return "close";
    case InstrumentSetKind::Distant: return "distant";
    case InstrumentSetKind::Custom: return "custom";
  }
  return "?";
}

inline InstrumentSetKind parse_instrument_set(const std::string& s) {
  for (auto k : {InstrumentSetKind::Rich, InstrumentSetKind::ForecastRevision, InstrumentSetKind::Close,
                 InstrumentSetKind::Distant, InstrumentSetKind::Custom})
    if (s == to_string(k)) return k;
  fail(ErrorCode::InvalidArgument, "unknown instrument set '" + s + "'");
}

/// Column names of the rule's variables in a frame.
struct TaylorColumns {
  std::string rate = "rate";
  std::string rstar = "rstar";
  std::string gap_pi = "gap_pi";
  std::string gap_x = "gap_x";
  std::string sentiment = "s";
  std::string rev_pi = "rev_pi";
  std::string rev_x = "rev_x";
};

/// (column, lag) pair; lag 0 is the contemporaneous value.
using LaggedColumn = std::pair<std::string, int>;

inline std::vector<LaggedColumn> excluded_set(InstrumentSetKind kind, const TaylorColumns& c,
                                              const std::vector<LaggedColumn>& custom = {}) {
  std::vector<LaggedColumn> z;
  auto lags = [&](const std::string& col, int from, int to) {
    for (int l = from; l <= to; ++l) z.emplace_back(col, l);
  };
  switch (kind) {
    case InstrumentSetKind::Rich:
      lags(c.rate, 2, 5);
      lags(c.gap_pi, 1, 4);
      lags(c.gap_x, 1, 4);
      break;
    case InstrumentSetKind::ForecastRevision:
      z = {{c.rate, 2}, {c.rev_pi, 0}, {c.rev_x, 0}};
      break;
    case InstrumentSetKind::Close:
      lags(c.rate, 2, 3);
      lags(c.gap_pi, 1, 2);
      lags(c.gap_x, 1, 2);
      break;
    case InstrumentSetKind::Distant:
      lags(c.rate, 4, 5);
      lags(c.gap_pi, 3, 4);
      lags(c.gap_x, 3, 4);
      break;
    case InstrumentSetKind::Custom:
      require(!custom.empty(), ErrorCode::InvalidArgument, "custom instrument set is empty");
      z = custom;
      break;
  }
  return z;
}

inline std::string lagged_name(const LaggedColumn& c) {
  return c.second == 0 ? c.first : c.first + "_l" + std::to_string(c.second);
}

/// Builds a regression from a frame: y = `dependent` at t, regressors and
/// instruments at the stated lags, over the rows where every lag exists and
/// nothing is missing. An "const" entry adds an intercept.
inline RegressionData build_regression(const TimeSeriesFrame& frame, const LaggedColumn& dependent,
                                       const std::vector<LaggedColumn>& regressors,
                                       const std::vector<LaggedColumn>& instruments, int endogenous = -1) {
  int max_lag = dependent.second;
  for (const auto* v : {&regressors, &instruments})
    for (const auto& c : *v) {
      require(c.second >= 0, ErrorCode::InvalidArgument, "negative lag for " + c.first);
      max_lag = std::max(max_lag, c.second);
    }
  auto value = [&](const LaggedColumn& c, Index t) {
    if (c.first == "const") return 1.0;
    return frame.values()(t - c.second, frame.index_of(c.first));
  };
  std::vector<Index> rows;
  for (Index t = max_lag; t < frame.rows(); ++t) {
    bool ok = !std::isnan(value(dependent, t));
    for (const auto* v : {&regressors, &instruments})
      for (const auto& c : *v) ok = ok && !std::isnan(value(c, t));
    if (ok) rows.push_back(t);
  }
  const Index T = static_cast<Index>(rows.size());
  RegressionData d;
  d.y.resize(T);
  d.X.resize(T, static_cast<Index>(regressors.size()));
  d.Z.resize(T, static_cast<Index>(instruments.size()));
  for (Index r = 0; r < T; ++r) {
    const Index t = rows[static_cast<std::size_t>(r)];
    d.y(r) = value(dependent, t);
    for (std::size_t j = 0; j < regressors.size(); ++j) d.X(r, static_cast<Index>(j)) = value(regressors[j], t);
    for (std::size_t j = 0; j < instruments.size(); ++j) d.Z(r, static_cast<Index>(j)) = value(instruments[j], t);
  }
  for (const auto& c : regressors) d.x_names.push_back(lagged_name(c));
  for (const auto& c : instruments) d.z_names.push_back(lagged_name(c));
  d.endogenous = endogenous;
  return d;
}

/// Taylor rule i_t on [1, i_{t-1}, r*_t, gap_pi_t, gap_x_t, s_t] with s_t
/// endogenous; instruments are the included exogenous regressors plus the
/// excluded set of `kind`.
inline RegressionData taylor_regression(const TimeSeriesFrame& frame, InstrumentSetKind kind,
                                        const TaylorColumns& c = {}, const std::vector<LaggedColumn>& custom = {}) {
  const std::vector<LaggedColumn> x = {{"const", 0}, {c.rate, 1}, {c.rstar, 0},
                                       {c.gap_pi, 0}, {c.gap_x, 0}, {c.sentiment, 0}};
  std::vector<LaggedColumn> z(x.begin(), x.end() - 1);
  for (auto& e : excluded_set(kind, c, custom)) z.push_back(std::move(e));
  return build_regression(frame, {c.rate, 0}, x, z, 5);
}

}  // namespace mpsent::econ
