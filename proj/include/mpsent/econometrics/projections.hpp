#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/econometrics/gmm.hpp"
#include "mpsent/econometrics/instruments.hpp"

namespace mpsent::econ {

/// E_t z = a + g E_{t-1} z + b s_t + e_t by OLS with HAC errors.
inline GmmResult expectations_regression(const TimeSeriesFrame& frame, const std::string& expectation,
                                         const std::string& sentiment, const HacOptions& hac) {
  const RegressionData d =
      build_regression(frame, {expectation, 0}, {{"const", 0}, {expectation, 1}, {sentiment, 0}}, {});
  if (d.y.size() < 10)
    fail(ErrorCode::InsufficientData,
         "expectations_regression: " + std::to_string(d.y.size()) + " usable rows, need 10");
  return ols_hac(d, hac);
}

inline constexpr double kZ68 = 0.9944578832097530;
inline constexpr double kZ90 = 1.6448536269514722;

struct LpOptions {
  int horizons = 20;  // h = 0 .. horizons
  int shock_lags = 12;
  int control_lags = 1;
  HacOptions hac;
};

struct LpResult {
  std::vector<int> horizon;
  std::vector<double> beta, se, lo68, hi68, lo90, hi90;
  std::vector<Index> nobs;
};

/// Bandwidth used at horizon h: the overlap of h-step-ahead errors needs at
/// least h+1 lags.
inline int lp_bandwidth(int h, const HacOptions& hac) { return std::max(hac.bandwidth, h + 1); }

/// y_{t+h} - y_{t-1} on [1, e_t, e_{t-1..t-q}, x_{t-1..t-c}] for each h.
inline LpResult lp_irf(const TimeSeriesFrame& frame, const std::string& outcome, const std::string& shock,
                       const std::vector<std::string>& controls, const LpOptions& opt) {
  require(opt.horizons >= 0 && opt.shock_lags >= 0 && opt.control_lags >= 0, ErrorCode::InvalidArgument,
          "lp_irf: horizons and lags must be >= 0");
  const VectorXd y = frame.column(outcome), e = frame.column(shock);
  std::vector<VectorXd> x;
  for (const auto& c : controls) x.push_back(frame.column(c));
  const Index T = frame.rows();
  const Index first = std::max<Index>({1, opt.shock_lags, controls.empty() ? 0 : opt.control_lags});
  const Index k = 2 + opt.shock_lags + static_cast<Index>(controls.size()) * opt.control_lags;

  LpResult out;
  for (int h = 0; h <= opt.horizons; ++h) {
    std::vector<Index> rows;
    for (Index t = first; t + h < T; ++t) {
      bool ok = !std::isnan(y(t + h)) && !std::isnan(y(t - 1));
      for (int l = 0; l <= opt.shock_lags; ++l) ok = ok && !std::isnan(e(t - l));
      for (const auto& xc : x)
        for (int l = 1; l <= opt.control_lags; ++l) ok = ok && !std::isnan(xc(t - l));
      if (ok) rows.push_back(t);
    }
    const Index n = static_cast<Index>(rows.size());
    if (n <= k + 1)
      fail(ErrorCode::InsufficientData, "lp_irf: " + std::to_string(n) + " usable rows at horizon " +
                                            std::to_string(h));
    RegressionData d;
    d.y.resize(n);
    d.X.resize(n, k);
    for (Index r = 0; r < n; ++r) {
      const Index t = rows[static_cast<std::size_t>(r)];
      d.y(r) = y(t + h) - y(t - 1);
      Index j = 0;
      d.X(r, j++) = 1.0;
      for (int l = 0; l <= opt.shock_lags; ++l) d.X(r, j++) = e(t - l);
      for (const auto& xc : x)
        for (int l = 1; l <= opt.control_lags; ++l) d.X(r, j++) = xc(t - l);
    }
    const GmmResult fit = ols_hac(d, HacOptions{lp_bandwidth(h, opt.hac)});
    const double b = fit.coef(1), s = fit.se(1);
    out.horizon.push_back(h);
    out.beta.push_back(b);
    out.se.push_back(s);
    out.lo68.push_back(b - kZ68 * s);
    out.hi68.push_back(b + kZ68 * s);
    out.lo90.push_back(b - kZ90 * s);
    out.hi90.push_back(b + kZ90 * s);
    out.nobs.push_back(n);
  }
  return out;
}

}  // namespace mpsent::econ
