#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/parallel.hpp"
#include "mpsent/core/random.hpp"
#include "mpsent/econometrics/gmm.hpp"
#include "mpsent/econometrics/instruments.hpp"
#include "mpsent/synth/taylor_dgp.hpp"

namespace mpsent::econ {

struct LeakageConfig {
  synth::TaylorDgp dgp = synth::leakage_dgp();
  Eigen::Index T = 400;
  int reps = 200;
  std::vector<int> ks = {1, 2, 3, 4};
  unsigned threads = 1;
};

struct LeakageRow {
  std::string instruments;  // "macro" or "score"
  int k = 0;
  double mean = 0.0;     // MC mean of delta-hat
  double mc_se = 0.0;
  double bias = 0.0;
  double theta = 0.0;    // 1 - mean / delta
  int failed = 0;
};

struct LeakageTable {
  double delta = 0.0;
  std::vector<LeakageRow> rows;

  const LeakageRow& at(const std::string& kind, int k) const {
    for (const auto& r : rows)
      if (r.instruments == kind && r.k == k) return r;
    fail(ErrorCode::InvalidArgument, "leakage table: no row " + kind + " k=" + std::to_string(k));
  }
};

/// Per rep: simulate the panel, then estimate delta by IV with lagged gaps
/// (gap_pi, gap_x at lag k) and with lagged scores (s at lags k, k+1). The
/// predetermined regressors are the intercept and, when the rule smooths, the
/// lagged rate.
inline LeakageTable leakage_experiment(const LeakageConfig& cfg, std::uint64_t seed) {
  require(cfg.reps >= 1, ErrorCode::InvalidArgument, "leakage_experiment: reps must be >= 1");
  require(!cfg.ks.empty(), ErrorCode::InvalidArgument, "leakage_experiment: empty lag list");
  for (int k : cfg.ks) require(k >= 1, ErrorCode::InvalidArgument, "leakage_experiment: lags must be >= 1");
  const std::size_t nk = cfg.ks.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // est[rep][2 * j + type]
  std::vector<std::vector<double>> est(static_cast<std::size_t>(cfg.reps), std::vector<double>(2 * nk, nan));
  const TaylorColumns c;
  std::vector<LaggedColumn> x = {{"const", 0}};
  if (cfg.dgp.rho != 0.0) x.emplace_back(c.rate, 1);
  x.emplace_back(c.sentiment, 0);
  const Eigen::Index endo = static_cast<Eigen::Index>(x.size()) - 1;

  parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads, [&](std::size_t rep) {
    const auto sample = synth::simulate_taylor_panel(cfg.dgp, cfg.T, derive_seed(seed, {0x6c65616bULL, rep}));
    for (std::size_t j = 0; j < nk; ++j) {
      const int k = cfg.ks[j];
      for (int type = 0; type < 2; ++type) {
        std::vector<LaggedColumn> z(x.begin(), x.end() - 1);
        if (type == 0) {
          z.emplace_back(c.gap_pi, k);
          z.emplace_back(c.gap_x, k);
        } else {
          z.emplace_back(c.sentiment, k);
          z.emplace_back(c.sentiment, k + 1);
        }
        try {
          const RegressionData d = build_regression(sample.frame, {c.rate, 0}, x, z, static_cast<int>(endo));
          est[rep][2 * j + static_cast<std::size_t>(type)] = tsls(d)(endo);
        } catch (const Error&) {
        }
      }
    }
  });

  LeakageTable out;
  out.delta = cfg.dgp.delta;
  for (int type = 0; type < 2; ++type)
    for (std::size_t j = 0; j < nk; ++j) {
      LeakageRow row;
      row.instruments = type == 0 ? "macro" : "score";
      row.k = cfg.ks[j];
      std::vector<double> v;
      for (const auto& e : est) {
        const double val = e[2 * j + static_cast<std::size_t>(type)];
        if (std::isnan(val))
          ++row.failed;
        else
          v.push_back(val);
      }
      row.mean = row.mc_se = nan;
      if (!v.empty()) {
        const double n = static_cast<double>(v.size());
        row.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double a : v) ss += (a - row.mean) * (a - row.mean);
        row.mc_se = v.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
      }
      row.bias = row.mean - out.delta;
      row.theta = out.delta != 0.0 ? 1.0 - row.mean / out.delta : nan;
      out.rows.push_back(row);
    }
  return out;
}

}  // namespace mpsent::econ
