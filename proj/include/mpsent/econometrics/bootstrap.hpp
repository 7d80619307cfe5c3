#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/parallel.hpp"
#include "mpsent/core/random.hpp"
#include "mpsent/econometrics/gmm.hpp"

namespace mpsent::econ {

struct BootstrapJOptions {
  int resamples = 199;
  int block_len = 4;
  unsigned threads = 1;
};

struct BootstrapJ {
  double j_obs = 0.0;
  double p_value = 1.0;
  int used = 0;
  int failed = 0;
  bool unreliable = false;  // more than 10% of resamples failed
  std::vector<double> j_star;  // NaN for failed resamples
};

/// Rademacher signs drawn per non-overlapping block; a trailing partial block
/// gets its own sign.
inline VectorXd block_rademacher(Rng& rng, Index T, int block_len) {
  require(block_len >= 1, ErrorCode::InvalidArgument, "bootstrap: block length must be >= 1");
  std::bernoulli_distribution coin(0.5);
  VectorXd w(T);
  for (Index start = 0; start < T; start += block_len) {
    const double v = coin(rng) ? 1.0 : -1.0;
    for (Index t = start; t < std::min<Index>(T, start + block_len); ++t) w(t) = v;
  }
  return w;
}

/// J of the two-step GMM re-run on y* = fitted + w .* residual, with fitted and
/// residual from the step-2 fit. A +1 weight reproduces y_t exactly.
inline double resampled_j(const RegressionData& d, const GmmResult& fit, const VectorXd& w, const HacOptions& hac) {
  RegressionData star = d;
  const VectorXd fitted = d.X * fit.coef;
  for (Index t = 0; t < d.y.size(); ++t)
    star.y(t) = w(t) == 1.0 ? d.y(t) : fitted(t) + w(t) * fit.residuals(t);
  return gmm_two_step(star, hac).j;
}

inline BootstrapJ bootstrap_j(const RegressionData& d, const HacOptions& hac, const BootstrapJOptions& opt,
                              std::uint64_t seed) {
  require(opt.resamples >= 1, ErrorCode::InvalidArgument, "bootstrap_j: need at least one resample");
  require(opt.block_len >= 1, ErrorCode::InvalidArgument, "bootstrap_j: block length must be >= 1");
  const GmmResult fit = gmm_two_step(d, hac);
  BootstrapJ out;
  out.j_obs = fit.j;
  out.j_star.assign(static_cast<std::size_t>(opt.resamples), std::numeric_limits<double>::quiet_NaN());
  parallel_for(out.j_star.size(), opt.threads, [&](std::size_t b) {
    Rng rng = make_stream(seed, {0x626f6f74ULL, b});
    const VectorXd w = block_rademacher(rng, d.y.size(), opt.block_len);
    try {
      out.j_star[b] = resampled_j(d, fit, w, hac);
    } catch (const Error&) {
    }
  });
  int exceed = 0;
  for (double j : out.j_star) {
    if (std::isnan(j)) {
      ++out.failed;
      continue;
    }
    ++out.used;
    if (j >= out.j_obs) ++exceed;
  }
  if (out.used == 0) fail(ErrorCode::WeightingSingular, "bootstrap_j: every resample failed");
  out.p_value = static_cast<double>(exceed) / out.used;
  out.unreliable = out.failed * 10 > opt.resamples;
  return out;
}

}  // namespace mpsent::econ
