#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/core/random.hpp"

namespace mpsent::synth {

/// Taylor-rule panel with endogenous sentiment.
///
///   i_t  = c + rho i_{t-1} + alpha r*_t + gamma gpi_t + beta gx_t + delta s*_t + u_t
///   s*_t = rho_s s*_{t-1} + sum_{j=0..4} m_s^j (lambda_x b_{t-j} + lambda_pi a_{t-j}) - psi i_t + e_t
///
/// a (inflation) and b (output) are latent AR(1) gaps that respond to last
/// period's policy shock with loading -kappa_u. Staff gap forecasts are
/// gpi = rho_m^4 a and gx = rho_m^2 b. With leak > 0 the observed score is
/// s = s* + leak * mean(m_{t+1..t+H}) + noise, m = lambda_x b + lambda_pi a.
struct TaylorDgp {
  double c = 0.2;
  double rho = 0.5;
  double alpha = 0.3;
  double gamma = 0.5;
  double beta = 0.3;
  double delta = 0.4;
  double sd_u = 0.3;

  double rho_s = 0.8;
  double m_s = 0.85;
  double lambda_x = 1.0;
  double lambda_pi = 1.0;
  double psi = 0.5;  // 0 switches the simultaneity off
  double sd_s = 0.3;

  double rho_m = 0.8;
  double sd_m = 0.5;
  double kappa_u = 0.0;

  double rstar_mean = 1.0;
  double rstar_rho = 0.9;
  double sd_rstar = 0.2;

  double leak = 0.0;
  int leak_horizon = 4;
  double leak_noise = 0.1;

  int burn_in = 200;
};

/// Preset for the look-ahead leakage experiment: no smoothing or gap terms in
/// the rule, policy shocks feeding next-quarter macro, a persistent score and
/// a long forward window.
inline TaylorDgp leakage_dgp(double leak = 10.0, int horizon = 16) {
  TaylorDgp d;
  d.rho = 0.0;
  d.alpha = 0.0;
  d.gamma = 0.0;
  d.beta = 0.0;
  d.psi = 0.0;
  d.rho_s = 0.9;
  d.rho_m = 0.5;
  d.kappa_u = 1.0;
  d.leak = leak;
  d.leak_horizon = horizon;
  return d;
}

inline void validate(const TaylorDgp& d) {
  require(std::abs(d.rho) < 1.0, ErrorCode::InvalidArgument, "taylor dgp: |rho| must be < 1");
  require(d.leak_horizon >= 1, ErrorCode::InvalidArgument, "taylor dgp: leakage horizon must be >= 1");
  require(std::abs(1.0 + d.delta * d.psi) > 1e-12, ErrorCode::InvalidArgument,
          "taylor dgp: 1 + delta psi must be nonzero");
  require(d.sd_u >= 0 && d.sd_s >= 0 && d.sd_m >= 0 && d.sd_rstar >= 0 && d.leak_noise >= 0,
          ErrorCode::InvalidArgument, "taylor dgp: noise scales must be nonnegative");
  require(d.burn_in >= 0, ErrorCode::InvalidArgument, "taylor dgp: burn-in must be >= 0");
}

struct TaylorSample {
  /// rate, rstar, gap_pi, gap_x, s, s_star, rev_pi, rev_x
  TimeSeriesFrame frame;
  Eigen::MatrixXd shocks;  // T x 2: policy shock u, narrative innovation e
};

inline TaylorSample simulate_taylor_panel(const TaylorDgp& d, Eigen::Index T, std::uint64_t seed) {
  require(T >= 50, ErrorCode::InvalidArgument, "simulate_taylor_panel: T must be >= 50");
  validate(d);
  const Eigen::Index burn = d.burn_in, H = d.leak_horizon;
  const Eigen::Index n = burn + T + H;
  // Draws are indexed from the end of the path, so a longer burn-in only
  // prepends history and leaves the sample-period innovations unchanged.
  auto draw = [&](std::uint64_t k, double sd) {
    Rng rng = make_stream(seed, {0x7461796cULL, k});
    return Eigen::VectorXd(sd * standard_normal(rng, n).reverse());
  };
  const Eigen::VectorXd eu = draw(0, d.sd_u), es = draw(1, d.sd_s), ea = draw(2, d.sd_m), eb = draw(3, d.sd_m),
                        er = draw(4, d.sd_rstar), en = draw(5, d.leak_noise);

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = a, rs = a, i = a, s = a;
  rs(0) = d.rstar_mean;
  const double p4 = std::pow(d.rho_m, 4), p2 = std::pow(d.rho_m, 2);
  for (Eigen::Index t = 1; t < n; ++t) {
    a(t) = d.rho_m * a(t - 1) - d.kappa_u * eu(t - 1) + ea(t);
    b(t) = d.rho_m * b(t - 1) - d.kappa_u * eu(t - 1) + eb(t);
    rs(t) = d.rstar_mean * (1.0 - d.rstar_rho) + d.rstar_rho * rs(t - 1) + er(t);
  }
  const Eigen::VectorXd gpi = p4 * a, gx = p2 * b;
  const Eigen::VectorXd m = d.lambda_x * b + d.lambda_pi * a;
  for (Eigen::Index t = 1; t < n; ++t) {
    const double rule = d.c + d.rho * i(t - 1) + d.alpha * rs(t) + d.gamma * gpi(t) + d.beta * gx(t) + eu(t);
    double law = d.rho_s * s(t - 1) + es(t);
    double w = 1.0;
    for (Eigen::Index j = 0; j <= 4 && t - j >= 0; ++j, w *= d.m_s) law += w * m(t - j);
    // i = rule + delta s, s = law - psi i
    i(t) = (rule + d.delta * law) / (1.0 + d.delta * d.psi);
    s(t) = law - d.psi * i(t);
    if (!(std::abs(i(t)) <= 1e6)) fail(ErrorCode::ExplosivePath, "simulate_taylor_panel: rate diverged");
  }

  Eigen::MatrixXd v(T, 8);
  Eigen::MatrixXd shocks(T, 2);
  for (Eigen::Index r = 0; r < T; ++r) {
    const Eigen::Index t = burn + r;
    double eta = 0.0;
    if (d.leak != 0.0) eta = d.leak * m.segment(t + 1, H).mean() + en(t);
    v(r, 0) = i(t);
    v(r, 1) = rs(t);
    v(r, 2) = gpi(t);
    v(r, 3) = gx(t);
    v(r, 4) = s(t) + eta;
    v(r, 5) = s(t);
    v(r, 6) = t > 0 ? gpi(t) - d.rho_m * gpi(t - 1) : gpi(t);
    v(r, 7) = t > 0 ? gx(t) - d.rho_m * gx(t - 1) : gx(t);
    shocks(r, 0) = eu(t);
    shocks(r, 1) = es(t);
  }
  return {TimeSeriesFrame(quarterly_dates(1990, 1, static_cast<std::size_t>(T)),
                          {"rate", "rstar", "gap_pi", "gap_x", "s", "s_star", "rev_pi", "rev_x"}, std::move(v)),
          std::move(shocks)};
}

}  // namespace mpsent::synth
