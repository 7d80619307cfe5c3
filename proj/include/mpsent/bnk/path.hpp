#pragma once

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/bnk/calibration.hpp"
#include "mpsent/bnk/signs.hpp"
#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/core/random.hpp"

namespace mpsent::bnk {

/// Full: the distributed lag over the announcement window with M^(tau-k)
/// discounts. Contemporaneous: only the k = tau term, s_t = rho_s s_{t-1} +
/// lambda.(x_t, pi_t, e^a_t) + e^s_t.
enum class SentimentLaw { Full, Contemporaneous };

struct PathOptions {
  SentimentLaw law = SentimentLaw::Full;
  int stack_horizon = 0;  // 0 selects max(200, 10 tau, horizons + 1)
};

/// Perfect-foresight responses. Expectation paths are one step ahead:
/// e_r[h] = E_h r_{h+1}, which on the deterministic path is r[h+1].
struct ImpulseResponseSet {
  ShockKind shock = ShockKind::UnanticipatedMP;
  int horizons = 0;
  Eigen::VectorXd r, x, pi, s;
  Eigen::VectorXd e_r, e_x, e_pi;

  const Eigen::VectorXd& path(Role role) const {
    switch (role) {
      case Role::R: return r;
      case Role::S: return s;
      case Role::ER: return e_r;
      case Role::EX: return e_x;
      case Role::EPi: return e_pi;
      case Role::X: return x;
      case Role::Pi: return pi;
    }
    return r;
  }
};

/// Stacks the IS curve, Phillips curve, rule and sentiment law over H
/// periods with all variables zero beyond the horizon and solves the
/// resulting linear system. Unknowns are ordered (x, pi, r, s) per period.
inline ImpulseResponseSet solve_path(const Calibration& c, ShockKind shock, double eps, int horizons,
                                     const PathOptions& opt = {}) {
  validate(c);
  if (!check_determinacy(c)) fail(ErrorCode::Indeterminate, "solve_path: determinacy condition fails");
  require(horizons >= c.tau + 10, ErrorCode::InvalidArgument, "solve_path: horizons must be at least tau + 10");
  const int H = opt.stack_horizon > 0 ? std::max(opt.stack_horizon, horizons + 1)
                                      : std::max({200, 10 * c.tau, horizons + 1});
  const int tau = c.tau;
  const Eigen::Index n = 4 * static_cast<Eigen::Index>(H);
  auto X = [](int t) { return 4 * static_cast<Eigen::Index>(t); };
  auto P = [](int t) { return 4 * static_cast<Eigen::Index>(t) + 1; };
  auto R = [](int t) { return 4 * static_cast<Eigen::Index>(t) + 2; };
  auto S = [](int t) { return 4 * static_cast<Eigen::Index>(t) + 3; };

  std::vector<double> eu(static_cast<std::size_t>(H), 0.0), ea(eu), es(eu);
  switch (shock) {
    case ShockKind::UnanticipatedMP: eu[0] = eps; break;
    case ShockKind::AnticipatedMP: ea[0] = eps; break;
    case ShockKind::Narrative: es[0] = eps; break;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  const double inv_sigma = 1.0 / c.sigma;
  for (int t = 0; t < H; ++t) {
    const Eigen::Index q = 4 * static_cast<Eigen::Index>(t);
    const bool has_next = t + 1 < H;
    // x_t = M^h x_{t+1} - (r_t - pi_{t+1}) / sigma
    A(q, X(t)) = 1.0;
    A(q, R(t)) += inv_sigma;
    if (has_next) {
      A(q, X(t + 1)) -= c.m_h;
      A(q, P(t + 1)) -= inv_sigma;
    }
    // pi_t = beta M^f pi_{t+1} + kappa x_t
    A(q + 1, P(t)) = 1.0;
    A(q + 1, X(t)) -= c.kappa;
    if (has_next) A(q + 1, P(t + 1)) -= c.beta * c.m_f;
    // r_t = rho_r r_{t-1} + (1-rho_r)(phi_pi pi + phi_x x + phi_s s) + e^u_t + e^a_{t-tau}
    A(q + 2, R(t)) = 1.0;
    if (t > 0) A(q + 2, R(t - 1)) -= c.rho_r;
    A(q + 2, P(t)) -= (1.0 - c.rho_r) * c.phi_pi;
    A(q + 2, X(t)) -= (1.0 - c.rho_r) * c.phi_x;
    A(q + 2, S(t)) -= (1.0 - c.rho_r) * c.phi_s;
    b(q + 2) = eu[static_cast<std::size_t>(t)] + (t >= tau ? ea[static_cast<std::size_t>(t - tau)] : 0.0);
    // sentiment law of motion
    A(q + 3, S(t)) = 1.0;
    if (t > 0) A(q + 3, S(t - 1)) -= c.rho_s;
    double rhs = es[static_cast<std::size_t>(t)];
    const int k_first = opt.law == SentimentLaw::Full ? 0 : tau;
    for (int k = k_first; k <= tau; ++k) {
      const int d = t - tau + k;
      if (d < 0) continue;
      const double w = std::pow(c.m_s, tau - k);
      A(q + 3, X(d)) -= w * c.lambda_x;
      A(q + 3, P(d)) -= w * c.lambda_pi;
      rhs += w * c.lambda_a * ea[static_cast<std::size_t>(d)];
    }
    b(q + 3) = rhs;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) fail(ErrorCode::SingularSystem, "solve_path: stacked system is singular");
  const Eigen::VectorXd z = lu.solve(b);
  if (!z.allFinite()) fail(ErrorCode::SingularSystem, "solve_path: non-finite solution");

  ImpulseResponseSet out;
  out.shock = shock;
  out.horizons = horizons;
  for (auto* v : {&out.r, &out.x, &out.pi, &out.s, &out.e_r, &out.e_x, &out.e_pi}) v->resize(horizons);
  auto at = [&](Eigen::Index idx) { return idx < n ? z(idx) : 0.0; };
  for (int h = 0; h < horizons; ++h) {
    out.x(h) = z(X(h));
    out.pi(h) = z(P(h));
    out.r(h) = z(R(h));
    out.s(h) = z(S(h));
    out.e_x(h) = at(X(h + 1));
    out.e_pi(h) = at(P(h + 1));
    out.e_r(h) = at(R(h + 1));
  }
  return out;
}

/// Observables (x, pi, r, s) driven by arbitrary shock sequences, built by
/// superposing unit responses of the linear system. Dates are quarterly
/// from 2000-Q1.
inline TimeSeriesFrame simulate_bnk(const Calibration& c, const Eigen::VectorXd& eu, const Eigen::VectorXd& ea,
                                    const Eigen::VectorXd& es, const PathOptions& opt = {}) {
  require(eu.size() == ea.size() && ea.size() == es.size(), ErrorCode::InvalidArgument,
          "simulate_bnk: shock sequences differ in length");
  const Eigen::Index T = eu.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(T, 4);
  if (T > 0) {
    const int horizons = std::max(static_cast<int>(T), c.tau + 10);
    const std::array<std::pair<ShockKind, const Eigen::VectorXd*>, 3> inputs = {
        std::pair{ShockKind::UnanticipatedMP, &eu}, std::pair{ShockKind::AnticipatedMP, &ea},
        std::pair{ShockKind::Narrative, &es}};
    for (const auto& [kind, seq] : inputs) {
      if (seq->isZero(0.0)) continue;
      const ImpulseResponseSet irf = solve_path(c, kind, 1.0, horizons, opt);
      for (Eigen::Index t0 = 0; t0 < T; ++t0) {
        const double e = (*seq)(t0);
        if (e == 0.0) continue;
        for (Eigen::Index t = t0; t < T; ++t) {
          const Eigen::Index h = t - t0;
          out(t, 0) += e * irf.x(h);
          out(t, 1) += e * irf.pi(h);
          out(t, 2) += e * irf.r(h);
          out(t, 3) += e * irf.s(h);
        }
      }
    }
  }
  return TimeSeriesFrame(quarterly_dates(2000, 1, static_cast<std::size_t>(T)), {"x", "pi", "r", "s"}, std::move(out));
}

/// Draws i.i.d. normal shocks with the given standard deviations from the
/// seeded stream and simulates.
inline TimeSeriesFrame simulate_bnk(const Calibration& c, Eigen::Index T, double sd_u, double sd_a, double sd_s,
                                    std::uint64_t seed, const PathOptions& opt = {}) {
  Rng rng = make_stream(seed, {0x626e6bULL});
  const Eigen::MatrixXd z = standard_normal(rng, T, 3);
  return simulate_bnk(c, sd_u * z.col(0), sd_a * z.col(1), sd_s * z.col(2), opt);
}

}  // namespace mpsent::bnk
