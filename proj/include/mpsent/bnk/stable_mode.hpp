#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mpsent/bnk/calibration.hpp"
#include "mpsent/core/error.hpp"

namespace mpsent::bnk {

/// Autonomous mode of the rate-only state: r_t = alpha r_{t-1} + beta_g e_t,
/// (x_t, pi_t) = (g1_mode, g2_mode) r_{t-1} + (g1_imp, g2_imp) e_t.
struct StableMode {
  double alpha = 0.0;
  double g1_mode = 0.0;
  double g2_mode = 0.0;
  double beta_g = 0.0;
  double g1_imp = 0.0;
  double g2_imp = 0.0;
  double residual = 0.0;
};

namespace detail {

struct ModeLoadings {
  double g1;
  double g2;
  double denom;   // (1 - M^h a)(1 - beta M^f a) - kappa a / sigma
  double denom2;  // 1 - beta M^f a
};

inline ModeLoadings mode_loadings(const Calibration& c, double a) {
  const double d2 = 1.0 - c.beta * c.m_f * a;
  const double d = (1.0 - c.m_h * a) * d2 - c.kappa * a / c.sigma;
  const double g1 = -(a / c.sigma) * d2 / d;
  const double g2 = c.kappa * g1 / d2;
  return {g1, g2, d, d2};
}

inline double alpha_residual(const Calibration& c, double a) {
  const auto m = mode_loadings(c, a);
  return a - (c.rho_r + (1.0 - c.rho_r) * (c.phi_pi_eff() * m.g2 + c.phi_x_eff() * m.g1));
}

}  // namespace detail

/// Finds the stable mode: scan (0,1) on a 1e-4 grid for sign changes of the
/// fixed-point residual, skip brackets that straddle a pole, refine by
/// bisection, and keep the root nearest rho_r.
inline StableMode solve_stable_mode(const Calibration& c) {
  validate(c);
  require(c.rho_r > 0.0, ErrorCode::InvalidArgument, "stable mode: rho_r must be positive");
  if (!check_determinacy(c)) fail(ErrorCode::Indeterminate, "stable mode: determinacy condition fails");

  auto f = [&](double a) { return detail::alpha_residual(c, a); };
  auto poles_between = [&](double a, double b) {
    const auto ma = detail::mode_loadings(c, a);
    const auto mb = detail::mode_loadings(c, b);
    return ma.denom * mb.denom <= 0.0 || ma.denom2 * mb.denom2 <= 0.0;
  };

  std::vector<double> roots;
  if (f(c.rho_r) == 0.0) roots.push_back(c.rho_r);
  constexpr int kSteps = 10000;
  double a_prev = 1e-4;
  double f_prev = f(a_prev);
  for (int i = 2; i < kSteps; ++i) {
    const double a = i * 1e-4;
    const double fa = f(a);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (f_prev * fa < 0.0 && !poles_between(a_prev, a)) {
      double lo = a_prev, hi = a, flo = f_prev;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double root = 0.5 * (lo + hi);
      // a few secant steps tighten the residual below the bisection floor
      double x0 = lo, x1 = hi;
      for (int k = 0; k < 4 && x1 != x0; ++k) {
        const double f0 = f(x0), f1 = f(x1);
        if (f1 == f0) break;
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > a_prev && x2 < a)) break;
        x0 = x1;
        x1 = x2;
        if (std::abs(f(x1)) < std::abs(f(root))) root = x1;
      }
      roots.push_back(root);
    }
    a_prev = a;
    f_prev = fa;
  }
  if (roots.empty()) fail(ErrorCode::NoStableRoot, "stable mode: no root of the fixed-point equation in (0,1)");

  double alpha = roots.front();
  for (double r : roots)
    if (std::abs(r - c.rho_r) < std::abs(alpha - c.rho_r)) alpha = r;

  const auto m = detail::mode_loadings(c, alpha);
  StableMode out;
  out.alpha = alpha;
  out.g1_mode = m.g1;
  out.g2_mode = m.g2;
  out.beta_g = alpha / c.rho_r;
  out.g1_imp = out.beta_g / alpha * m.g1;
  out.g2_imp = out.beta_g / alpha * m.g2;
  out.residual = f(alpha);
  return out;
}

}  // namespace mpsent::bnk
