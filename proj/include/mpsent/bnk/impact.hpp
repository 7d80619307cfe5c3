#pragma once

#include <cmath>

#include "mpsent/bnk/calibration.hpp"
#include "mpsent/bnk/signs.hpp"
#include "mpsent/bnk/stable_mode.hpp"

namespace mpsent::bnk {

struct ImpactResponse {
  double r0 = 0.0;
  double x0 = 0.0;
  double pi0 = 0.0;
  double s0 = 0.0;
  double er1 = 0.0;
  double ex1 = 0.0;
  double epi1 = 0.0;
  // anticipated only: x0 + pi0 outweighs the direct announcement term in s0
  bool dominance = true;
};

/// Factor multiplying a narrative innovation in s0 once the policy
/// contraction it triggers is netted out.
inline double narrative_bracket(const Calibration& c, const StableMode& m) {
  return 1.0 - std::abs(m.g1_mode + m.g2_mode) * ((1.0 - c.rho_r) / c.rho_r) * c.phi_s;
}

/// Impact-period closed forms for the one-period-announcement system with
/// contemporaneous sentiment (rho_s = 0). Longer announcement horizons go
/// through solve_path.
inline ImpactResponse impact_responses(const Calibration& c, ShockKind shock, double eps) {
  require(c.rho_s == 0.0, ErrorCode::InvalidArgument, "impact_responses: closed forms need rho_s = 0");
  const StableMode m = solve_stable_mode(c);
  const double a = m.alpha;
  ImpactResponse out;
  switch (shock) {
    case ShockKind::UnanticipatedMP:
      out.r0 = m.beta_g * eps;
      out.x0 = m.g1_imp * eps;
      out.pi0 = m.g2_imp * eps;
      out.s0 = c.lambda_x * out.x0 + c.lambda_pi * out.pi0;
      out.er1 = a * out.r0;
      out.ex1 = m.g1_mode * out.r0;
      out.epi1 = m.g2_mode * out.r0;
      break;
    case ShockKind::Narrative:
      out.r0 = m.beta_g * (1.0 - c.rho_r) * c.phi_s * eps;
      out.x0 = m.g1_mode / a * out.r0;
      out.pi0 = m.g2_mode / a * out.r0;
      out.s0 = c.lambda_x * out.x0 + c.lambda_pi * out.pi0 + eps;
      out.er1 = a * out.r0;
      out.ex1 = m.g1_mode * out.r0;
      out.epi1 = m.g2_mode * out.r0;
      break;
    case ShockKind::AnticipatedMP: {
      // period-1 responses to the announced rate move, discounted back
      const double ax = c.m_h * m.g1_imp + m.g2_imp / c.sigma;
      const double api = c.beta * c.m_f * m.g2_imp + c.kappa * ax;
      out.r0 = m.beta_g * (1.0 - c.rho_r) *
               (c.phi_pi_eff() * api + c.phi_x_eff() * ax + c.phi_s * c.lambda_a) * eps;
      out.x0 = m.g1_mode / a * out.r0 + ax * eps;
      out.pi0 = m.g2_mode / a * out.r0 + api * eps;
      out.s0 = c.lambda_x * out.x0 + c.lambda_pi * out.pi0 + c.lambda_a * eps;
      out.er1 = a * out.r0 + m.beta_g * eps;
      out.ex1 = m.g1_mode * out.r0 + m.g1_imp * eps;
      out.epi1 = m.g2_mode * out.r0 + m.g2_imp * eps;
      const double fundamentals = out.x0 + out.pi0;
      out.dominance = eps == 0.0 || (fundamentals * -eps > 0.0 && std::abs(fundamentals) > std::abs(eps));
      break;
    }
  }
  return out;
}

}  // namespace mpsent::bnk
