#pragma once

#include <string>

#include "mpsent/core/error.hpp"

namespace mpsent::bnk {

/// Structural parameters of the linearized behavioral NK model with a
/// sentiment law of motion. Defaults are the baseline calibration with
/// household attention 0.8 and sentiment loading 0.5 in the rule.
struct Calibration {
  double beta = 0.99;
  double sigma = 1.0;
  double kappa = 0.15;
  double rho_r = 0.9;
  double phi_pi = 1.5;
  double phi_x = 0.0;
  double phi_s = 0.5;
  int tau = 4;
  double m_h = 0.8;
  double m_f = 0.85;
  double m_s = 0.85;
  double rho_s = 0.0;
  double lambda_x = 1.0;
  double lambda_pi = 1.0;
  double lambda_a = 1.0;
  // Calvo reset probability; kappa is calibrated directly so this is only
  // carried along for reporting.
  double theta = 0.75;

  /// Rule loadings once s_t = lambda_x x_t + lambda_pi pi_t is substituted.
  double phi_pi_eff() const { return phi_pi + phi_s * lambda_pi; }
  double phi_x_eff() const { return phi_x + phi_s * lambda_x; }
};

inline void validate(const Calibration& c) {
  auto in_open01 = [](double v) { return v > 0.0 && v < 1.0; };
  auto in_half_open01 = [](double v) { return v > 0.0 && v <= 1.0; };
  require(in_open01(c.beta), ErrorCode::InvalidArgument, "calibration: beta must lie in (0,1)");
  require(c.rho_r >= 0.0 && c.rho_r < 1.0, ErrorCode::InvalidArgument, "calibration: rho_r must lie in [0,1)");
  require(in_half_open01(c.m_h) && in_half_open01(c.m_f) && in_half_open01(c.m_s), ErrorCode::InvalidArgument,
          "calibration: attention parameters must lie in (0,1]");
  require(c.tau >= 1, ErrorCode::InvalidArgument, "calibration: tau must be >= 1");
  require(c.kappa > 0.0, ErrorCode::InvalidArgument, "calibration: kappa must be positive");
  require(c.sigma > 0.0, ErrorCode::InvalidArgument, "calibration: sigma must be positive");
}

/// Determinacy condition of the discounted NK model with the sentiment-
/// augmented rule.
inline bool check_determinacy(const Calibration& c) {
  const double bmf = 1.0 - c.beta * c.m_f;
  const double lhs = c.phi_pi_eff() + bmf / c.kappa * c.phi_x_eff() + c.sigma * bmf * (1.0 - c.m_h) / c.kappa;
  return lhs > 1.0;
}

}  // namespace mpsent::bnk
