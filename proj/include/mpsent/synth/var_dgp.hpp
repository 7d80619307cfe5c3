#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/core/random.hpp"
#include "mpsent/svar/var.hpp"

namespace mpsent::synth {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct VarDgp {
  svar::VarModel model;
  std::optional<MatrixXd> impact;  // B with B B' = sigma
  std::vector<std::string> names;
};

struct VarSample {
  TimeSeriesFrame frame;
  MatrixXd shocks;  // T x n unit-normal draws (structural when impact is set)
};

inline void validate(const VarDgp& dgp) {
  const auto& m = dgp.model;
  require(m.coef.rows() == m.n && m.coef.cols() == 1 + m.n * m.p, ErrorCode::InvalidArgument,
          "var dgp: coefficient dimensions");
  require(m.sigma.rows() == m.n && m.sigma.cols() == m.n, ErrorCode::InvalidArgument, "var dgp: covariance dimensions");
  if (svar::spectral_radius(m) >= 1.0) fail(ErrorCode::UnstableDgp, "var dgp: companion spectral radius >= 1");
  if (dgp.impact) {
    require(dgp.impact->rows() == m.n && dgp.impact->cols() == m.n, ErrorCode::InvalidArgument,
            "var dgp: impact dimensions");
    require(((*dgp.impact) * dgp.impact->transpose() - m.sigma).cwiseAbs().maxCoeff() < 1e-10,
            ErrorCode::InvalidArgument, "var dgp: impact does not factor the covariance");
  }
}

/// Iterates the VAR from zero initial conditions, drops burn_in periods and
/// returns T rows dated quarterly from 1990-Q1.
inline VarSample simulate_var(const VarDgp& dgp, Index T, Index burn_in, std::uint64_t seed) {
  require(T >= 1 && burn_in >= 0, ErrorCode::InvalidArgument, "simulate_var: T must be >= 1");
  validate(dgp);
  const auto& m = dgp.model;
  const int n = m.n, p = m.p;
  MatrixXd B;
  if (dgp.impact) {
    B = *dgp.impact;
  } else {
    Eigen::LDLT<MatrixXd> ldlt(m.sigma);
    // semidefinite covariances (including zero) are allowed here
    const MatrixXd L = ldlt.matrixL();
    const VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    B = ldlt.transpositionsP().transpose() * (L * d.asDiagonal());
  }
  Rng rng = make_stream(seed, {0x766172ULL});
  const Index total = T + burn_in;
  const MatrixXd z = standard_normal(rng, n, total);
  MatrixXd y = MatrixXd::Zero(total + p, n);
  for (Index t = 0; t < total; ++t) {
    VectorXd v = m.intercept() + B * z.col(t);
    for (int j = 1; j <= p; ++j) v.noalias() += m.lag(j) * y.row(p + t - j).transpose();
    y.row(p + t) = v.transpose();
  }
  std::vector<std::string> names = dgp.names;
  if (names.empty())
    for (int i = 0; i < n; ++i) names.push_back("y" + std::to_string(i + 1));
  VarSample out{TimeSeriesFrame(quarterly_dates(1990, 1, static_cast<std::size_t>(T)), names, y.bottomRows(T)),
                z.rightCols(T).transpose()};
  return out;
}

/// Nine-variable structural VAR(1) in the order (Er, Ey, Ep, r, y, p, h,
/// bond, s). A six-variable core z = (r, y, p, h, bond, s) moves with
/// z_t = A z_{t-1} + C e_t. The survey rows are the core's own forecasts
/// (mean rate over the next four quarters, output and prices four quarters
/// out) scaled by an attention factor, plus survey noise. The first three
/// core shocks satisfy the anticipated, unanticipated and narrative sign
/// patterns, and sentiment feeds output with a lag of strength s_to_y.
struct SignDgp {
  VarDgp dgp;
  MatrixXd B;  // true impact, columns (a, u, n, three core shocks, three survey noises)
  double s_to_y = 0.30;
};

inline SignDgp make_sign_dgp(double s_to_y = 0.30, double survey_noise = 1.0, double attention = 0.6) {
  MatrixXd A(6, 6);
  // clang-format off
  A <<  0.55,  0.10, 0.15, 0.00,  0.45, 0.10,
       -0.25,  0.70, 0.00, 0.05, -0.25, s_to_y,
        0.00,  0.20, 0.60, 0.00,  0.00, 0.05,
       -0.20,  0.10, 0.00, 0.70, -0.10, 0.05,
        0.20,  0.00, 0.05, 0.00,  0.70, 0.00,
        0.00,  0.10, 0.00, 0.00,  0.00, 0.50;
  MatrixXd C(6, 6);
  C <<  0.25, -0.35,  0.60, 0.50,  0.10,  0.10,
        0.30,  0.30, -0.70, 0.80, -0.30, -0.10,
        0.10,  0.10, -0.40, 0.30,  0.80,  0.00,
        0.10,  0.10,  0.00, 0.20,  0.00,  0.30,
       -1.00, -0.30,  0.20, 0.10,  0.10,  0.80,
        0.50,  0.30,  0.50, 0.80, -0.10,  0.00;
  // clang-format on
  MatrixXd K = MatrixXd::Zero(3, 6);
  MatrixXd Ah = MatrixXd::Identity(6, 6);
  for (int h = 1; h <= 4; ++h) {
    Ah = A * Ah;
    K.row(0) += Ah.row(0) / 4.0;
  }
  K.row(1) = Ah.row(1);
  K.row(2) = Ah.row(2);
  K *= attention;

  SignDgp out;
  out.s_to_y = s_to_y;
  auto& m = out.dgp.model;
  m.n = 9;
  m.p = 1;
  m.coef = MatrixXd::Zero(9, 10);
  m.coef.block(0, 4, 3, 6) = K * A;
  m.coef.block(3, 4, 6, 6) = A;
  out.B = MatrixXd::Zero(9, 9);
  out.B.block(0, 0, 3, 6) = K * C;
  out.B.block(0, 6, 3, 3) = survey_noise * MatrixXd::Identity(3, 3);
  out.B.block(3, 0, 6, 6) = C;
  m.sigma = out.B * out.B.transpose();
  out.dgp.impact = out.B;
  out.dgp.names = {"Er", "Ey", "Ep", "r", "y", "p", "h", "bond", "s"};
  return out;
}

/// Bivariate process for local-projection checks: column "e" is a unit
/// white-noise shock and y_t = rho y_{t-1} + loading e_t + noise v_t, so the
/// response of y at horizon h is loading * rho^h.
inline VarDgp make_lp_dgp(double rho = 0.7, double loading = 1.0, double noise = 1.0) {
  VarDgp d;
  d.model.n = 2;
  d.model.p = 1;
  d.model.coef = MatrixXd::Zero(2, 3);
  d.model.coef(1, 2) = rho;
  MatrixXd B(2, 2);
  B << 1.0, 0.0, loading, noise;
  d.impact = B;
  d.model.sigma = B * B.transpose();
  d.names = {"e", "y"};
  return d;
}

}  // namespace mpsent::synth
