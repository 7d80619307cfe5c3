#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"

namespace mpsent::svar {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t, u_t ~ (0, sigma).
/// coef is n x (1 + n p) laid out as [c, A_1, ..., A_p].
struct VarModel {
  int n = 0;
  int p = 0;
  MatrixXd coef;
  MatrixXd sigma;

  VectorXd intercept() const { return coef.col(0); }
  auto lag(int j) const { return coef.block(0, 1 + (j - 1) * n, n, n); }
  auto lag(int j) { return coef.block(0, 1 + (j - 1) * n, n, n); }
};

/// OLS estimate together with what the posterior sampler needs.
struct OlsVar {
  VarModel model;
  MatrixXd xtx_inv;   // (1 + n p) square
  MatrixXd scatter;   // residual cross-product U'U
  MatrixXd residuals; // T_eff x n
  Index t_eff = 0;
};

/// Regressor matrix rows [1, y_{t-1}', ..., y_{t-p}'] for t = p .. T-1.
inline MatrixXd lagged_regressors(const MatrixXd& y, int p) {
  const Index T = y.rows(), n = y.cols();
  MatrixXd X(T - p, 1 + n * p);
  for (Index t = p; t < T; ++t) {
    X(t - p, 0) = 1.0;
    for (int j = 1; j <= p; ++j) X.block(t - p, 1 + (j - 1) * n, 1, n) = y.row(t - j);
  }
  return X;
}

inline OlsVar fit_ols_var(const MatrixXd& y, int p) {
  require(p >= 1, ErrorCode::InvalidArgument, "fit_ols_var: lag order must be >= 1");
  require(!y.hasNaN(), ErrorCode::InvalidArgument, "fit_ols_var: missing values");
  const Index n = y.cols();
  const Index usable = y.rows() - p;
  if (usable < n * p + n + 10)
    fail(ErrorCode::InsufficientData, "fit_ols_var: " + std::to_string(usable) + " usable rows, need " +
                                          std::to_string(n * p + n + 10));
  const MatrixXd X = lagged_regressors(y, p);
  const MatrixXd Y = y.bottomRows(usable);
  const MatrixXd xtx = X.transpose() * X;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) fail(ErrorCode::SingularRegressors, "fit_ols_var: regressors are collinear");
  const MatrixXd phi = qr.solve(Y);  // (1 + n p) x n
  OlsVar out;
  out.model.n = static_cast<int>(n);
  out.model.p = p;
  out.model.coef = phi.transpose();
  out.residuals = Y - X * phi;
  out.scatter = out.residuals.transpose() * out.residuals;
  out.scatter = 0.5 * (out.scatter + out.scatter.transpose()).eval();
  out.model.sigma = out.scatter / static_cast<double>(usable);
  out.xtx_inv = xtx.ldlt().solve(MatrixXd::Identity(xtx.rows(), xtx.cols()));
  out.xtx_inv = 0.5 * (out.xtx_inv + out.xtx_inv.transpose()).eval();
  out.t_eff = usable;
  return out;
}

inline OlsVar fit_ols_var(const TimeSeriesFrame& frame, int p) { return fit_ols_var(frame.values(), p); }

inline MatrixXd companion(const VarModel& m) {
  const Index n = m.n, np = n * m.p;
  MatrixXd F = MatrixXd::Zero(np, np);
  F.topRows(n) = m.coef.rightCols(np);
  if (m.p > 1) F.bottomLeftCorner(np - n, np - n).setIdentity();
  return F;
}

inline double spectral_radius(const VarModel& m) {
  const Eigen::EigenSolver<MatrixXd> es(companion(m), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Reduced-form moving-average matrices Psi_0 = I, ..., Psi_{H-1}.
inline std::vector<MatrixXd> ma_coefficients(const VarModel& m, int horizons) {
  std::vector<MatrixXd> psi;
  psi.reserve(static_cast<std::size_t>(horizons));
  for (int h = 0; h < horizons; ++h) {
    if (h == 0) {
      psi.push_back(MatrixXd::Identity(m.n, m.n));
      continue;
    }
    MatrixXd acc = MatrixXd::Zero(m.n, m.n);
    for (int j = 1; j <= std::min(h, m.p); ++j) acc.noalias() += m.lag(j) * psi[static_cast<std::size_t>(h - j)];
    psi.push_back(std::move(acc));
  }
  return psi;
}

/// Structural responses Theta_h = Psi_h B for h = 0 .. horizons-1.
inline std::vector<MatrixXd> structural_irf(const VarModel& m, const MatrixXd& B, int horizons) {
  std::vector<MatrixXd> out = ma_coefficients(m, horizons);
  for (auto& t : out) t = (t * B).eval();
  return out;
}

/// Residuals u_t = y_t - c - sum_j A_j y_{t-j}, t = p .. T-1.
inline MatrixXd var_residuals(const VarModel& m, const MatrixXd& y) {
  const MatrixXd X = lagged_regressors(y, m.p);
  return y.bottomRows(y.rows() - m.p) - X * m.coef.transpose();
}

}  // namespace mpsent::svar
