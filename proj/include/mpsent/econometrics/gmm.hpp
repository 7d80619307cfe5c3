#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"

namespace mpsent::econ {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Bartlett kernel, w_l = 1 - l/(L+1).
struct HacOptions {
  int bandwidth = 4;
};

inline double bartlett_weight(int l, int L) { return 1.0 - static_cast<double>(l) / (L + 1.0); }

/// Long-run covariance of the rows of g (T x k), no centering and no
/// small-sample correction: Gamma_0 + sum_l w_l (Gamma_l + Gamma_l').
inline MatrixXd hac_covariance(const MatrixXd& g, const HacOptions& hac) {
  require(hac.bandwidth >= 0, ErrorCode::InvalidArgument, "hac: bandwidth must be >= 0");
  const Index T = g.rows();
  require(T > 0, ErrorCode::InvalidArgument, "hac: no observations");
  MatrixXd S = g.transpose() * g;
  const int L = static_cast<int>(std::min<Index>(hac.bandwidth, T - 1));
  for (int l = 1; l <= L; ++l) {
    const MatrixXd G = g.bottomRows(T - l).transpose() * g.topRows(T - l);
    S += bartlett_weight(l, hac.bandwidth) * (G + G.transpose());
  }
  S /= static_cast<double>(T);
  return 0.5 * (S + S.transpose());
}

struct RegressionData {
  VectorXd y;
  MatrixXd X;
  std::vector<std::string> x_names;
  MatrixXd Z;  // empty for plain OLS
  std::vector<std::string> z_names;
  int endogenous = -1;  // column of X treated as endogenous, -1 if none
};

struct GmmResult {
  std::vector<std::string> names;
  VectorXd coef;
  VectorXd se;       // HAC
  VectorXd se_iid;   // homoskedastic, OLS only
  MatrixXd cov;
  VectorXd residuals;
  double j = 0.0;
  int j_df = 0;
  std::optional<double> j_pvalue;
  std::optional<double> first_stage_f;
  Index nobs = 0;
};

namespace detail {

inline void check_shapes(const RegressionData& d) {
  require(d.X.rows() == d.y.size(), ErrorCode::InvalidArgument, "regression: X and y row counts differ");
  require(d.X.cols() >= 1, ErrorCode::InvalidArgument, "regression: no regressors");
  require(d.x_names.empty() || d.x_names.size() == static_cast<std::size_t>(d.X.cols()), ErrorCode::InvalidArgument,
          "regression: regressor names do not match columns");
  require(!d.y.hasNaN() && !d.X.hasNaN(), ErrorCode::InvalidArgument, "regression: missing values");
}

inline void check_rank(const MatrixXd& A, const std::string& what) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < A.cols()) fail(ErrorCode::RankDeficient, what + " is rank deficient");
}

inline VectorXd se_from(const MatrixXd& cov) { return cov.diagonal().cwiseMax(0.0).cwiseSqrt(); }

}  // namespace detail

inline GmmResult ols_hac(const RegressionData& d, const HacOptions& hac) {
  detail::check_shapes(d);
  const Index T = d.X.rows(), k = d.X.cols();
  require(T > k, ErrorCode::InsufficientData, "ols: fewer observations than regressors");
  detail::check_rank(d.X, "ols: regressor matrix");
  const MatrixXd xtx = d.X.transpose() * d.X;
  const Eigen::LDLT<MatrixXd> ldlt(xtx);
  GmmResult r;
  r.names = d.x_names;
  r.nobs = T;
  r.coef = ldlt.solve(d.X.transpose() * d.y);
  r.residuals = d.y - d.X * r.coef;
  const MatrixXd Q = ldlt.solve(MatrixXd::Identity(k, k)) * static_cast<double>(T);
  const MatrixXd S = hac_covariance(d.X.array().colwise() * r.residuals.array(), hac);
  r.cov = Q * S * Q / static_cast<double>(T);
  r.cov = 0.5 * (r.cov + r.cov.transpose()).eval();
  r.se = detail::se_from(r.cov);
  const double s2 = r.residuals.squaredNorm() / static_cast<double>(T - k);
  r.se_iid = detail::se_from(s2 * Q / static_cast<double>(T));
  return r;
}

/// Two-stage least squares point estimate.
inline VectorXd tsls(const RegressionData& d) {
  detail::check_shapes(d);
  require(d.Z.rows() == d.X.rows() && d.Z.cols() >= d.X.cols(), ErrorCode::InvalidArgument,
          "tsls: instrument dimensions");
  detail::check_rank(d.Z, "tsls: instrument matrix");
  const MatrixXd fitted = d.Z * d.Z.colPivHouseholderQr().solve(d.X);
  detail::check_rank(fitted, "tsls: first stage");
  return fitted.colPivHouseholderQr().solve(d.y);
}

/// Step 1 is 2SLS; step 2 weights by the inverse Bartlett-HAC covariance of
/// the step-1 moments. J = T gbar' W gbar at the step-2 estimate.
inline GmmResult gmm_two_step(const RegressionData& d, const HacOptions& hac) {
  detail::check_shapes(d);
  const Index T = d.X.rows(), k = d.X.cols(), q = d.Z.cols();
  require(d.Z.rows() == T, ErrorCode::InvalidArgument, "gmm: instrument row count differs");
  require(!d.Z.hasNaN(), ErrorCode::InvalidArgument, "gmm: missing instruments");
  require(q >= k, ErrorCode::InvalidArgument, "gmm: fewer instruments than parameters");
  require(T > q, ErrorCode::InsufficientData, "gmm: fewer observations than instruments");
  detail::check_rank(d.Z, "gmm: instrument matrix");
  const MatrixXd ZX = d.Z.transpose() * d.X / static_cast<double>(T);
  const VectorXd Zy = d.Z.transpose() * d.y / static_cast<double>(T);
  detail::check_rank(ZX, "gmm: first stage");

  auto solve = [&](const MatrixXd& W) -> VectorXd {
    const MatrixXd A = ZX.transpose() * W * ZX;
    return A.ldlt().solve(ZX.transpose() * W * Zy);
  };
  const MatrixXd ZZ = d.Z.transpose() * d.Z / static_cast<double>(T);
  const VectorXd b1 = solve(ZZ.ldlt().solve(MatrixXd::Identity(q, q)));
  const VectorXd e1 = d.y - d.X * b1;
  const MatrixXd S = hac_covariance(d.Z.array().colwise() * e1.array(), hac);
  const Eigen::LDLT<MatrixXd> s_ldlt(S);
  // reference size of the moments if residuals were of the order of y
  const double ref = std::max(ZZ.diagonal().maxCoeff() * d.y.squaredNorm() / static_cast<double>(T),
                              std::numeric_limits<double>::min());
  const double top = S.diagonal().maxCoeff();
  if (s_ldlt.info() != Eigen::Success || !s_ldlt.isPositive() || top <= 1e-24 * ref ||
      s_ldlt.vectorD().minCoeff() <= 1e-12 * top)
    fail(ErrorCode::WeightingSingular, "gmm: moment covariance is singular");
  const MatrixXd W = s_ldlt.solve(MatrixXd::Identity(q, q));

  GmmResult r;
  r.names = d.x_names;
  r.nobs = T;
  r.coef = solve(W);
  r.residuals = d.y - d.X * r.coef;
  const VectorXd gbar = d.Z.transpose() * r.residuals / static_cast<double>(T);
  r.j = std::max(0.0, static_cast<double>(T) * gbar.dot(W * gbar));
  r.j_df = static_cast<int>(q - k);
  const MatrixXd A = ZX.transpose() * W * ZX;
  r.cov = A.ldlt().solve(MatrixXd::Identity(k, k)) / static_cast<double>(T);
  r.cov = 0.5 * (r.cov + r.cov.transpose()).eval();
  r.se = detail::se_from(r.cov);
  return r;
}

/// Instrument columns that are not also regressors.
inline std::vector<Index> excluded_instruments(const RegressionData& d) {
  std::vector<Index> out;
  for (Index j = 0; j < d.Z.cols(); ++j) {
    const auto& name = d.z_names.at(static_cast<std::size_t>(j));
    if (std::find(d.x_names.begin(), d.x_names.end(), name) == d.x_names.end()) out.push_back(j);
  }
  return out;
}

/// HAC-robust Wald statistic over the number of excluded instruments, from
/// the regression of the endogenous column on all instruments.
inline double first_stage_f(const RegressionData& d, const HacOptions& hac) {
  require(d.endogenous >= 0 && d.endogenous < d.X.cols(), ErrorCode::InvalidArgument,
          "first_stage_f: no endogenous column marked");
  require(d.z_names.size() == static_cast<std::size_t>(d.Z.cols()), ErrorCode::InvalidArgument,
          "first_stage_f: instrument names do not match columns");
  const auto ex = excluded_instruments(d);
  require(!ex.empty(), ErrorCode::InvalidArgument, "first_stage_f: no excluded instruments");
  RegressionData fs;
  fs.y = d.X.col(d.endogenous);
  fs.X = d.Z;
  const GmmResult r = ols_hac(fs, hac);
  const Index m = static_cast<Index>(ex.size());
  VectorXd pi(m);
  MatrixXd V(m, m);
  for (Index a = 0; a < m; ++a) {
    pi(a) = r.coef(ex[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < m; ++b) V(a, b) = r.cov(ex[static_cast<std::size_t>(a)], ex[static_cast<std::size_t>(b)]);
  }
  const Eigen::LDLT<MatrixXd> ldlt(V);
  const double scale = std::max(pi.squaredNorm(), 1.0);
  if (!ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-300 * scale)
    return std::numeric_limits<double>::infinity();
  return pi.dot(ldlt.solve(pi)) / static_cast<double>(m);
}

}  // namespace mpsent::econ
