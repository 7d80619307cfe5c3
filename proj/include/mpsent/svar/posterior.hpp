#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"
#include "mpsent/core/random.hpp"
#include "mpsent/svar/var.hpp"

namespace mpsent::svar {

struct PosteriorDraw {
  VarModel model;
  int index = 0;
  bool stable = true;
};

/// Sigma ~ IW(scale, dof) via the Bartlett decomposition of the matching
/// Wishart on the inverse scale.
inline MatrixXd draw_inverse_wishart(Rng& rng, const MatrixXd& scale, double dof) {
  const Index n = scale.rows();
  require(dof > static_cast<double>(n - 1), ErrorCode::InvalidArgument, "inverse Wishart: dof too small");
  const MatrixXd scale_inv = scale.ldlt().solve(MatrixXd::Identity(n, n));
  const Eigen::LLT<MatrixXd> llt(0.5 * (scale_inv + scale_inv.transpose()));
  require(llt.info() == Eigen::Success, ErrorCode::InvalidArgument, "inverse Wishart: scale not positive definite");
  const MatrixXd L = llt.matrixL();
  MatrixXd Abart = MatrixXd::Zero(n, n);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (Index i = 0; i < n; ++i) {
    std::chi_squared_distribution<double> chi(dof - static_cast<double>(i));
    Abart(i, i) = std::sqrt(chi(rng));
    for (Index j = 0; j < i; ++j) Abart(i, j) = nd(rng);
  }
  const MatrixXd LA = L * Abart;
  const MatrixXd W = LA * LA.transpose();
  MatrixXd sigma = W.ldlt().solve(MatrixXd::Identity(n, n));
  return 0.5 * (sigma + sigma.transpose());
}

/// Conjugate Normal-Inverse-Wishart posterior with a g-prior on the
/// coefficients: Sigma ~ IW(U'U + 1e-6 I, T + n + 2), vec(Phi) | Sigma ~
/// N(Phi_ols, Sigma (x) (1 + shrink)^-1 (X'X)^-1). Explosive draws are
/// redrawn, at most 100 * draws attempts in total.
inline std::vector<PosteriorDraw> sample_posterior(const OlsVar& ols, int draws, double shrink, std::uint64_t seed) {
  require(draws >= 1, ErrorCode::InvalidArgument, "sample_posterior: draws must be >= 1");
  require(shrink > 0.0, ErrorCode::InvalidArgument, "sample_posterior: shrinkage must be positive");
  const int n = ols.model.n;
  const Index k = ols.model.coef.cols();
  const MatrixXd scale = ols.scatter + 1e-6 * MatrixXd::Identity(n, n);
  const double dof = static_cast<double>(ols.t_eff) + n + 2;
  const MatrixXd col_cov = ols.xtx_inv / (1.0 + shrink);
  const MatrixXd col_chol = Eigen::LLT<MatrixXd>(col_cov).matrixL();
  const MatrixXd phi_ols = ols.model.coef.transpose();

  Rng rng = make_stream(seed, {0x706f7374ULL});
  std::vector<PosteriorDraw> out;
  out.reserve(static_cast<std::size_t>(draws));
  const long cap = 100L * draws;
  long attempts = 0;
  while (static_cast<int>(out.size()) < draws) {
    if (attempts >= cap)
      fail(ErrorCode::StabilityExhausted, "sample_posterior: no stable draw within " + std::to_string(cap) + " attempts");
    ++attempts;
    const MatrixXd sigma = draw_inverse_wishart(rng, scale, dof);
    const MatrixXd sig_chol = Eigen::LLT<MatrixXd>(sigma).matrixL();
    const MatrixXd Z = standard_normal(rng, k, n);
    const MatrixXd phi = phi_ols + col_chol * Z * sig_chol.transpose();
    PosteriorDraw d;
    d.model.n = n;
    d.model.p = ols.model.p;
    d.model.coef = phi.transpose();
    d.model.sigma = sigma;
    d.index = static_cast<int>(out.size());
    d.stable = spectral_radius(d.model) < 1.0;
    if (d.stable) out.push_back(std::move(d));
  }
  return out;
}

/// Haar-distributed orthogonal matrix: QR of a standard-normal matrix with
/// the triangular factor's diagonal made positive. For n = 1 the result is
/// the identity; the sign search covers the reflected orientation anyway.
inline MatrixXd draw_rotation(Rng& rng, Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "draw_rotation: dimension must be >= 1");
  if (n == 1) return MatrixXd::Identity(1, 1);
  const MatrixXd Z = standard_normal(rng, n, n);
  const Eigen::HouseholderQR<MatrixXd> qr(Z);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

inline MatrixXd draw_rotation(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return draw_rotation(rng, n);
}

}  // namespace mpsent::svar
