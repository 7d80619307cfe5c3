#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/core/error.hpp"
#include "mpsent/svar/identify.hpp"
#include "mpsent/svar/var.hpp"

namespace mpsent::svar {

/// Weighted quantiles by interpolating on cumulative-weight midpoints:
/// sorted value i sits at (W_i - w_i / 2) / W. Zero weights are ignored;
/// equal weights reduce to the midpoint (Hazen) sample quantile.
inline std::vector<double> summarize_weighted(const std::vector<double>& values, const std::vector<double>& weights,
                                              const std::vector<double>& quantiles) {
  require(values.size() == weights.size(), ErrorCode::InvalidArgument, "summarize_weighted: length mismatch");
  std::vector<std::size_t> idx;
  idx.reserve(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(weights[i] >= 0.0, ErrorCode::InvalidArgument, "summarize_weighted: negative weight");
    if (weights[i] > 0.0) {
      idx.push_back(i);
      total += weights[i];
    }
  }
  if (idx.empty()) fail(ErrorCode::AllZeroWeights, "summarize_weighted: all weights are zero");
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> pos(idx.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    cum += weights[idx[i]];
    pos[i] = (cum - 0.5 * weights[idx[i]]) / total;
  }
  std::vector<double> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) {
    if (q <= pos.front()) {
      out.push_back(values[idx.front()]);
      continue;
    }
    if (q >= pos.back()) {
      out.push_back(values[idx.back()]);
      continue;
    }
    const auto it = std::upper_bound(pos.begin(), pos.end(), q);
    const std::size_t hi = static_cast<std::size_t>(it - pos.begin());
    const std::size_t lo = hi - 1;
    const double t = (q - pos[lo]) / (pos[hi] - pos[lo]);
    out.push_back(values[idx[lo]] + t * (values[idx[hi]] - values[idx[lo]]));
  }
  return out;
}

/// Median and 68% band of one cell.
struct Band {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline Band band(const std::vector<double>& values, const std::vector<double>& weights) {
  const auto q = summarize_weighted(values, weights, {0.5, 0.16, 0.84});
  return {q[0], q[1], q[2]};
}

/// Per-shock summary of responses: cells[k][variable][horizon].
struct IrfSummary {
  int horizons = 0;
  std::array<std::vector<std::vector<Band>>, 3> cells;
};

enum class Weighting { Loose, Uniform };

namespace detail {

inline std::vector<double> shock_weights(const IdentifiedSet& set, std::size_t k, Weighting w) {
  if (w == Weighting::Uniform) return std::vector<double>(set.accepted.size(), 1.0);
  return set.weights(k);
}

/// Summarizes f(rotation, shock) -> n x horizons matrices cell by cell.
template <class Fn>
IrfSummary summarize_paths(const IdentifiedSet& set, int horizons, Weighting weighting, Fn&& f) {
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "summary: identified set is empty");
  const int n = static_cast<int>(set.data.cols());
  IrfSummary out;
  out.horizons = horizons;
  const std::size_t m = set.accepted.size();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto w = shock_weights(set, k, weighting);
    std::vector<MatrixXd> paths(m);
    for (std::size_t i = 0; i < m; ++i) paths[i] = f(set.accepted[i], k);
    auto& cells = out.cells[k];
    cells.assign(static_cast<std::size_t>(n), std::vector<Band>(static_cast<std::size_t>(horizons)));
    std::vector<double> vals(m);
    for (int v = 0; v < n; ++v) {
      for (int h = 0; h < horizons; ++h) {
        for (std::size_t i = 0; i < m; ++i) vals[i] = paths[i](v, h);
        cells[static_cast<std::size_t>(v)][static_cast<std::size_t>(h)] = band(vals, w);
      }
    }
  }
  return out;
}

inline MatrixXd column_irf(const VarModel& model, const VectorXd& b, int horizons) {
  const auto psi = ma_coefficients(model, horizons);
  MatrixXd out(model.n, horizons);
  for (int h = 0; h < horizons; ++h) out.col(h) = psi[static_cast<std::size_t>(h)] * b;
  return out;
}

}  // namespace detail

/// Weighted medians and 68% bands of the structural responses, each shock
/// summarized with its own weights.
inline IrfSummary irf(const IdentifiedSet& set, int horizons, Weighting weighting = Weighting::Loose) {
  return detail::summarize_paths(set, horizons, weighting, [&](const RotationResult& r, std::size_t k) {
    return detail::column_irf(set.model_of(r), r.column(k), horizons);
  });
}

/// Forecast-error variance shares at forecast horizons 1..H: entry
/// [h-1](i, j) is the share of variable i's h-step variance due to shock j.
inline std::vector<MatrixXd> fevd_shares(const VarModel& model, const MatrixXd& B, int horizons) {
  const auto theta = structural_irf(model, B, horizons);
  std::vector<MatrixXd> out;
  MatrixXd acc = MatrixXd::Zero(model.n, B.cols());
  for (int h = 0; h < horizons; ++h) {
    acc += theta[static_cast<std::size_t>(h)].cwiseAbs2();
    const VectorXd total = acc.rowwise().sum();
    MatrixXd share = acc;
    for (Index i = 0; i < share.rows(); ++i) share.row(i) /= total(i);
    out.push_back(std::move(share));
  }
  return out;
}

struct FevdSummary {
  int horizons = 0;
  // shares[k][variable][h-1] for the identified shocks
  std::array<std::vector<std::vector<Band>>, 3> shares;
  // largest |sum over all n shocks - 1| across rotations and cells
  double max_sum_error = 0.0;
};

inline FevdSummary fevd(const IdentifiedSet& set, int horizons) {
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "fevd: identified set is empty");
  FevdSummary out;
  out.horizons = horizons;
  std::vector<std::vector<MatrixXd>> all(set.accepted.size());
  for (std::size_t i = 0; i < set.accepted.size(); ++i) {
    const auto& r = set.accepted[i];
    all[i] = fevd_shares(set.model_of(r), r.B, horizons);
    for (const auto& s : all[i])
      out.max_sum_error = std::max(out.max_sum_error, (s.rowwise().sum().array() - 1.0).abs().maxCoeff());
  }
  const auto summary = detail::summarize_paths(set, horizons, Weighting::Loose, [&](const RotationResult& r, std::size_t k) {
    const std::size_t i = static_cast<std::size_t>(&r - set.accepted.data());
    MatrixXd m(set.data.cols(), horizons);
    for (int h = 0; h < horizons; ++h) m.col(h) = all[i][static_cast<std::size_t>(h)].col(r.assignment.column[k]);
    return m;
  });
  out.shares = summary.cells;
  return out;
}

/// Additive decomposition of y_t (t >= p) into the path implied by initial
/// conditions and the intercept plus one contribution per structural shock.
struct HistoricalDecomposition {
  MatrixXd deterministic;               // T_eff x n
  std::vector<MatrixXd> contributions;  // per structural column, T_eff x n
  MatrixXd shocks;                      // T_eff x n, B^-1 u_t
};

inline HistoricalDecomposition historical_decomposition(const VarModel& model, const MatrixXd& B, const MatrixXd& y) {
  const int n = model.n, p = model.p;
  const Index T = y.rows() - p;
  const MatrixXd u = var_residuals(model, y);
  const Eigen::PartialPivLU<MatrixXd> lu(B);
  HistoricalDecomposition hd;
  hd.shocks = lu.solve(u.transpose()).transpose();
  // deterministic part: iterate the VAR from the observed initial values
  MatrixXd det(T + p, n);
  det.topRows(p) = y.topRows(p);
  for (Index t = p; t < T + p; ++t) {
    VectorXd v = model.intercept();
    for (int j = 1; j <= p; ++j) v.noalias() += model.lag(j) * det.row(t - j).transpose();
    det.row(t) = v.transpose();
  }
  hd.deterministic = det.bottomRows(T);
  hd.contributions.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    MatrixXd c = MatrixXd::Zero(T + p, n);
    for (Index t = p; t < T + p; ++t) {
      VectorXd v = B.col(k) * hd.shocks(t - p, k);
      for (int j = 1; j <= p; ++j) v.noalias() += model.lag(j) * c.row(t - j).transpose();
      c.row(t) = v.transpose();
    }
    hd.contributions[static_cast<std::size_t>(k)] = c.bottomRows(T);
  }
  return hd;
}

struct HdSummary {
  std::vector<Date> dates;  // estimation dates t >= p
  // per identified shock: bands[k][variable][t]
  std::array<std::vector<std::vector<Band>>, 3> contributions;
  // unidentified shocks plus the deterministic component, median only
  std::vector<std::vector<double>> remainder;
  // structural shock series of the identified shocks: shocks[k][t]
  std::array<std::vector<Band>, 3> shocks;
  double max_reconstruction_error = 0.0;
};

/// Summaries are built one variable at a time, recomputing each rotation's
/// decomposition per pass so memory stays linear in the accepted count.
inline HdSummary historical_decomposition(const IdentifiedSet& set) {
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "historical decomposition: identified set is empty");
  const int p = set.options.p;
  const Index T = set.data.rows() - p;
  const int n = static_cast<int>(set.data.cols());
  const std::size_t m = set.accepted.size();
  const auto Tz = static_cast<std::size_t>(T);
  HdSummary out;
  out.dates.assign(set.dates.begin() + p, set.dates.end());
  const MatrixXd target = set.data.bottomRows(T);
  std::array<std::vector<double>, 3> w;
  for (std::size_t k = 0; k < 3; ++k) {
    w[k] = set.weights(k);
    out.contributions[k].assign(static_cast<std::size_t>(n), std::vector<Band>(Tz));
    out.shocks[k].resize(Tz);
  }
  out.remainder.assign(static_cast<std::size_t>(n), std::vector<double>(Tz));
  const std::vector<double> uniform(m, 1.0);

  // values laid out [rotation * T + t]
  std::array<std::vector<double>, 3> contrib, shocks;
  std::vector<double> rem(m * Tz), vals(m);
  for (auto& c : contrib) c.resize(m * Tz);
  for (auto& s : shocks) s.resize(m * Tz);
  for (int v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& r = set.accepted[i];
      const auto hd = historical_decomposition(set.model_of(r), r.B, set.data);
      const auto& cols = r.assignment.column;
      if (v == 0) {
        MatrixXd sum = hd.deterministic;
        for (const auto& c : hd.contributions) sum += c;
        out.max_reconstruction_error = std::max(out.max_reconstruction_error, (sum - target).cwiseAbs().maxCoeff());
        for (std::size_t k = 0; k < 3; ++k)
          for (Index t = 0; t < T; ++t)
            shocks[k][i * Tz + static_cast<std::size_t>(t)] = r.assignment.sign[k] * hd.shocks(t, cols[k]);
      }
      for (Index t = 0; t < T; ++t) {
        const std::size_t at = i * Tz + static_cast<std::size_t>(t);
        // contributions are sign-invariant; only the shock series flips
        for (std::size_t k = 0; k < 3; ++k)
          contrib[k][at] = hd.contributions[static_cast<std::size_t>(cols[k])](t, v);
        double x = hd.deterministic(t, v);
        for (int j = 0; j < n; ++j)
          if (j != cols[0] && j != cols[1] && j != cols[2]) x += hd.contributions[static_cast<std::size_t>(j)](t, v);
        rem[at] = x;
      }
    }
    auto gather = [&](const std::vector<double>& src, Index t) {
      for (std::size_t i = 0; i < m; ++i) vals[i] = src[i * Tz + static_cast<std::size_t>(t)];
      return vals;
    };
    for (Index t = 0; t < T; ++t) {
      const auto tz = static_cast<std::size_t>(t);
      for (std::size_t k = 0; k < 3; ++k) {
        out.contributions[k][static_cast<std::size_t>(v)][tz] = band(gather(contrib[k], t), w[k]);
        if (v == 0) out.shocks[k][tz] = band(gather(shocks[k], t), w[k]);
      }
      out.remainder[static_cast<std::size_t>(v)][tz] = summarize_weighted(gather(rem, t), uniform, {0.5})[0];
    }
  }
  return out;
}

/// Removes the lagged feedback of variable s on every other equation.
inline VarModel shut_channel(VarModel m, int s) {
  for (int j = 1; j <= m.p; ++j)
    for (int i = 0; i < m.n; ++i)
      if (i != s) m.lag(j)(i, s) = 0.0;
  return m;
}

struct CounterfactualResult {
  ShockKind shock = ShockKind::AnticipatedMP;
  int horizons = 0;
  std::vector<std::vector<Band>> baseline;        // [variable][h]
  std::vector<std::vector<Band>> counterfactual;  // [variable][h]
  // largest |baseline - counterfactual| at h = 0 over rotations
  double max_impact_gap = 0.0;
};

inline CounterfactualResult counterfactual_irf(const IdentifiedSet& set, const VariableRoleMap& roles, ShockKind shock,
                                               int horizons) {
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "counterfactual: identified set is empty");
  require(roles.s.has_value(), ErrorCode::InvalidArgument, "counterfactual: sentiment role required");
  const std::size_t k = static_cast<std::size_t>(shock);
  const int n = static_cast<int>(set.data.cols());
  const std::size_t m = set.accepted.size();
  std::vector<MatrixXd> base(m), cf(m);
  CounterfactualResult out;
  out.shock = shock;
  out.horizons = horizons;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = set.accepted[i];
    const VectorXd b = r.column(k);
    base[i] = detail::column_irf(set.model_of(r), b, horizons);
    cf[i] = detail::column_irf(shut_channel(set.model_of(r), *roles.s), b, horizons);
    out.max_impact_gap = std::max(out.max_impact_gap, (base[i].col(0) - cf[i].col(0)).cwiseAbs().maxCoeff());
  }
  const auto w = set.weights(k);
  std::vector<double> vals(m);
  auto summarize = [&](const std::vector<MatrixXd>& paths) {
    std::vector<std::vector<Band>> cells(static_cast<std::size_t>(n), std::vector<Band>(static_cast<std::size_t>(horizons)));
    for (int v = 0; v < n; ++v)
      for (int h = 0; h < horizons; ++h) {
        for (std::size_t i = 0; i < m; ++i) vals[i] = paths[i](v, h);
        cells[static_cast<std::size_t>(v)][static_cast<std::size_t>(h)] = band(vals, w);
      }
    return cells;
  };
  out.baseline = summarize(base);
  out.counterfactual = summarize(cf);
  return out;
}

inline double correlation(const VectorXd& a, const VectorXd& b) {
  const VectorXd da = a.array() - a.mean();
  const VectorXd db = b.array() - b.mean();
  const double den = std::sqrt(da.squaredNorm() * db.squaredNorm());
  return den > 0.0 ? da.dot(db) / den : 0.0;
}

inline double autocorrelation1(const VectorXd& a) {
  const Index T = a.size();
  if (T < 3) return 0.0;
  return correlation(a.head(T - 1), a.tail(T - 1));
}

struct ShockDiagnostics {
  // pairs in order (a,u), (a,s), (u,s); pair weights are w_i * w_j
  std::array<Band, 3> pair_correlation;
  std::array<Band, 3> autocorrelation;
  // per-rotation raw values, rows = rotations
  MatrixXd pair_values;
  MatrixXd autocorr_values;
  double acceptance_rate = 0.0;
  std::array<double, 3> ess{};
  std::size_t accepted = 0;
};

inline ShockDiagnostics shock_diagnostics(const IdentifiedSet& set) {
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "diagnostics: identified set is empty");
  const std::size_t m = set.accepted.size();
  ShockDiagnostics out;
  out.pair_values.resize(static_cast<Index>(m), 3);
  out.autocorr_values.resize(static_cast<Index>(m), 3);
  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (std::size_t i = 0; i < m; ++i) {
    const auto& r = set.accepted[i];
    const MatrixXd u = var_residuals(set.model_of(r), set.data);
    const MatrixXd eps = Eigen::PartialPivLU<MatrixXd>(r.B).solve(u.transpose()).transpose();
    std::array<VectorXd, 3> e;
    for (std::size_t k = 0; k < 3; ++k) e[k] = r.assignment.sign[k] * eps.col(r.assignment.column[k]);
    for (std::size_t q = 0; q < 3; ++q) {
      out.pair_values(static_cast<Index>(i), static_cast<Index>(q)) = correlation(e[pairs[q].first], e[pairs[q].second]);
      out.autocorr_values(static_cast<Index>(i), static_cast<Index>(q)) = autocorrelation1(e[q]);
    }
  }
  std::vector<double> vals(m), w(m);
  for (std::size_t q = 0; q < 3; ++q) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& wt = set.accepted[i].weights;
      vals[i] = out.pair_values(static_cast<Index>(i), static_cast<Index>(q));
      w[i] = wt[pairs[q].first] * wt[pairs[q].second];
    }
    out.pair_correlation[q] = band(vals, w);
    for (std::size_t i = 0; i < m; ++i) {
      vals[i] = out.autocorr_values(static_cast<Index>(i), static_cast<Index>(q));
      w[i] = set.accepted[i].weights[q];
    }
    out.autocorrelation[q] = band(vals, w);
  }
  out.acceptance_rate = set.acceptance_rate();
  out.ess = set.ess;
  out.accepted = m;
  return out;
}

/// Weighted against uniform medians on the same accepted set.
struct DeltaRobustness {
  double max_median_gap = 0.0;
  double mean_band_width_weighted = 0.0;
  double mean_band_width_uniform = 0.0;
};

inline DeltaRobustness delta_robustness(const IdentifiedSet& set, int horizons) {
  const IrfSummary a = irf(set, horizons, Weighting::Loose);
  const IrfSummary b = irf(set, horizons, Weighting::Uniform);
  DeltaRobustness out;
  std::size_t cells = 0;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t v = 0; v < a.cells[k].size(); ++v)
      for (std::size_t h = 0; h < a.cells[k][v].size(); ++h) {
        const Band& x = a.cells[k][v][h];
        const Band& y = b.cells[k][v][h];
        out.max_median_gap = std::max(out.max_median_gap, std::abs(x.median - y.median));
        out.mean_band_width_weighted += x.hi - x.lo;
        out.mean_band_width_uniform += y.hi - y.lo;
        ++cells;
      }
  out.mean_band_width_weighted /= static_cast<double>(cells);
  out.mean_band_width_uniform /= static_cast<double>(cells);
  return out;
}

}  // namespace mpsent::svar
