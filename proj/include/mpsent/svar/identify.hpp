#pragma once

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpsent/bnk/signs.hpp"
#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/core/parallel.hpp"
#include "mpsent/core/random.hpp"
#include "mpsent/svar/posterior.hpp"
#include "mpsent/svar/var.hpp"

namespace mpsent::svar {

using bnk::Role;
using bnk::ShockKind;
using bnk::SignPattern;

/// Column positions of the nine roles. The expectation roles, the realized
/// rate and sentiment are mandatory; the rest may be absent.
struct VariableRoleMap {
  std::optional<int> e_r, e_y, e_p, r, y, p, h, bond, s;

  /// Position used for a sign-pattern role; realized output and inflation
  /// stand in for the model's x and pi.
  std::optional<int> index(Role role) const {
    switch (role) {
      case Role::R: return r;
      case Role::S: return s;
      case Role::ER: return e_r;
      case Role::EX: return e_y;
      case Role::EPi: return e_p;
      case Role::X: return y;
      case Role::Pi: return p;
    }
    return std::nullopt;
  }

  void validate(int n) const {
    require(e_r && e_y && e_p && r && s, ErrorCode::InvalidArgument,
            "role map: E[r], E[Y], E[P], r and s are required");
    std::vector<int> used;
    for (const auto& v : {e_r, e_y, e_p, r, y, p, h, bond, s}) {
      if (!v) continue;
      require(*v >= 0 && *v < n, ErrorCode::InvalidArgument, "role map: index out of range");
      require(std::find(used.begin(), used.end(), *v) == used.end(), ErrorCode::InvalidArgument,
              "role map: duplicate index");
      used.push_back(*v);
    }
  }

  /// Resolves roles by column name using the canonical names
  /// Er, Ey, Ep, r, y, p, h, bond, s.
  static VariableRoleMap from_names(const std::vector<std::string>& names) {
    auto find = [&](const char* key) -> std::optional<int> {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == key) return static_cast<int>(i);
      return std::nullopt;
    };
    VariableRoleMap m;
    m.e_r = find("Er");
    m.e_y = find("Ey");
    m.e_p = find("Ep");
    m.r = find("r");
    m.y = find("y");
    m.p = find("p");
    m.h = find("h");
    m.bond = find("bond");
    m.s = find("s");
    return m;
  }
};

/// Patterns in ShockKind order (anticipated, unanticipated, narrative).
using PatternSet = std::array<SignPattern, 3>;

inline PatternSet default_patterns() {
  return {bnk::sign_pattern(ShockKind::AnticipatedMP), bnk::sign_pattern(ShockKind::UnanticipatedMP),
          bnk::sign_pattern(ShockKind::Narrative)};
}

/// column[k] and sign[k] (+1 / -1) for shock k in ShockKind order.
struct Assignment {
  std::array<int, 3> column{};
  std::array<int, 3> sign{};
  bool operator==(const Assignment&) const = default;
};

namespace detail {

/// Horizon-4 statistics of one structural column from the draw's dynamics.
struct ColumnForecasts {
  double r_bar = 0.0;  // mean realized-rate response over h = 1..4
  double y4 = 0.0;
  double p4 = 0.0;
};

inline ColumnForecasts column_forecasts(const std::vector<MatrixXd>& psi, const VectorXd& b, const VariableRoleMap& roles) {
  ColumnForecasts f;
  for (int h = 1; h <= 4; ++h) f.r_bar += (psi[static_cast<std::size_t>(h)].row(*roles.r) * b)(0) / 4.0;
  if (roles.y) f.y4 = (psi[4].row(*roles.y) * b)(0);
  if (roles.p) f.p4 = (psi[4].row(*roles.p) * b)(0);
  return f;
}

inline bool column_matches(const SignPattern& pat, const VectorXd& b, const ColumnForecasts& f,
                           const VariableRoleMap& roles) {
  for (Role role : bnk::kAllRoles) {
    const auto idx = roles.index(role);
    if (!idx) continue;
    if (!bnk::satisfies(pat[role], b(*idx))) return false;
  }
  if (!bnk::satisfies(pat[Role::ER], f.r_bar)) return false;
  if (roles.y && !bnk::satisfies(pat[Role::EX], f.y4)) return false;
  if (roles.p && !bnk::satisfies(pat[Role::EPi], f.p4)) return false;
  return true;
}

}  // namespace detail

/// Searches (column, sign) pairs for each shock in turn and returns the
/// lexicographically first assignment to distinct columns, columns
/// ascending and + before -.
inline std::optional<Assignment> match_signs(const std::vector<MatrixXd>& psi, const MatrixXd& B,
                                             const VariableRoleMap& roles, const PatternSet& patterns) {
  const int n = static_cast<int>(B.cols());
  // valid[k][2 j + s]: s = 0 for +, 1 for -
  std::array<std::vector<char>, 3> valid;
  for (auto& v : valid) v.assign(static_cast<std::size_t>(2 * n), 0);
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < 2; ++s) {
      const VectorXd b = (s == 0 ? 1.0 : -1.0) * B.col(j);
      const auto f = detail::column_forecasts(psi, b, roles);
      for (int k = 0; k < 3; ++k)
        valid[static_cast<std::size_t>(k)][static_cast<std::size_t>(2 * j + s)] =
            detail::column_matches(patterns[static_cast<std::size_t>(k)], b, f, roles);
    }
  }
  for (int a = 0; a < 2 * n; ++a) {
    if (!valid[0][static_cast<std::size_t>(a)]) continue;
    for (int u = 0; u < 2 * n; ++u) {
      if (!valid[1][static_cast<std::size_t>(u)] || u / 2 == a / 2) continue;
      for (int s = 0; s < 2 * n; ++s) {
        if (!valid[2][static_cast<std::size_t>(s)] || s / 2 == a / 2 || s / 2 == u / 2) continue;
        Assignment out;
        const std::array<int, 3> codes{a, u, s};
        for (std::size_t k = 0; k < 3; ++k) {
          out.column[k] = codes[k] / 2;
          out.sign[k] = codes[k] % 2 == 0 ? 1 : -1;
        }
        return out;
      }
    }
  }
  return std::nullopt;
}

inline std::optional<Assignment> match_signs(const VarModel& model, const MatrixXd& B, const VariableRoleMap& roles,
                                             const PatternSet& patterns) {
  return match_signs(ma_coefficients(model, 5), B, roles, patterns);
}

/// Loose-rationality weights: how closely each assigned column's impact on
/// the survey expectations matches the draw's own forecasts of the realized
/// variables. Floored at the smallest normal double so weights stay in (0,1].
inline std::array<double, 3> loose_weight(const std::vector<MatrixXd>& psi, const MatrixXd& B, const Assignment& asg,
                                          const VariableRoleMap& roles, double delta) {
  std::array<double, 3> w{};
  for (std::size_t k = 0; k < 3; ++k) {
    const VectorXd b = asg.sign[k] * B.col(asg.column[k]);
    const auto f = detail::column_forecasts(psi, b, roles);
    double d2 = std::pow(b(*roles.e_r) - f.r_bar, 2);
    if (roles.y) d2 += std::pow(b(*roles.e_y) - f.y4, 2);
    if (roles.p) d2 += std::pow(b(*roles.e_p) - f.p4, 2);
    w[k] = std::max(std::exp(-d2 / (2.0 * delta)), DBL_MIN);
  }
  return w;
}

inline std::array<double, 3> loose_weight(const VarModel& model, const MatrixXd& B, const Assignment& asg,
                                          const VariableRoleMap& roles, double delta) {
  return loose_weight(ma_coefficients(model, 5), B, asg, roles, delta);
}

struct RotationResult {
  int draw = 0;
  int rotation = 0;
  MatrixXd B;  // chol(sigma) Q; Q is recovered as chol(sigma)^-1 B
  Assignment assignment;
  std::array<double, 3> weights{};

  /// Signed structural column for shock k.
  VectorXd column(std::size_t k) const { return assignment.sign[k] * B.col(assignment.column[k]); }
};

struct IdentifyOptions {
  int p = 2;
  int draws = 100;
  int rotations = 2000;
  double delta = 0.5;
  double shrink = 4.0;
  unsigned threads = 1;
  PatternSet patterns = default_patterns();
};

struct IdentifiedSet {
  MatrixXd data;
  std::vector<Date> dates;
  std::vector<std::string> names;
  VariableRoleMap roles;
  IdentifyOptions options;
  OlsVar ols;
  std::vector<PosteriorDraw> draws;
  std::vector<RotationResult> accepted;
  long rotations_tried = 0;
  std::array<double, 3> ess{};

  const VarModel& model_of(const RotationResult& r) const { return draws[static_cast<std::size_t>(r.draw)].model; }
  double acceptance_rate() const {
    return rotations_tried > 0 ? static_cast<double>(accepted.size()) / static_cast<double>(rotations_tried) : 0.0;
  }
  std::vector<double> weights(std::size_t k) const {
    std::vector<double> w;
    w.reserve(accepted.size());
    for (const auto& a : accepted) w.push_back(a.weights[k]);
    return w;
  }
};

inline double ess(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    require(v >= 0.0, ErrorCode::InvalidArgument, "ess: negative weight");
    s += v;
    s2 += v * v;
  }
  if (!(s > 0.0)) fail(ErrorCode::AllZeroWeights, "ess: all weights are zero");
  return s * s / s2;
}

/// Full pipeline: OLS seed, posterior draws from one sequential stream,
/// rotations evaluated per draw from substreams keyed by (seed, draw,
/// rotation), merged in (draw, rotation) order.
inline IdentifiedSet identify(const TimeSeriesFrame& frame, const VariableRoleMap& roles, const IdentifyOptions& opt,
                              std::uint64_t seed) {
  require(opt.draws >= 1 && opt.rotations >= 1, ErrorCode::InvalidArgument, "identify: draws and rotations must be >= 1");
  require(!frame.has_missing(), ErrorCode::InvalidArgument, "identify: frame has missing values");
  const int n = static_cast<int>(frame.cols());
  roles.validate(n);

  IdentifiedSet set;
  set.data = frame.values();
  set.dates = frame.dates();
  set.names = frame.names();
  set.roles = roles;
  set.options = opt;
  set.ols = fit_ols_var(set.data, opt.p);
  set.draws = sample_posterior(set.ols, opt.draws, opt.shrink, seed);

  std::vector<std::vector<RotationResult>> per_draw(set.draws.size());
  parallel_for(set.draws.size(), opt.threads, [&](std::size_t d) {
    const VarModel& m = set.draws[d].model;
    const MatrixXd P = Eigen::LLT<MatrixXd>(m.sigma).matrixL();
    const auto psi = ma_coefficients(m, 5);
    auto& out = per_draw[d];
    for (int i = 0; i < opt.rotations; ++i) {
      Rng rng = make_stream(seed, {0x726f74ULL, d, static_cast<std::uint64_t>(i)});
      const MatrixXd Q = draw_rotation(rng, n);
      MatrixXd B = P * Q;
      const auto asg = match_signs(psi, B, roles, opt.patterns);
      if (!asg) continue;
      RotationResult r;
      r.draw = static_cast<int>(d);
      r.rotation = i;
      r.weights = loose_weight(psi, B, *asg, roles, opt.delta);
      r.assignment = *asg;
      r.B = std::move(B);
      out.push_back(std::move(r));
    }
  });
  for (auto& v : per_draw)
    for (auto& r : v) set.accepted.push_back(std::move(r));
  set.rotations_tried = static_cast<long>(set.draws.size()) * opt.rotations;
  if (set.accepted.empty()) fail(ErrorCode::EmptyIdentifiedSet, "identify: no rotation satisfies all three patterns");
  for (std::size_t k = 0; k < 3; ++k) set.ess[k] = ess(set.weights(k));
  return set;
}

}  // namespace mpsent::svar
