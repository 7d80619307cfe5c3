#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpsent/core/error.hpp"

namespace mpsent::text {

/// units x coders, std::nullopt for a missing label.
using LabelMatrix = std::vector<std::vector<std::optional<std::string>>>;

/// Nominal coincidence matrix: each unit with m >= 2 labels contributes
/// 1/(m-1) for every ordered pair of its labels.
struct Coincidence {
  std::vector<std::string> values;
  std::vector<std::vector<double>> o;
};

inline Coincidence coincidence_matrix(const LabelMatrix& labels) {
  std::map<std::string, std::size_t> index;
  for (const auto& unit : labels)
    for (const auto& l : unit)
      if (l) index.emplace(*l, 0);
  Coincidence c;
  for (auto& [v, i] : index) {
    i = c.values.size();
    c.values.push_back(v);
  }
  const std::size_t k = c.values.size();
  c.o.assign(k, std::vector<double>(k, 0.0));
  for (const auto& unit : labels) {
    std::vector<std::size_t> vals;
    for (const auto& l : unit)
      if (l) vals.push_back(index.at(*l));
    if (vals.size() < 2) continue;
    const double w = 1.0 / static_cast<double>(vals.size() - 1);
    for (std::size_t a = 0; a < vals.size(); ++a)
      for (std::size_t b = 0; b < vals.size(); ++b)
        if (a != b) c.o[vals[a]][vals[b]] += w;
  }
  return c;
}

/// Krippendorff's alpha for nominal data.
inline double krippendorff_alpha(const LabelMatrix& labels) {
  std::size_t coders = 0, pairable_units = 0;
  for (const auto& unit : labels) {
    coders = std::max(coders, unit.size());
    std::size_t m = 0;
    for (const auto& l : unit) m += l.has_value();
    if (m >= 2) ++pairable_units;
  }
  require(coders >= 2, ErrorCode::InvalidArgument, "krippendorff_alpha: need at least two coders");
  require(pairable_units >= 1, ErrorCode::InvalidArgument,
          "krippendorff_alpha: need a unit with at least two labels");
  const Coincidence c = coincidence_matrix(labels);
  const std::size_t k = c.values.size();
  std::vector<double> nc(k, 0.0);
  double n = 0.0, observed = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      nc[a] += c.o[a][b];
      if (a != b) observed += c.o[a][b];
    }
  for (double v : nc) n += v;
  double expected = 0.0;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      if (a != b) expected += nc[a] * nc[b];
  if (k < 2 || expected == 0.0)
    fail(ErrorCode::DegenerateData, "krippendorff_alpha: only one distinct label among pairable values");
  return 1.0 - (n - 1.0) * observed / expected;
}

}  // namespace mpsent::text
