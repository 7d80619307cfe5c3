#pragma once

#include <array>
#include <string>
#include <string_view>

#include "mpsent/core/error.hpp"

namespace mpsent::bnk {

enum class ShockKind { AnticipatedMP, UnanticipatedMP, Narrative };

inline constexpr std::array<ShockKind, 3> kAllShocks = {ShockKind::AnticipatedMP, ShockKind::UnanticipatedMP,
                                                        ShockKind::Narrative};

inline const char* to_string(ShockKind k) {
  switch (k) {
    case ShockKind::AnticipatedMP: return "anticipated";
    case ShockKind::UnanticipatedMP: return "unanticipated";
    case ShockKind::Narrative: return "narrative";
  }
  return "?";
}

inline ShockKind parse_shock(std::string_view s) {
  if (s == "anticipated" || s == "a") return ShockKind::AnticipatedMP;
  if (s == "unanticipated" || s == "u") return ShockKind::UnanticipatedMP;
  if (s == "narrative" || s == "s") return ShockKind::Narrative;
  fail(ErrorCode::InvalidArgument, "unknown shock '" + std::string(s) + "'");
}

enum class Sign { Positive, Negative, Unrestricted };

inline int sign_value(Sign s) { return s == Sign::Positive ? 1 : s == Sign::Negative ? -1 : 0; }

/// Does v carry the restricted sign? Unrestricted always holds; zero never
/// satisfies a strict restriction.
inline bool satisfies(Sign s, double v) {
  switch (s) {
    case Sign::Positive: return v > 0.0;
    case Sign::Negative: return v < 0.0;
    case Sign::Unrestricted: return true;
  }
  return true;
}

enum class Role { R, S, ER, EX, EPi, X, Pi };

inline constexpr std::array<Role, 7> kAllRoles = {Role::R, Role::S, Role::ER, Role::EX, Role::EPi, Role::X, Role::Pi};

inline const char* to_string(Role r) {
  switch (r) {
    case Role::R: return "r";
    case Role::S: return "s";
    case Role::ER: return "E[r]";
    case Role::EX: return "E[x]";
    case Role::EPi: return "E[pi]";
    case Role::X: return "x";
    case Role::Pi: return "pi";
  }
  return "?";
}

struct SignPattern {
  std::array<Sign, 7> signs{Sign::Unrestricted, Sign::Unrestricted, Sign::Unrestricted, Sign::Unrestricted,
                            Sign::Unrestricted, Sign::Unrestricted, Sign::Unrestricted};

  Sign operator[](Role r) const { return signs[static_cast<std::size_t>(r)]; }
  Sign& operator[](Role r) { return signs[static_cast<std::size_t>(r)]; }
  bool operator==(const SignPattern&) const = default;
};

/// SVAR-facing sign restrictions for an easing (monetary shocks) or a
/// positive narrative innovation. Output and inflation are left free.
inline SignPattern sign_pattern(ShockKind k) {
  constexpr auto P = Sign::Positive;
  constexpr auto N = Sign::Negative;
  SignPattern p;
  switch (k) {
    case ShockKind::UnanticipatedMP:
      p[Role::R] = N, p[Role::S] = P, p[Role::ER] = N, p[Role::EX] = P, p[Role::EPi] = P;
      break;
    case ShockKind::AnticipatedMP:
      p[Role::R] = P, p[Role::S] = P, p[Role::ER] = N, p[Role::EX] = P, p[Role::EPi] = P;
      break;
    case ShockKind::Narrative:
      p[Role::R] = P, p[Role::S] = P, p[Role::ER] = P, p[Role::EX] = N, p[Role::EPi] = N;
      break;
  }
  return p;
}

}  // namespace mpsent::bnk
