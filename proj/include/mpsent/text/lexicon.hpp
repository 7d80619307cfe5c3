#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpsent/core/error.hpp"

namespace mpsent::text {

using Tokens = std::vector<std::string>;

/// Lowercases ASCII and splits on anything that is not alphanumeric. Bytes
/// >= 0x80 count as alphanumeric so UTF-8 letters stay inside tokens.
inline Tokens tokenize(std::string_view s) {
  Tokens out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// A category's terms; multiword terms are token sequences.
class TermSet {
 public:
  TermSet() = default;
  explicit TermSet(const std::vector<std::string>& terms) {
    for (const auto& t : terms) add(t);
  }

  void add(std::string_view term) {
    Tokens tok = tokenize(term);
    if (tok.empty()) fail(ErrorCode::InvalidArgument, "lexicon: term '" + std::string(term) + "' has no tokens");
    if (std::find(terms_.begin(), terms_.end(), tok) != terms_.end()) return;
    terms_.push_back(std::move(tok));
  }

  const std::vector<Tokens>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Greedy left-to-right count: at each position take the longest matching
  /// term and skip past it.
  std::size_t count(const Tokens& words) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words.size();) {
      std::size_t best = 0;
      for (const auto& t : terms_)
        if (t.size() > best && i + t.size() <= words.size() &&
            std::equal(t.begin(), t.end(), words.begin() + static_cast<std::ptrdiff_t>(i)))
          best = t.size();
      if (best > 0) {
        ++n;
        i += best;
      } else {
        ++i;
      }
    }
    return n;
  }

 private:
  std::vector<Tokens> terms_;
};

struct Lexicon {
  TermSet positive;
  TermSet negative;
  TermSet uncertainty;
};

inline void validate(const Lexicon& lex) {
  for (const auto& p : lex.positive.terms())
    for (const auto& n : lex.negative.terms())
      if (p == n) {
        std::string joined;
        for (const auto& w : p) joined += (joined.empty() ? "" : " ") + w;
        fail(ErrorCode::InvalidArgument, "lexicon: '" + joined + "' is both positive and negative");
      }
}

/// One term per line under [positive], [negative] or [uncertainty] headers.
/// Blank lines and lines starting with '#' are skipped.
inline Lexicon parse_lexicon(std::string_view content) {
  Lexicon lex;
  TermSet* section = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t end = std::min(content.find('\n', pos), content.size());
    std::string line(content.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    if (line.front() == '[') {
      if (line == "[positive]") section = &lex.positive;
      else if (line == "[negative]") section = &lex.negative;
      else if (line == "[uncertainty]") section = &lex.uncertainty;
      else fail(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": unknown section " + line);
      continue;
    }
    if (!section) fail(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": term before any section");
    section->add(line);
  }
  validate(lex);
  return lex;
}

}  // namespace mpsent::text
