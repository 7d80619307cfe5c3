#pragma once

#include <map>
#include <string>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/text/lexicon.hpp"

namespace mpsent::text {

struct Document {
  std::string id;
  Date date;
  std::string text;
};

struct ToneCounts {
  std::size_t words = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t uncertainty = 0;

  ToneCounts& operator+=(const ToneCounts& o) {
    words += o.words;
    positive += o.positive;
    negative += o.negative;
    uncertainty += o.uncertainty;
    return *this;
  }
};

inline ToneCounts count_terms(const std::string& text, const Lexicon& lex) {
  const Tokens words = tokenize(text);
  return {words.size(), lex.positive.count(words), lex.negative.count(words), lex.uncertainty.count(words)};
}

/// Counts pooled over the documents.
inline ToneCounts count_terms(const std::vector<Document>& docs, const Lexicon& lex) {
  ToneCounts c;
  for (const auto& d : docs) c += count_terms(d.text, lex);
  return c;
}

/// (n+ - n-) / n_words over the pooled documents of one period.
inline double tone_index(const std::vector<Document>& docs, const Lexicon& lex) {
  const ToneCounts c = count_terms(docs, lex);
  if (c.words == 0) fail(ErrorCode::EmptyPeriod, "tone_index: no words in period");
  return (static_cast<double>(c.positive) - static_cast<double>(c.negative)) / static_cast<double>(c.words);
}

enum class SentenceLabel { Positive, Negative, Neutral };

inline SentenceLabel parse_sentence_label(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "positive" || l == "pos" || l == "1") return SentenceLabel::Positive;
  if (l == "negative" || l == "neg" || l == "-1") return SentenceLabel::Negative;
  if (l == "neutral" || l == "neu" || l == "0") return SentenceLabel::Neutral;
  fail(ErrorCode::ParseError, "unknown sentence label '" + s + "'");
}

/// (n_pos - n_neg) / n_sentences.
inline double label_tone_index(const std::vector<SentenceLabel>& labels) {
  if (labels.empty()) fail(ErrorCode::EmptyPeriod, "label_tone_index: no labeled sentences");
  double net = 0.0;
  for (auto l : labels) net += l == SentenceLabel::Positive ? 1.0 : l == SentenceLabel::Negative ? -1.0 : 0.0;
  return net / static_cast<double>(labels.size());
}

/// Quarter-start date of d.
inline Date quarter_of(const Date& d) {
  const unsigned m = static_cast<unsigned>(d.month());
  return Date{d.year(), std::chrono::month{(m - 1) / 3 * 3 + 1}, std::chrono::day{1}};
}

/// Documents grouped by quarter, in date order.
inline std::map<Date, std::vector<Document>> group_by_quarter(const std::vector<Document>& docs) {
  std::map<Date, std::vector<Document>> out;
  for (const auto& d : docs) out[quarter_of(d.date)].push_back(d);
  return out;
}

struct IndexPoint {
  Date period;
  ToneCounts counts;
  double value = 0.0;
};

/// Per-quarter tone series.
inline std::vector<IndexPoint> tone_series(const std::vector<Document>& docs, const Lexicon& lex) {
  std::vector<IndexPoint> out;
  for (const auto& [q, group] : group_by_quarter(docs)) {
    IndexPoint p{q, count_terms(group, lex), 0.0};
    if (p.counts.words == 0) fail(ErrorCode::EmptyPeriod, "tone_series: no words in " + format_date(q));
    p.value = (static_cast<double>(p.counts.positive) - static_cast<double>(p.counts.negative)) /
              static_cast<double>(p.counts.words);
    out.push_back(p);
  }
  return out;
}

inline double uncertainty_raw(const ToneCounts& c) {
  if (c.words == 0) fail(ErrorCode::EmptyPeriod, "uncertainty: no words in period");
  return 100.0 * static_cast<double>(c.uncertainty) / static_cast<double>(c.words);
}

struct UncertaintyPoint {
  Date period;
  double raw = 0.0;
  double index = 0.0;
};

/// Rescales raw so its mean over periods in [base_begin, base_end] is 100.
inline std::vector<double> normalize_to_base(const std::vector<Date>& periods, const std::vector<double>& raw,
                                             const Date& base_begin, const Date& base_end) {
  require(periods.size() == raw.size(), ErrorCode::InvalidArgument, "normalize_to_base: length mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!(periods[i] < base_begin) && !(base_end < periods[i])) {
      sum += raw[i];
      ++n;
    }
  if (n == 0) fail(ErrorCode::EmptyBaseWindow, "uncertainty: base window contains no periods");
  if (sum == 0.0) fail(ErrorCode::DegenerateData, "uncertainty: base-window mean is zero");
  const double scale = 100.0 * static_cast<double>(n) / sum;
  std::vector<double> out;
  for (double r : raw) out.push_back(r * scale);
  return out;
}

inline std::vector<UncertaintyPoint> uncertainty_index(const std::vector<Document>& docs, const Lexicon& lex,
                                                       const Date& base_begin, const Date& base_end) {
  std::vector<Date> periods;
  std::vector<double> raw;
  for (const auto& [q, group] : group_by_quarter(docs)) {
    periods.push_back(q);
    raw.push_back(uncertainty_raw(count_terms(group, lex)));
  }
  const auto idx = normalize_to_base(periods, raw, base_begin, base_end);
  std::vector<UncertaintyPoint> out;
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back({periods[i], raw[i], idx[i]});
  return out;
}

}  // namespace mpsent::text
