#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mpsent/core/error.hpp"
#include "mpsent/core/frame.hpp"
#include "mpsent/io/csv.hpp"
#include "mpsent/text.hpp"

namespace mpsent::io {

namespace detail {

inline std::map<std::string, std::size_t> header_index(const CsvTable& t, const std::vector<std::string>& need,
                                                       const std::string& what) {
  if (t.empty()) fail(ErrorCode::ParseError, what + ": empty file");
  std::map<std::string, std::size_t> idx;
  for (std::size_t j = 0; j < t.front().size(); ++j) idx[trim(t.front()[j])] = j;
  for (const auto& n : need)
    if (!idx.count(n)) fail(ErrorCode::ParseError, what + ": missing column '" + n + "'");
  return idx;
}

inline const std::string& cell(const CsvTable& t, std::size_t row, std::size_t col, const std::string& what) {
  if (col >= t[row].size())
    fail(ErrorCode::ParseError, what + ": row " + std::to_string(row + 1) + " is short");
  return t[row][col];
}

}  // namespace detail

/// Corpus CSV with columns id, date, text.
inline std::vector<text::Document> parse_corpus(std::string_view content) {
  const CsvTable t = parse_csv(content);
  const auto idx = detail::header_index(t, {"id", "date", "text"}, "corpus csv");
  std::vector<text::Document> docs;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const std::string& ds = detail::cell(t, i, idx.at("date"), "corpus csv");
    auto d = parse_date(trim(ds));
    if (!d) fail(ErrorCode::ParseError, "corpus csv: row " + std::to_string(i + 1) + ": bad date '" + ds + "'");
    text::Document doc{trim(detail::cell(t, i, idx.at("id"), "corpus csv")), *d,
                       detail::cell(t, i, idx.at("text"), "corpus csv")};
    if (trim(doc.text).empty())
      fail(ErrorCode::ParseError, "corpus csv: row " + std::to_string(i + 1) + ": empty text");
    docs.push_back(std::move(doc));
  }
  return docs;
}

/// Label CSV with columns unit, coder, label; empty label means missing.
/// Units and coders keep their order of first appearance.
inline text::LabelMatrix parse_labels(std::string_view content) {
  const CsvTable t = parse_csv(content);
  const auto idx = detail::header_index(t, {"unit", "coder", "label"}, "labels csv");
  std::vector<std::string> units, coders;
  std::map<std::string, std::size_t> ui, ci;
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> entries;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const std::string u = trim(detail::cell(t, i, idx.at("unit"), "labels csv"));
    const std::string c = trim(detail::cell(t, i, idx.at("coder"), "labels csv"));
    const std::string l = trim(detail::cell(t, i, idx.at("label"), "labels csv"));
    if (!ui.count(u)) {
      ui[u] = units.size();
      units.push_back(u);
    }
    if (!ci.count(c)) {
      ci[c] = coders.size();
      coders.push_back(c);
    }
    entries.emplace_back(ui[u], ci[c], l);
  }
  text::LabelMatrix m(units.size(), std::vector<std::optional<std::string>>(coders.size()));
  for (const auto& [u, c, l] : entries) {
    if (m[u][c]) fail(ErrorCode::ParseError, "labels csv: unit " + units[u] + " coded twice by " + coders[c]);
    if (!l.empty()) m[u][c] = l;
  }
  return m;
}

/// Sentence label CSV with columns date, label.
inline std::vector<std::pair<Date, text::SentenceLabel>> parse_sentence_labels(std::string_view content) {
  const CsvTable t = parse_csv(content);
  const auto idx = detail::header_index(t, {"date", "label"}, "sentence labels csv");
  std::vector<std::pair<Date, text::SentenceLabel>> out;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const std::string& ds = detail::cell(t, i, idx.at("date"), "sentence labels csv");
    auto d = parse_date(trim(ds));
    if (!d) fail(ErrorCode::ParseError, "sentence labels csv: row " + std::to_string(i + 1) + ": bad date");
    out.emplace_back(*d, text::parse_sentence_label(trim(detail::cell(t, i, idx.at("label"), "sentence labels csv"))));
  }
  return out;
}

}  // namespace mpsent::io
