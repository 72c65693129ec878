#ifndef SOCACT_EXPLAIN_HPP
#define SOCACT_EXPLAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "socact/classify.hpp"
#include "socact/segment.hpp"

namespace socact {

/// Reserved entry collecting every out-of-vocabulary phrase.
inline constexpr std::string_view kOovPhrase = "<oov>";

struct ShiftEntry {
  std::string phrase;
  /// f(w) * (log10 L(w|c+) - log10 L(w|c-)); positive pulls toward the mode.
  double contribution = 0.0;
  std::uint64_t frequency = 0;

  friend bool operator==(const ShiftEntry&, const ShiftEntry&) = default;
};

struct PhraseShift {
  ActionMode mode = ActionMode::All;
  /// Sorted by |contribution| descending, ties by phrase ascending.
  std::vector<ShiftEntry> entries;
  /// Sum of the entries' contributions, accumulated in entry order.
  double total = 0.0;
  bool aggregate = false;
  std::size_t doc_count = 1;
};

namespace detail {

inline void sort_and_total(PhraseShift& s) {
  std::sort(s.entries.begin(), s.entries.end(), [](const ShiftEntry& a, const ShiftEntry& b) {
    const double ma = std::abs(a.contribution), mb = std::abs(b.contribution);
    if (ma != mb) return ma > mb;
    return a.phrase < b.phrase;
  });
  s.total = 0.0;
  for (const auto& e : s.entries) s.total += e.contribution;
}

}  // namespace detail

/// Per-phrase contributions to the posterior log odds of one document.
/// The total equals log-odds(posterior) minus log-odds(prior).
inline PhraseShift shift_single(const BayesModel& model, const Document& doc) {
  PhraseShift s;
  s.mode = model.mode;
  std::uint64_t oov = 0;
  for (const auto& [phrase, f] : doc.phrases()) {
    auto it = model.loglik.find(phrase);
    if (it == model.loglik.end()) {
      oov += f;
      continue;
    }
    s.entries.push_back({phrase, static_cast<double>(f) * (it->second.pos - it->second.neg), f});
  }
  if (oov) {
    s.entries.push_back(
        {std::string(kOovPhrase), static_cast<double>(oov) * (model.unseen_pos - model.unseen_neg), oov});
  }
  detail::sort_and_total(s);
  return s;
}

/// Shift of a document set: the single-document shift of the frequency sum.
inline PhraseShift shift_aggregate(const BayesModel& model, std::span<const Document> docs) {
  if (docs.empty()) throw Error("empty-selection", "phrase shift aggregation needs at least one document");
  Document merged;
  for (const auto& d : docs) merged.merge(d);
  PhraseShift s = shift_single(model, merged);
  s.aggregate = true;
  s.doc_count = docs.size();
  return s;
}

inline constexpr int kShiftVersion = 1;

/// Export object. Entries beyond `top_k` are dropped from the list but the
/// total always covers the full shift.
inline nlohmann::ordered_json shift_to_json(const PhraseShift& s, std::size_t top_k,
                                            const nlohmann::ordered_json& window = nullptr) {
  nlohmann::ordered_json obj;
  obj["format"] = "socact.shift";
  obj["version"] = kShiftVersion;
  obj["mode"] = std::string(mode_name(s.mode));
  obj["scope"] = s.aggregate ? "aggregate" : "single";
  obj["doc_count"] = s.doc_count;
  obj["window"] = window;
  auto entries = nlohmann::ordered_json::array();
  const std::size_t n = std::min(top_k, s.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = s.entries[i];
    entries.push_back({{"phrase", e.phrase}, {"contribution", e.contribution}, {"frequency", e.frequency}});
  }
  obj["entries"] = std::move(entries);
  obj["entry_count"] = s.entries.size();
  obj["total"] = s.total;
  obj["truncated"] = n < s.entries.size();
  return obj;
}

}  // namespace socact

#endif  // SOCACT_EXPLAIN_HPP
