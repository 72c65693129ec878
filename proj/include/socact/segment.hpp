#ifndef SOCACT_SEGMENT_HPP
#define SOCACT_SEGMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "socact/common.hpp"
#include "socact/text.hpp"

namespace socact {

using Tokens = std::vector<std::string>;

namespace detail {

inline bool is_emoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x2190 && cp <= 0x21FF) ||
         (cp >= 0x2300 && cp <= 0x23FF) || cp == 0x00A9 || cp == 0x00AE;
}

inline bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0F || cp == 0xFE0E || (cp >= 0x1F3FB && cp <= 0x1F3FF) ||
         (cp >= 0xE0020 && cp <= 0xE007F) || cp == 0x20E3;
}

inline bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }

inline bool is_ascii_punct(char32_t cp) {
  return cp < 0x80 && cp > 0x20 && !((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
                                     (cp >= '0' && cp <= '9') || cp == '_');
}

// Non-ASCII general punctuation that should split like ASCII punctuation.
inline bool is_unicode_punct(char32_t cp) {
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x300C && cp <= 0x3011) ||
         (cp >= 0xFF01 && cp <= 0xFF0F) || cp == 0x00A1 || cp == 0x00BF || cp == 0x00AB ||
         cp == 0x00BB;
}

inline bool is_word_cp(char32_t cp) {
  if (cp < 0x80) return !is_ascii_punct(cp) && cp > 0x20;
  return !is_emoji(cp) && !is_emoji_modifier(cp) && !is_unicode_punct(cp) &&
         !is_regional_indicator(cp) && cp != 0x200D;
}

// Tokenizes a single whitespace-free chunk.
inline void tokenize_chunk(std::string_view chunk, Tokens& out) {
  std::size_t pos = 0;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  while (pos < chunk.size()) {
    const std::string_view rest = chunk.substr(pos);
    if (rest.starts_with("<url>") || rest.starts_with("<user>")) {
      flush();
      const std::size_t len = rest.starts_with("<url>") ? 5 : 6;
      out.emplace_back(rest.substr(0, len));
      pos += len;
      continue;
    }
    const std::size_t cp_start = pos;
    const char32_t cp = utf8::decode(chunk, pos);
    if (is_word_cp(cp)) {
      utf8::append(word, cp);
      continue;
    }
    // Apostrophes and hyphens joining two word characters stay in the word.
    if ((cp == '\'' || cp == '-' || cp == 0x2019) && !word.empty() && pos < chunk.size()) {
      std::size_t peek = pos;
      if (is_word_cp(utf8::decode(chunk, peek))) {
        utf8::append(word, cp);
        continue;
      }
    }
    flush();
    if (is_emoji(cp) || is_regional_indicator(cp) || is_emoji_modifier(cp) || cp == 0x200D) {
      // One emoji with its modifiers, ZWJ continuations and flag pair.
      std::size_t end = pos;
      bool flag_pending = is_regional_indicator(cp);
      while (end < chunk.size()) {
        std::size_t peek = end;
        const char32_t next = utf8::decode(chunk, peek);
        if (is_emoji_modifier(next)) {
          end = peek;
        } else if (flag_pending && is_regional_indicator(next)) {
          flag_pending = false;
          end = peek;
        } else if (next == 0x200D && peek < chunk.size()) {
          std::size_t peek2 = peek;
          const char32_t joined = utf8::decode(chunk, peek2);
          if (!is_emoji(joined)) break;
          end = peek2;
        } else {
          break;
        }
      }
      out.emplace_back(chunk.substr(cp_start, end - cp_start));
      pos = end;
      continue;
    }
    out.emplace_back(chunk.substr(cp_start, pos - cp_start));
  }
  flush();
}

}  // namespace detail

/// Splits normalized text into tokens. Whitespace separates; punctuation
/// becomes single-character tokens except inside the `<url>` and `<user>`
/// sentinels; emoji (with modifiers) are single tokens.
inline Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t start = 0;
  while (start < text.size()) {
    while (start < text.size() && (text[start] == ' ' || (text[start] >= '\t' && text[start] <= '\r'))) ++start;
    std::size_t end = start;
    while (end < text.size() && !(text[end] == ' ' || (text[end] >= '\t' && text[end] <= '\r'))) ++end;
    if (end > start) detail::tokenize_chunk(text.substr(start, end - start), out);
    start = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phrases

/// Canonical phrase key: tokens joined by a single space.
inline std::string phrase_key(std::span<const std::string> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back(' ');
    key += tokens[i];
  }
  return key;
}

inline std::size_t phrase_length(std::string_view key) {
  return key.empty() ? 0 : static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
}

inline bool valid_token(std::string_view tok) {
  return !tok.empty() && tok.find_first_of(" \t\n\r\v\f") == std::string_view::npos;
}

/// A bag of phrases with integer frequencies. Keys are kept sorted so
/// iteration order, and every sum over it, is deterministic.
class Document {
 public:
  using Map = std::map<std::string, std::uint32_t, std::less<>>;

  void add(std::string phrase, std::uint32_t count = 1) {
    if (count == 0) return;
    total_tokens_ += phrase_length(phrase) * count;
    phrases_[std::move(phrase)] += count;
  }

  const Map& phrases() const { return phrases_; }
  std::size_t distinct() const { return phrases_.size(); }
  std::size_t total_tokens() const { return total_tokens_; }
  bool empty() const { return phrases_.empty(); }

  std::uint32_t frequency(std::string_view phrase) const {
    auto it = phrases_.find(phrase);
    return it == phrases_.end() ? 0 : it->second;
  }

  /// Frequency-wise sum.
  void merge(const Document& other) {
    for (const auto& [p, f] : other.phrases_) add(p, f);
  }

  /// Every frequency multiplied by `m`.
  Document scaled(std::uint32_t m) const {
    Document d;
    for (const auto& [p, f] : phrases_) d.add(p, f * m);
    return d;
  }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  Map phrases_;
  std::size_t total_tokens_ = 0;
};

// ---------------------------------------------------------------------------
// Multiword-expression lexicon

class MweLexicon {
 public:
  MweLexicon() = default;

  /// Throws if any entry is shorter than two tokens, malformed, or repeated.
  explicit MweLexicon(const std::vector<Tokens>& entries) {
    for (const auto& e : entries) insert(e);
  }

  void insert(const Tokens& entry) {
    if (entry.size() < 2) {
      throw Error("invalid-lexicon", "lexicon entries need at least two tokens: " + phrase_key(entry));
    }
    for (const auto& t : entry) {
      if (!valid_token(t)) throw Error("invalid-lexicon", "malformed token in lexicon entry");
    }
    auto key = phrase_key(entry);
    if (!entries_.insert(key).second) throw Error("duplicate-entry", "duplicate lexicon entry: " + key);
    max_len_ = std::max(max_len_, entry.size());
  }

  bool contains(std::string_view key) const { return entries_.count(std::string(key)) != 0; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_len() const { return max_len_; }

  /// Entries in lexicographic order.
  std::vector<std::string> sorted_entries() const {
    std::vector<std::string> v(entries_.begin(), entries_.end());
    std::sort(v.begin(), v.end());
    return v;
  }

 private:
  std::unordered_set<std::string> entries_;
  std::size_t max_len_ = 0;
};

/// Lexicon file: one phrase per line, tokens space separated; lines whose
/// first non-blank character is '#' are comments.
inline MweLexicon read_lexicon(std::istream& in) {
  MweLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    Tokens toks;
    std::size_t pos = first;
    while (pos < line.size()) {
      const auto end = line.find_first_of(" \t\r", pos);
      const auto stop = end == std::string::npos ? line.size() : end;
      if (stop > pos) toks.emplace_back(line.substr(pos, stop - pos));
      pos = stop == line.size() ? stop : stop + 1;
    }
    lex.insert(toks);
  }
  return lex;
}

inline void write_lexicon(std::ostream& out, const MweLexicon& lex) {
  out << "# multiword expression lexicon: " << lex.size() << " entries\n";
  for (const auto& e : lex.sorted_entries()) out << e << '\n';
}

/// Greedy left-to-right longest match: at each position the longest
/// lexicon entry starting there is consumed, otherwise one token is.
/// Returns the token length of each consumed piece, in order.
inline std::vector<std::size_t> segment_pieces(std::span<const std::string> tokens, const MweLexicon& lexicon) {
  std::vector<std::size_t> pieces;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t take = 1;
    const std::size_t longest = std::min(lexicon.max_len(), n - i);
    for (std::size_t len = longest; len >= 2; --len) {
      if (lexicon.contains(phrase_key(tokens.subspan(i, len)))) {
        take = len;
        break;
      }
    }
    pieces.push_back(take);
    i += take;
  }
  return pieces;
}

/// Bag of phrases produced by segment_pieces.
inline Document segment(std::span<const std::string> tokens, const MweLexicon& lexicon) {
  Document doc;
  std::size_t i = 0;
  for (const std::size_t len : segment_pieces(tokens, lexicon)) {
    if (len == 1) {
      doc.add(tokens[i]);
    } else {
      doc.add(phrase_key(tokens.subspan(i, len)));
    }
    i += len;
  }
  return doc;
}

/// Raw text to Document: normalize, tokenize, segment.
inline Document featurize(std::string_view raw_text, const MweLexicon& lexicon) {
  const Tokens toks = tokenize(normalize_text(raw_text));
  return segment(toks, lexicon);
}

// ---------------------------------------------------------------------------
// Lexicon induction

struct InductionParams {
  std::size_t min_count = 25;
  double min_score = 1.0;
  std::size_t max_len = 4;
};

/// Mergeable n-gram counts. Counting is additive, so shards counted
/// separately and merged in any order give identical totals.
class NgramCounts {
 public:
  explicit NgramCounts(std::size_t max_len) : max_len_(max_len) {
    if (max_len < 2 || max_len > 6) throw Error("invalid-parameter", "max_len must be in [2, 6]");
    positions_.assign(max_len + 1, 0);
  }

  void add(std::span<const std::string> tokens) {
    ++documents_;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      ++unigrams_[tokens[i]];
      ++positions_[1];
      if (!eligible(tokens[i])) continue;
      for (std::size_t n = 2; n <= max_len_ && i + n <= tokens.size(); ++n) {
        if (!eligible(tokens[i + n - 1])) break;
        ++ngrams_[phrase_key(tokens.subspan(i, n))];
        ++positions_[n];
      }
    }
  }

  void merge(const NgramCounts& other) {
    if (other.max_len_ != max_len_) throw Error("invalid-parameter", "merging counts of different max_len");
    documents_ += other.documents_;
    for (std::size_t n = 0; n < positions_.size(); ++n) positions_[n] += other.positions_[n];
    for (const auto& [k, c] : other.unigrams_) unigrams_[k] += c;
    for (const auto& [k, c] : other.ngrams_) ngrams_[k] += c;
  }

  std::size_t documents() const { return documents_; }
  std::size_t max_len() const { return max_len_; }
  std::uint64_t total_tokens() const { return positions_[1]; }
  std::uint64_t positions(std::size_t n) const { return positions_[n]; }
  std::uint64_t unigram(const std::string& t) const {
    auto it = unigrams_.find(t);
    return it == unigrams_.end() ? 0 : it->second;
  }
  const std::unordered_map<std::string, std::uint64_t>& ngrams() const { return ngrams_; }

  /// Punctuation tokens and sentinels never take part in an expression.
  static bool eligible(std::string_view tok) {
    if (tok == "<url>" || tok == "<user>") return false;
    if (tok.size() == 1 && detail::is_ascii_punct(static_cast<unsigned char>(tok[0]))) return false;
    return true;
  }

 private:
  std::size_t max_len_;
  std::size_t documents_ = 0;
  std::vector<std::uint64_t> positions_;
  std::unordered_map<std::string, std::uint64_t> unigrams_;
  std::unordered_map<std::string, std::uint64_t> ngrams_;
};

/// Association score of an n-gram: log10(p(g) / prod p(token_i)) / (n - 1),
/// where p(g) is relative to the number of length-n positions and p(token)
/// to the total token count.
inline double association_score(const NgramCounts& counts, const std::string& key,
                                std::uint64_t count) {
  const std::size_t n = phrase_length(key);
  double score = std::log10(static_cast<double>(count) / static_cast<double>(counts.positions(n)));
  const double total = static_cast<double>(counts.total_tokens());
  std::size_t pos = 0;
  while (pos <= key.size()) {
    auto end = key.find(' ', pos);
    if (end == std::string::npos) end = key.size();
    const auto uni = counts.unigram(key.substr(pos, end - pos));
    score -= std::log10(static_cast<double>(uni) / total);
    pos = end + 1;
  }
  return score / static_cast<double>(n - 1);
}

inline MweLexicon induce_lexicon(const NgramCounts& counts, std::size_t min_count, double min_score) {
  if (counts.documents() == 0) throw Error("empty-corpus", "lexicon induction needs a non-empty corpus");
  std::vector<std::string> keep;
  for (const auto& [key, c] : counts.ngrams()) {
    if (c < min_count) continue;
    if (association_score(counts, key, c) >= min_score) keep.push_back(key);
  }
  std::sort(keep.begin(), keep.end());
  MweLexicon lex;
  for (const auto& key : keep) {
    Tokens toks;
    std::size_t pos = 0;
    while (pos <= key.size()) {
      auto end = key.find(' ', pos);
      if (end == std::string::npos) end = key.size();
      toks.push_back(key.substr(pos, end - pos));
      pos = end + 1;
    }
    lex.insert(toks);
  }
  return lex;
}

/// All n-grams (2 <= n <= max_len) seen at least min_count times whose
/// association score reaches min_score.
inline MweLexicon induce_lexicon(std::span<const Tokens> corpus, const InductionParams& params) {
  if (corpus.empty()) throw Error("empty-corpus", "lexicon induction needs a non-empty corpus");
  NgramCounts counts(params.max_len);
  for (const auto& doc : corpus) counts.add(doc);
  return induce_lexicon(counts, params.min_count, params.min_score);
}

}  // namespace socact

#endif  // SOCACT_SEGMENT_HPP
