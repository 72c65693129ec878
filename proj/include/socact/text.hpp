#ifndef SOCACT_TEXT_HPP
#define SOCACT_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace socact {

namespace utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at `pos` and advances it. Malformed
/// sequences decode to U+FFFD and consume a single byte.
inline char32_t decode(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong forms, surrogates and out-of-range values.
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_space(char32_t cp) {
  return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0x85 || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

/// Simple case folding for the scripts that dominate the corpus: Latin
/// (ASCII, Latin-1, Extended-A), Greek, Cyrillic, Armenian and fullwidth
/// Latin. Code points outside these blocks fold to themselves.
inline char32_t fold(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 0x20 : cp;
  if (cp == 0xB5) return 0x3BC;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130 || cp == 0x131 || cp == 0x138 || cp == 0x149) return cp;
    if (cp == 0x178) return 0xFF;
    if (cp == 0x17F) return 's';
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp & 1) ? cp + 1 : cp;
    }
    return (cp & 1) ? cp : cp + 1;
  }
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 0x20;
  if (cp == 0x3C2) return 0x3C3;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x460 && cp <= 0x4FF) {
    if (cp >= 0x482 && cp <= 0x489) return cp;
    if (cp == 0x4C0) return 0x4CF;
    if (cp >= 0x4C1 && cp <= 0x4CE) return (cp & 1) ? cp + 1 : cp;
    if (cp == 0x4CF) return cp;
    return (cp & 1) ? cp : cp + 1;
  }
  if (cp >= 0x531 && cp <= 0x556) return cp + 0x30;
  if (cp == 0x1E9E) return 0xDF;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 0x20;
  return cp;
}

}  // namespace utf8

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80 ||
         (c >= 'A' && c <= 'Z');
}

inline bool is_handle_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool starts_with_url(std::string_view token) {
  return token.starts_with("http://") || token.starts_with("https://") ||
         token.starts_with("www.");
}

// Case fold and collapse whitespace runs into single spaces, trimming ends.
inline std::string fold_and_squeeze(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::decode(text, pos);
    if (utf8::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, utf8::fold(cp));
  }
  return out;
}

// Rewrites one whitespace-free token: URLs become <url>, @handles become
// <user>, and the '#' run in front of a hashtag word is dropped.
inline void rewrite_token(std::string_view token, std::string& out) {
  if (starts_with_url(token)) {
    out += "<url>";
    return;
  }
  std::size_t i = 0;
  while (i < token.size()) {
    const auto c = static_cast<unsigned char>(token[i]);
    const bool boundary = i == 0 || !is_word_byte(static_cast<unsigned char>(token[i - 1]));
    if (c == '@' && boundary && i + 1 < token.size() &&
        is_handle_byte(static_cast<unsigned char>(token[i + 1]))) {
      std::size_t j = i + 1;
      while (j < token.size() && is_handle_byte(static_cast<unsigned char>(token[j]))) ++j;
      out += "<user>";
      i = j;
      continue;
    }
    if (c == '#' && boundary) {
      std::size_t j = i;
      while (j < token.size() && token[j] == '#') ++j;
      if (j < token.size() && is_word_byte(static_cast<unsigned char>(token[j]))) {
        i = j;
        continue;
      }
    }
    out.push_back(token[i]);
    ++i;
  }
}

inline std::string normalize_once(std::string_view text) {
  const std::string folded = fold_and_squeeze(text);
  std::string out;
  out.reserve(folded.size() + 8);
  std::size_t start = 0;
  while (start < folded.size()) {
    std::size_t end = folded.find(' ', start);
    if (end == std::string::npos) end = folded.size();
    if (!out.empty()) out.push_back(' ');
    rewrite_token(std::string_view(folded).substr(start, end - start), out);
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Canonical message text: case folded, whitespace squeezed and trimmed,
/// URLs replaced by `<url>`, user mentions by `<user>`, hashtag marks
/// removed. The rewrite is iterated to a fixed point, so the result is
/// idempotent even for inputs like "@#x" where one rewrite exposes another.
inline std::string normalize_text(std::string_view text) {
  std::string current = detail::normalize_once(text);
  for (;;) {
    std::string next = detail::normalize_once(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

}  // namespace socact

#endif  // SOCACT_TEXT_HPP
