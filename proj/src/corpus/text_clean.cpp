#include <regex>
#include <string>

#include "driftdet/corpus.hpp"
#include "driftdet/error.hpp"
#include "utf8.hpp"

namespace driftdet {

namespace detail {

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

}  // namespace detail

namespace {

bool is_emoji(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) || cp == 0xFE0F;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x300 && cp <= 0x36F) return true;  // combining marks
  if (cp >= 0x370 && cp <= 0x1FFF) return cp != 0x37E && cp != 0x387;
  if (cp >= 0x3040 && cp <= 0x9FFF) return true;
  if (cp >= 0xAC00 && cp <= 0xD7AF) return true;
  if (cp >= 0xF900 && cp <= 0xFAFF) return true;
  return (cp >= 0xFF10 && cp <= 0xFF19) || (cp >= 0xFF21 && cp <= 0xFF3A) ||
         (cp >= 0xFF41 && cp <= 0xFF5A);
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 && cp != 0x138 && cp != 0x178 &&
      !(cp >= 0x139 && cp <= 0x148) && !(cp >= 0x179 && cp <= 0x17E)) {
    return cp | 1;
  }
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
    return (cp & 1) ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

const std::regex& html_pattern() {
  static const std::regex re("<[^>]*>");
  return re;
}

const std::regex& url_pattern() {
  static const std::regex re(R"([A-Za-z][A-Za-z0-9+.\-]*://\S*|[Ww][Ww][Ww]\.\S*)");
  return re;
}

std::string drop_emoji(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : detail::decode_utf8(text)) {
    if (!is_emoji(cp)) detail::append_utf8(out, cp);
  }
  return out;
}

}  // namespace

std::string strip_noise(std::string_view text) {
  std::string current(text);
  // Removing one construct can splice another together ("www<b>.x"), so
  // iterate to a fixpoint.
  for (;;) {
    std::string next = std::regex_replace(current, html_pattern(), " ");
    next = std::regex_replace(next, url_pattern(), " ");
    next = drop_emoji(next);
    if (next == current) return next;
    current = std::move(next);
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string cps = detail::decode_utf8(text);
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (is_word_char(cp)) {
      detail::append_utf8(word, to_lower(cp));
    } else if (is_apostrophe(cp) && !word.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1])) {
      word.push_back('\'');
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

CleanDocument clean(const Document& doc, bool for_word_vectors) {
  CleanDocument out;
  out.id = doc.id;
  auto words = tokenize(strip_noise(doc.raw_text));

  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.sentence_text.push_back(' ');
    out.sentence_text += words[i];
  }
  if (for_word_vectors) {
    for (const auto& w : words) {
      if (!is_stopword(w)) out.tokens.push_back(porter_stem(w));
    }
  } else {
    out.tokens = std::move(words);
  }
  if (out.tokens.empty()) {
    throw Error(ErrorCode::EmptyAfterCleaning, "document '" + doc.id + "' has no tokens after cleaning");
  }
  return out;
}

}  // namespace driftdet
