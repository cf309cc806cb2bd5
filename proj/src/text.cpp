#include "citepred/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <stdexcept>

namespace citepred {

namespace {

const icu::Normalizer2& nfkc_casefold() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCCasefoldInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
      throw std::runtime_error("ICU NFKC_Casefold normalizer unavailable");
    }
    return n;
  }();
  return *instance;
}

bool is_apostrophe(UChar32 c) {
  return c == 0x0027 || c == 0x2019 || c == 0x02BC || c == 0x2018;
}

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  const int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

// Folds `text` and calls `emit` once per maximal run of word characters.
template <typename Emit>
void for_each_word(std::string_view text, Emit&& emit) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString folded = nfkc_casefold().normalize(src, status);
  if (U_FAILURE(status)) return;

  icu::UnicodeString word;
  auto flush = [&] {
    if (word.isEmpty()) return;
    std::string utf8;
    word.toUTF8String(utf8);
    emit(std::move(utf8));
    word.remove();
  };
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    if (is_apostrophe(c)) continue;
    if (is_word_char(c)) {
      word.append(c);
    } else {
      flush();
    }
  }
  flush();
}

constexpr std::array<std::string_view, 64> kStopwords = {
    "a",     "about", "above", "after", "again", "all",   "an",    "and",
    "any",   "are",   "as",    "at",    "be",    "been",  "being", "both",
    "but",   "by",    "can",   "did",   "do",    "does",  "each",  "few",
    "for",   "from",  "had",   "has",   "have",  "he",    "her",   "his",
    "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",
    "more",  "most",  "no",    "not",   "of",    "on",    "or",    "other",
    "our",   "she",   "so",    "such",  "than",  "that",  "the",   "their",
    "then",  "there", "these", "they",  "this",  "to",    "we",    "with"};

}  // namespace

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  for_each_word(title, [&](std::string word) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  });
  return out;
}

bool is_stopword(std::string_view word) {
  return std::find(kStopwords.begin(), kStopwords.end(), word) != kStopwords.end();
}

std::string light_stem(std::string_view w) {
  auto ends_with = [&](std::string_view suf) {
    return w.size() > suf.size() && w.substr(w.size() - suf.size()) == suf;
  };
  if (w.size() <= 3) return std::string(w);
  if (ends_with("ies") && !ends_with("eies") && !ends_with("aies")) {
    return std::string(w.substr(0, w.size() - 3)) + "y";
  }
  if (ends_with("es") && !ends_with("aes") && !ends_with("ees") && !ends_with("oes")) {
    return std::string(w.substr(0, w.size() - 1));
  }
  if (ends_with("s") && !ends_with("us") && !ends_with("ss")) {
    return std::string(w.substr(0, w.size() - 1));
  }
  return std::string(w);
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  for_each_word(text, [&](std::string word) {
    if (options.remove_stopwords && is_stopword(word)) return;
    tokens.push_back(options.stem ? light_stem(word) : std::move(word));
  });
  return tokens;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  auto code_points = [](std::string_view s) {
    const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    std::vector<UChar32> cps;
    for (int32_t i = 0; i < u.length();) {
      const UChar32 c = u.char32At(i);
      cps.push_back(c);
      i += U16_LENGTH(c);
    }
    return cps;
  };
  const auto x = code_points(a);
  const auto y = code_points(b);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace citepred
