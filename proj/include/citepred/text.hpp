#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace citepred {

/// Canonical title key: NFKC + case folding, punctuation and symbols turned
/// into separators, apostrophes dropped, whitespace collapsed. Idempotent.
std::string normalize_title(std::string_view title);

struct TokenizerOptions {
  bool remove_stopwords = false;
  bool stem = false;
};

/// Lowercased, NFKC-normalized alphanumeric word segmentation.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerOptions& options = {});

/// Conservative plural stripping: "ies" becomes "y", otherwise a final "s"
/// is dropped unless the word ends in "ss" or "us".
std::string light_stem(std::string_view word);

bool is_stopword(std::string_view word);

/// Levenshtein distance over Unicode code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

std::string trim(std::string_view s);

}  // namespace citepred
