#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/ranked_list.hpp"
#include "citepred/text.hpp"

namespace citepred {

enum class SparseScorer { tfidf, bm25 };

std::string_view to_string(SparseScorer scorer);
SparseScorer parse_sparse_scorer(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct SparseConfig {
  TokenizerOptions tokenizer;
  Bm25Params bm25;
};

struct Posting {
  std::uint32_t doc = 0;  ///< position in the index's document table
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Term → postings over one corpus level. Immutable once built; safe for
/// concurrent searches.
///
/// BM25:   idf(t) = ln((N − df + 0.5)/(df + 0.5) + 1)
///         w(t,d) = idf · tf·(k1+1) / (tf + k1·(1 − b + b·|d|/avgdl))
/// TF-IDF: w(t,d) = ln(1+tf) · ln(N/df), cosine-normalized on both sides.
/// Query terms are deduplicated for BM25; TF-IDF weighs them by ln(1+qtf).
class InvertedIndex {
 public:
  /// Throws ValidationError for an empty corpus.
  static InvertedIndex build(const Corpus& corpus, CorpusLevel level,
                             const SparseConfig& config = {});
  /// Generic build over (id, text) pairs; ids must be unique.
  static InvertedIndex build(const std::vector<std::pair<std::string, std::string>>& docs,
                             CorpusLevel level, const SparseConfig& config = {});

  CorpusLevel level() const noexcept { return level_; }
  const SparseConfig& config() const noexcept { return config_; }
  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
  const std::string& doc_id(std::size_t i) const { return doc_ids_.at(i); }
  std::uint32_t doc_length(std::size_t i) const { return doc_lengths_.at(i); }
  std::span<const Posting> postings(const std::string& term) const;
  std::size_t document_frequency(const std::string& term) const { return postings(term).size(); }

  /// Top-k by score; zero-score documents never appear. Throws
  /// ValidationError when k is 0.
  RankedList search(std::string_view query, SparseScorer scorer, std::size_t k) const;

  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

  bool operator==(const InvertedIndex& other) const;

 private:
  void finalize();

  CorpusLevel level_ = CorpusLevel::L1;
  SparseConfig config_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::unordered_map<std::string, std::vector<Posting>> vocabulary_;
  std::vector<double> tfidf_norms_;
};

inline RankedList sparse_search(const InvertedIndex& index, std::string_view query,
                                SparseScorer scorer, std::size_t k) {
  return index.search(query, scorer, k);
}

}  // namespace citepred
