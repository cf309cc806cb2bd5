#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/dense.hpp"
#include "citepred/embedding.hpp"
#include "citepred/ranked_list.hpp"
#include "citepred/sparse.hpp"

namespace citepred {

/// Retrieval query: the query paper's id and its title+abstract text.
struct Query {
  std::string id;
  std::string text;
};

/// Per-level search handle shared by the fusion engine and the harness.
/// Implementations must allow concurrent `search` calls on different levels.
class LevelRetriever {
 public:
  virtual ~LevelRetriever() = default;
  virtual bool has_level(CorpusLevel level) const = 0;
  virtual RankedList search(const Query& query, CorpusLevel level, std::size_t k) const = 0;
  virtual std::string name() const = 0;
};

class SparseRetriever : public LevelRetriever {
 public:
  SparseRetriever(std::map<CorpusLevel, std::shared_ptr<const InvertedIndex>> indexes,
                  SparseScorer scorer);

  bool has_level(CorpusLevel level) const override { return indexes_.count(level) != 0; }
  RankedList search(const Query& query, CorpusLevel level, std::size_t k) const override;
  std::string name() const override { return std::string(to_string(scorer_)); }

 private:
  std::map<CorpusLevel, std::shared_ptr<const InvertedIndex>> indexes_;
  SparseScorer scorer_;
};

/// Dense retrieval; the query text is embedded once per query id and cached.
class DenseRetriever : public LevelRetriever {
 public:
  DenseRetriever(std::map<CorpusLevel, std::shared_ptr<const DenseIndex>> indexes,
                 std::shared_ptr<EmbeddingProvider> query_encoder,
                 SearchMode mode = SearchMode::exact);

  bool has_level(CorpusLevel level) const override { return indexes_.count(level) != 0; }
  RankedList search(const Query& query, CorpusLevel level, std::size_t k) const override;
  std::string name() const override { return "dense"; }

 private:
  DenseVector<float> encode(const Query& query) const;

  std::map<CorpusLevel, std::shared_ptr<const DenseIndex>> indexes_;
  std::shared_ptr<EmbeddingProvider> encoder_;
  SearchMode mode_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, DenseVector<float>> cache_;
};

/// Returns each query's relevant ids first (in the given order), optionally
/// at a different rank per level. Upper-bound baseline for the harness.
class OracleRetriever : public LevelRetriever {
 public:
  explicit OracleRetriever(std::unordered_map<std::string, std::vector<std::string>> relevant);

  bool has_level(CorpusLevel) const override { return true; }
  RankedList search(const Query& query, CorpusLevel level, std::size_t k) const override;
  std::string name() const override { return "oracle"; }

 private:
  std::unordered_map<std::string, std::vector<std::string>> relevant_;
};

/// Uniformly random ranking of the document ids, seeded per (query, level).
class RandomRetriever : public LevelRetriever {
 public:
  RandomRetriever(std::vector<std::string> doc_ids, std::uint64_t seed);

  bool has_level(CorpusLevel) const override { return true; }
  RankedList search(const Query& query, CorpusLevel level, std::size_t k) const override;
  std::string name() const override { return "random"; }

 private:
  std::vector<std::string> doc_ids_;
  std::uint64_t seed_;
};

/// score(d) = Σ 1/(c + rank_d) over the lists containing d, ranks 1-based.
/// The result is independent of the order of `lists`. Throws
/// ValidationError when c ≤ 0 or k = 0.
RankedList rrf_fuse(const std::vector<RankedList>& lists, double c, std::size_t k);

struct MultiLevelResult {
  std::map<CorpusLevel, RankedList> per_level;
  RankedList fused;
};

struct FusionOptions {
  double c = 60.0;
  std::vector<CorpusLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  bool parallel = true;
};

/// Searches every level for its top-k and fuses the lists (fused length at
/// most levels·k). Throws ValidationError naming any level the retriever
/// lacks.
MultiLevelResult retrieve_multilevel(const Query& query, const LevelRetriever& retriever,
                                     std::size_t k, const FusionOptions& options = {});

RankedList single_level_search(const Query& query, const LevelRetriever& retriever,
                               CorpusLevel level, std::size_t k);

}  // namespace citepred
