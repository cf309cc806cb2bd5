#include "citepred/fusion.hpp"

#include <algorithm>
#include <future>
#include <random>

#include "citepred/error.hpp"

namespace citepred {

SparseRetriever::SparseRetriever(
    std::map<CorpusLevel, std::shared_ptr<const InvertedIndex>> indexes, SparseScorer scorer)
    : indexes_(std::move(indexes)), scorer_(scorer) {}

RankedList SparseRetriever::search(const Query& query, CorpusLevel level, std::size_t k) const {
  const auto it = indexes_.find(level);
  if (it == indexes_.end() || !it->second) {
    throw ValidationError("no sparse index for level " + std::string(to_string(level)));
  }
  return it->second->search(query.text, scorer_, k);
}

DenseRetriever::DenseRetriever(std::map<CorpusLevel, std::shared_ptr<const DenseIndex>> indexes,
                               std::shared_ptr<EmbeddingProvider> query_encoder, SearchMode mode)
    : indexes_(std::move(indexes)), encoder_(std::move(query_encoder)), mode_(mode) {
  if (!encoder_) throw ValidationError("dense retriever needs a query encoder");
}

DenseVector<float> DenseRetriever::encode(const Query& query) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto it = cache_.find(query.id);
  if (it != cache_.end()) return it->second;
  auto vectors = encoder_->embed({{query.id, query.text}});
  return cache_.emplace(query.id, std::move(vectors.at(0).values)).first->second;
}

RankedList DenseRetriever::search(const Query& query, CorpusLevel level, std::size_t k) const {
  const auto it = indexes_.find(level);
  if (it == indexes_.end() || !it->second) {
    throw ValidationError("no dense index for level " + std::string(to_string(level)));
  }
  return it->second->search(encode(query), k, mode_);
}

OracleRetriever::OracleRetriever(
    std::unordered_map<std::string, std::vector<std::string>> relevant)
    : relevant_(std::move(relevant)) {}

RankedList OracleRetriever::search(const Query& query, CorpusLevel, std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  RankedList out;
  const auto it = relevant_.find(query.id);
  if (it == relevant_.end()) return out;
  const std::size_t n = std::min(k, it->second.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.entries.push_back({it->second[i], 1.0 / static_cast<double>(i + 1)});
  }
  return out;
}

RandomRetriever::RandomRetriever(std::vector<std::string> doc_ids, std::uint64_t seed)
    : doc_ids_(std::move(doc_ids)), seed_(seed) {
  std::sort(doc_ids_.begin(), doc_ids_.end());
  doc_ids_.erase(std::unique(doc_ids_.begin(), doc_ids_.end()), doc_ids_.end());
}

RankedList RandomRetriever::search(const Query& query, CorpusLevel level, std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(std::hash<std::string>{}(query.id)),
                    static_cast<std::uint32_t>(level)};
  std::mt19937_64 rng(seq);
  std::vector<std::string> ids = doc_ids_;
  const std::size_t n = std::min(k, ids.size());
  // Partial Fisher-Yates: only the first n positions are needed.
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  RankedList out;
  for (std::size_t i = 0; i < n; ++i) {
    out.entries.push_back({ids[i], static_cast<double>(n - i)});
  }
  return out;
}

RankedList rrf_fuse(const std::vector<RankedList>& lists, double c, std::size_t k) {
  if (!(c > 0.0)) throw ValidationError("rank constant must be positive");
  if (k == 0) throw ValidationError("k must be at least 1");
  std::unordered_map<std::string, std::vector<std::size_t>> ranks;
  for (const auto& list : lists) {
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      ranks[list.entries[r].id].push_back(r + 1);
    }
  }
  std::vector<ScoredDoc> fused;
  fused.reserve(ranks.size());
  for (auto& [id, rs] : ranks) {
    // Summing in rank order makes the score bit-identical for any list order.
    std::sort(rs.begin(), rs.end());
    double score = 0.0;
    for (std::size_t r : rs) score += 1.0 / (c + static_cast<double>(r));
    fused.push_back({id, score});
  }
  return top_k(std::move(fused), k);
}

MultiLevelResult retrieve_multilevel(const Query& query, const LevelRetriever& retriever,
                                     std::size_t k, const FusionOptions& options) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (options.levels.empty()) throw ValidationError("at least one level is required");
  for (CorpusLevel level : options.levels) {
    if (!retriever.has_level(level)) {
      throw ValidationError("retriever '" + retriever.name() + "' has no index for level " +
                            std::string(to_string(level)));
    }
  }

  MultiLevelResult result;
  if (options.parallel && options.levels.size() > 1) {
    std::vector<std::future<RankedList>> pending;
    for (CorpusLevel level : options.levels) {
      pending.push_back(std::async(std::launch::async, [&, level] {
        return retriever.search(query, level, k);
      }));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      result.per_level[options.levels[i]] = pending[i].get();
    }
  } else {
    for (CorpusLevel level : options.levels) {
      result.per_level[level] = retriever.search(query, level, k);
    }
  }

  std::vector<RankedList> lists;
  for (const auto& [level, list] : result.per_level) lists.push_back(list);
  result.fused = rrf_fuse(lists, options.c, k * lists.size());
  return result;
}

RankedList single_level_search(const Query& query, const LevelRetriever& retriever,
                               CorpusLevel level, std::size_t k) {
  if (!retriever.has_level(level)) {
    throw ValidationError("retriever '" + retriever.name() + "' has no index for level " +
                          std::string(to_string(level)));
  }
  return retriever.search(query, level, k);
}

}  // namespace citepred
