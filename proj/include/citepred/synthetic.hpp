#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "citepred/corpus.hpp"

namespace citepred {

/// Planted-citation fixture: every query paper cites `refs_per_query`
/// corpus papers that share its private signature words. The signature words
/// are spread over the cited papers' abstract, introduction and later
/// sections so that each corpus level sees a different part of the signal.
struct PlantedOptions {
  std::size_t docs = 500;
  std::size_t queries = 50;
  std::size_t refs_per_query = 5;
  std::size_t signature_words = 8;
  std::size_t vocabulary = 3000;
  /// Probability that an uncited paper borrows two signature words from a
  /// random query.
  double confuser_rate = 0.3;
  std::uint64_t seed = 7;
};

struct PlantedCorpus {
  std::vector<RawPaper> papers;  ///< corpus papers first, then query papers
  std::vector<std::string> query_ids;
  std::unordered_map<std::string, std::vector<std::string>> cited_ids;  ///< query → cited ids
};

PlantedCorpus make_planted_corpus(const PlantedOptions& options = {});

/// Ingests every paper of the fixture into one corpus.
Corpus ingest_all(const std::vector<RawPaper>& papers);

}  // namespace citepred
