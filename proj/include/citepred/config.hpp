#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/dense.hpp"
#include "citepred/metrics.hpp"

namespace citepred {

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped. Throws LoadError with the line number for a line without `=` or
/// a repeated key.
std::map<std::string, std::string> parse_key_values(const std::string& text);

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path task1;
  std::filesystem::path task2;
  std::filesystem::path index_dir;  ///< holds sparse_L*.json / dense_L*.bin
  std::filesystem::path vectors;    ///< precomputed query vectors for dense runs
  std::filesystem::path output_dir = "out";
  int task = 1;

  std::string scorer = "bm25";  ///< bm25 | tfidf | dense | hashing | oracle | random
  std::vector<CorpusLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  bool fusion = true;
  std::size_t k = 50;
  double rrf_c = 60.0;
  SearchMode dense_mode = SearchMode::exact;
  std::size_t hashing_dim = 256;

  std::string generator = "mock-copy";  ///< mock-copy | mock-ignore | mock-degrade | http
  std::string endpoint_url;
  std::string endpoint_model;
  std::string api_key_env = "CITEPRED_API_KEY";
  double temperature = 0.1;
  double presence_penalty = 1.0;
  int max_tokens = 2048;
  std::size_t mock_threshold = 10;  ///< optimum context size of mock-degrade

  int R = 10;
  double noise = 0.0;
  std::uint64_t seed = 13;
  std::size_t workers = 4;

  std::vector<std::size_t> recall_k = {20, 40};
  std::vector<std::size_t> ndcg_k = {20, 40};
  std::vector<std::size_t> hit_k = {20, 40};
  std::vector<std::size_t> paca_k = {10, 20, 40};
  std::vector<std::size_t> retriever_k = {20, 50};
  HitVariant hit_variant = HitVariant::normalized_count;
  std::size_t fuzzy_distance = 0;

  std::vector<int> depth_values = {5, 10, 15, 20};
  std::vector<double> noise_values = {0.0, 0.2, 0.4, 0.8, 1.0};

  /// Throws ValidationError when a referenced path is missing or a knob is out
  /// of range.
  void validate() const;
};

/// Applies known keys onto defaults. Unknown keys throw ValidationError.
ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& values,
                                        const ExperimentConfig& defaults = {});
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const ExperimentConfig& config);

}  // namespace citepred
