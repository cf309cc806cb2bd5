#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "citepred/text.hpp"

namespace citepred {

class Corpus;

// Every function below compares titles by normalize_title(). A prediction
// that repeats an earlier one (after normalization) never earns credit twice.

/// |top-k ∩ GT| / |GT|. Throws UndefinedMetricError for empty ground truth and
/// ValidationError for k = 0.
double recall_at_k(const std::vector<std::string>& predicted,
                   const std::vector<std::string>& ground_truth, std::size_t k);

/// 1 / rank of the first relevant prediction within the top k, else 0.
double reciprocal_rank_at_k(const std::vector<std::string>& predicted,
                            const std::vector<std::string>& relevant, std::size_t k);

/// Mean reciprocal rank over queries. Throws UndefinedMetricError for zero
/// queries.
double mrr_at_k(const std::vector<std::vector<std::string>>& predicted,
                const std::vector<std::vector<std::string>>& relevant, std::size_t k);

/// Binary-relevance NDCG: Σ rel_i / log2(i+1) over the top k, divided by
/// Σ_{i ≤ min(k, |GT|)} 1 / log2(i+1).
double ndcg_at_k(const std::vector<std::string>& predicted,
                 const std::vector<std::string>& ground_truth, std::size_t k);

enum class HitVariant { normalized_count, any_hit };

std::string_view to_string(HitVariant variant);
HitVariant parse_hit_variant(std::string_view text);

/// Per query: |top-k ∩ GT| / k (normalized_count) or [top-k ∩ GT ≠ ∅]
/// (any_hit).
double hit_at_k(const std::vector<std::string>& predicted,
                const std::vector<std::string>& ground_truth, std::size_t k,
                HitVariant variant = HitVariant::normalized_count);

/// Mean of the per-query values; 0 for zero queries.
double hit_at_k(const std::vector<std::vector<std::string>>& predicted,
                const std::vector<std::vector<std::string>>& ground_truth, std::size_t k,
                HitVariant variant = HitVariant::normalized_count);

/// Credit 1 − (rank − 1)/k when the placeholder's ground truth appears at
/// rank ≤ k among its candidates, else 0.
double placeholder_credit(const std::vector<std::string>& candidates,
                          const std::string& ground_truth, std::size_t k);

/// Mean placeholder credit. Throws UndefinedMetricError for zero
/// placeholders.
double paca_at_k(const std::vector<std::vector<std::string>>& candidates,
                 const std::vector<std::string>& ground_truth, std::size_t k);

/// Category of a normalized title, if known.
using CategoryLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Shannon entropy (bits) of the category distribution of the predictions
/// whose category is known. Throws UndefinedMetricError when none is.
double cde(const std::vector<std::string>& predicted, const CategoryLookup& category_of);

/// Entropy of explicit category counts; zero counts are ignored.
double entropy_bits(const std::vector<std::size_t>& counts);

/// Normalized titles of papers known to exist.
class VerificationSet {
 public:
  VerificationSet() = default;

  /// Corpus titles plus the given ground-truth titles.
  static VerificationSet from(const Corpus& corpus,
                              const std::vector<std::string>& ground_truth_titles = {});

  void insert(std::string_view title);
  bool contains(std::string_view title) const;
  std::size_t size() const noexcept { return titles_.size(); }

 private:
  std::unordered_set<std::string> titles_;
};

/// |P \ V| / |P| × 100 over the (possibly repeated) predictions. Throws
/// UndefinedMetricError for empty predictions.
double hallucination_rate(const std::vector<std::string>& predicted,
                          const VerificationSet& verification);

/// Snaps every prediction to the closest reference title when their
/// normalized forms are within `max_distance` edits (ties go to the earlier
/// reference). Returns normalized titles. `max_distance` 0 only normalizes.
std::vector<std::string> canonicalize(const std::vector<std::string>& predicted,
                                      const std::vector<std::string>& reference,
                                      std::size_t max_distance);

/// Lookup over the corpus records' titles.
CategoryLookup corpus_category_lookup(const Corpus& corpus);

}  // namespace citepred
