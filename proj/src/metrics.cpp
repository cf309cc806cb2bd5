#include "citepred/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "citepred/corpus.hpp"
#include "citepred/error.hpp"

namespace citepred {

namespace {

void require_k(std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
}

std::unordered_set<std::string> normalized_set(const std::vector<std::string>& titles) {
  std::unordered_set<std::string> out;
  for (const auto& t : titles) {
    std::string key = normalize_title(t);
    if (!key.empty()) out.insert(std::move(key));
  }
  return out;
}

/// Normalized predictions of the top k, with repeats blanked out so they
/// never match.
std::vector<std::string> first_k_distinct(const std::vector<std::string>& predicted,
                                          std::size_t k) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  const std::size_t n = std::min(k, predicted.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string key = normalize_title(predicted[i]);
    if (!seen.insert(key).second) key.clear();
    out.push_back(std::move(key));
  }
  return out;
}

std::size_t hits_in_top_k(const std::vector<std::string>& predicted,
                          const std::unordered_set<std::string>& truth, std::size_t k) {
  std::size_t hits = 0;
  for (const auto& key : first_k_distinct(predicted, k)) {
    if (!key.empty() && truth.count(key)) ++hits;
  }
  return hits;
}

}  // namespace

double recall_at_k(const std::vector<std::string>& predicted,
                   const std::vector<std::string>& ground_truth, std::size_t k) {
  require_k(k);
  const auto truth = normalized_set(ground_truth);
  if (truth.empty()) throw UndefinedMetricError("recall is undefined for empty ground truth");
  return static_cast<double>(hits_in_top_k(predicted, truth, k)) /
         static_cast<double>(truth.size());
}

double reciprocal_rank_at_k(const std::vector<std::string>& predicted,
                            const std::vector<std::string>& relevant, std::size_t k) {
  require_k(k);
  const auto truth = normalized_set(relevant);
  const auto top = first_k_distinct(predicted, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (!top[i].empty() && truth.count(top[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double mrr_at_k(const std::vector<std::vector<std::string>>& predicted,
                const std::vector<std::vector<std::string>>& relevant, std::size_t k) {
  require_k(k);
  if (predicted.empty()) throw UndefinedMetricError("MRR is undefined for zero queries");
  if (predicted.size() != relevant.size()) {
    throw ValidationError("MRR needs one relevant set per query");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < predicted.size(); ++q) {
    sum += reciprocal_rank_at_k(predicted[q], relevant[q], k);
  }
  return sum / static_cast<double>(predicted.size());
}

double ndcg_at_k(const std::vector<std::string>& predicted,
                 const std::vector<std::string>& ground_truth, std::size_t k) {
  require_k(k);
  const auto truth = normalized_set(ground_truth);
  if (truth.empty()) throw UndefinedMetricError("NDCG is undefined for empty ground truth");
  const auto top = first_k_distinct(predicted, k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (!top[i].empty() && truth.count(top[i])) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, truth.size());
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i + 2));
  return dcg / idcg;
}

std::string_view to_string(HitVariant variant) {
  return variant == HitVariant::normalized_count ? "normalized-count" : "any-hit";
}

HitVariant parse_hit_variant(std::string_view text) {
  if (text == "normalized-count" || text == "normalized_count") return HitVariant::normalized_count;
  if (text == "any-hit" || text == "any_hit") return HitVariant::any_hit;
  throw ValidationError("unknown hit variant '" + std::string(text) + "'");
}

double hit_at_k(const std::vector<std::string>& predicted,
                const std::vector<std::string>& ground_truth, std::size_t k, HitVariant variant) {
  require_k(k);
  const std::size_t hits = hits_in_top_k(predicted, normalized_set(ground_truth), k);
  if (variant == HitVariant::any_hit) return hits > 0 ? 1.0 : 0.0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double hit_at_k(const std::vector<std::vector<std::string>>& predicted,
                const std::vector<std::vector<std::string>>& ground_truth, std::size_t k,
                HitVariant variant) {
  require_k(k);
  if (predicted.size() != ground_truth.size()) {
    throw ValidationError("Hit needs one ground-truth set per query");
  }
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t q = 0; q < predicted.size(); ++q) {
    sum += hit_at_k(predicted[q], ground_truth[q], k, variant);
  }
  return sum / static_cast<double>(predicted.size());
}

double placeholder_credit(const std::vector<std::string>& candidates,
                          const std::string& ground_truth, std::size_t k) {
  require_k(k);
  const std::string truth = normalize_title(ground_truth);
  if (truth.empty()) return 0.0;
  const auto top = first_k_distinct(candidates, k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (top[i] == truth) return 1.0 - static_cast<double>(i) / static_cast<double>(k);
  }
  return 0.0;
}

double paca_at_k(const std::vector<std::vector<std::string>>& candidates,
                 const std::vector<std::string>& ground_truth, std::size_t k) {
  require_k(k);
  if (ground_truth.empty()) throw UndefinedMetricError("PACA is undefined for zero placeholders");
  if (candidates.size() != ground_truth.size()) {
    throw ValidationError("PACA needs one candidate list per placeholder");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    sum += placeholder_credit(candidates[i], ground_truth[i], k);
  }
  return sum / static_cast<double>(ground_truth.size());
}

double entropy_bits(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw UndefinedMetricError("entropy of an empty distribution is undefined");
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

double cde(const std::vector<std::string>& predicted, const CategoryLookup& category_of) {
  std::map<std::string, std::size_t> counts;
  for (const auto& title : predicted) {
    if (auto category = category_of(normalize_title(title))) ++counts[*category];
  }
  if (counts.empty()) {
    throw UndefinedMetricError("CDE is undefined when no prediction maps to a category");
  }
  std::vector<std::size_t> values;
  for (const auto& [category, n] : counts) values.push_back(n);
  return entropy_bits(values);
}

VerificationSet VerificationSet::from(const Corpus& corpus,
                                      const std::vector<std::string>& ground_truth_titles) {
  VerificationSet set;
  for (const auto& r : corpus.records()) set.insert(r.title);
  for (const auto& t : ground_truth_titles) set.insert(t);
  return set;
}

void VerificationSet::insert(std::string_view title) {
  std::string key = normalize_title(title);
  if (!key.empty()) titles_.insert(std::move(key));
}

bool VerificationSet::contains(std::string_view title) const {
  return titles_.count(normalize_title(title)) != 0;
}

double hallucination_rate(const std::vector<std::string>& predicted,
                          const VerificationSet& verification) {
  if (predicted.empty()) {
    throw UndefinedMetricError("hallucination rate is undefined for empty predictions");
  }
  std::size_t missing = 0;
  for (const auto& t : predicted) {
    if (!verification.contains(t)) ++missing;
  }
  return 100.0 * static_cast<double>(missing) / static_cast<double>(predicted.size());
}

std::vector<std::string> canonicalize(const std::vector<std::string>& predicted,
                                      const std::vector<std::string>& reference,
                                      std::size_t max_distance) {
  std::vector<std::string> refs;
  for (const auto& r : reference) refs.push_back(normalize_title(r));
  std::vector<std::string> out;
  out.reserve(predicted.size());
  for (const auto& p : predicted) {
    std::string key = normalize_title(p);
    if (max_distance > 0 && std::find(refs.begin(), refs.end(), key) == refs.end()) {
      std::size_t best = max_distance + 1;
      const std::string* match = nullptr;
      for (const auto& r : refs) {
        const std::size_t d = edit_distance(key, r);
        if (d < best) {
          best = d;
          match = &r;
        }
      }
      if (match) key = *match;
    }
    out.push_back(std::move(key));
  }
  return out;
}

CategoryLookup corpus_category_lookup(const Corpus& corpus) {
  auto table = std::make_shared<std::unordered_map<std::string, std::string>>();
  for (const auto& r : corpus.records()) table->emplace(normalize_title(r.title), r.domain_category);
  return [table](const std::string& normalized) -> std::optional<std::string> {
    const auto it = table->find(normalized);
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace citepred
