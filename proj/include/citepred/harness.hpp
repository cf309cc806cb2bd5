#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/dataset.hpp"
#include "citepred/fusion.hpp"
#include "citepred/generation.hpp"
#include "citepred/metrics.hpp"
#include "citepred/report.hpp"

namespace citepred {

/// How a query is turned into a ranked list: fused over `levels`, or a
/// single level when `fusion` is off (then `levels.front()` is used).
struct RetrievalSettings {
  std::vector<CorpusLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  bool fusion = true;
  std::size_t k = 50;
  double c = 60.0;
  bool parallel = true;

  std::string label() const;
};

RankedList retrieve(const Query& query, const LevelRetriever& retriever,
                    const RetrievalSettings& settings);

/// Normalized titles of the ranked ids; ids missing from the corpus map to
/// an empty string, which never matches.
std::vector<std::string> ranked_titles(const RankedList& list, const Corpus& corpus);

/// Per-instance metric values, kept for significance testing.
struct InstanceScores {
  std::string instance_id;
  std::map<std::string, double> values;
};

struct RunOutcome {
  MetricReport report;
  std::vector<InstanceScores> per_instance;
};

/// Recall@k and MRR@k of the retriever against Task 1 ground truth.
RunOutcome eval_retriever(const std::vector<Task1Instance>& instances, const Corpus& corpus,
                          const LevelRetriever& retriever, const RetrievalSettings& settings,
                          const std::vector<std::size_t>& ks = {20, 50});

struct MetricGrid {
  std::vector<std::size_t> recall_k = {20, 40};
  std::vector<std::size_t> ndcg_k = {20, 40};
  std::vector<std::size_t> hit_k = {20, 40};
  std::vector<std::size_t> paca_k = {10, 20, 40};
  HitVariant hit_variant = HitVariant::normalized_count;
  std::size_t fuzzy_distance = 0;
};

/// Everything run_task needs besides the instances. References must outlive
/// the call.
struct TaskContext {
  const Corpus* corpus = nullptr;  ///< retrieval corpus (query papers removed)
  const LevelRetriever* retriever = nullptr;
  ChatEndpoint* endpoint = nullptr;
  RetrievalSettings retrieval;
  GenerationParams params;
  int R = 10;
  double noise = 0.0;
  std::uint64_t seed = 13;
  std::size_t workers = 4;
  MetricGrid grid;
  /// Known-existing titles; built from the corpus and ground truth if unset.
  std::optional<VerificationSet> verification;
  std::string label;
};

/// retrieve → noise → prompt → generate → parse → score for every instance.
/// A failing instance is scored as zero predictions and listed in the
/// report; it never aborts the run.
RunOutcome run_task(const std::vector<Task1Instance>& instances, const TaskContext& context);
RunOutcome run_task(const std::vector<Task2Instance>& instances, const TaskContext& context);

/// MRR@k (and Recall@k) per single level and fused, with relative deltas of
/// fused over the best single level in the notes.
Report ablate_levels(const std::vector<Task1Instance>& instances, const Corpus& corpus,
                     const LevelRetriever& retriever, const RetrievalSettings& settings,
                     const std::vector<std::size_t>& ks = {50});

/// One row per R; notes name the best R for every metric.
template <typename Instance>
Report depth_sweep(const std::vector<Instance>& instances, TaskContext context,
                   const std::vector<int>& depths);

/// One row per noise ratio.
template <typename Instance>
Report noise_sweep(const std::vector<Instance>& instances, TaskContext context,
                   const std::vector<double>& ratios);

/// Best value per metric across rows ("Halluc" is minimized, everything else
/// maximized), as metric → row label.
std::map<std::string, std::string> best_rows(const Report& report);

struct BootstrapResult {
  double mean_difference = 0.0;  ///< mean(a) − mean(b)
  double p_value = 1.0;          ///< two-sided
};

/// Paired bootstrap over instances.
BootstrapResult paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t iterations = 10000, std::uint64_t seed = 1);

extern template Report depth_sweep(const std::vector<Task1Instance>&, TaskContext,
                                   const std::vector<int>&);
extern template Report depth_sweep(const std::vector<Task2Instance>&, TaskContext,
                                   const std::vector<int>&);
extern template Report noise_sweep(const std::vector<Task1Instance>&, TaskContext,
                                   const std::vector<double>&);
extern template Report noise_sweep(const std::vector<Task2Instance>&, TaskContext,
                                   const std::vector<double>&);

}  // namespace citepred
