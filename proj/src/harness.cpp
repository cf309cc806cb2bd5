#include "citepred/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "citepred/embedding.hpp"
#include "citepred/error.hpp"
#include "citepred/text.hpp"

namespace citepred {

std::string RetrievalSettings::label() const {
  if (!fusion || levels.size() == 1) return std::string(to_string(levels.front()));
  std::string out = "fused(";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out += (i ? "+" : "") + std::string(to_string(levels[i]));
  }
  return out + ")";
}

RankedList retrieve(const Query& query, const LevelRetriever& retriever,
                    const RetrievalSettings& settings) {
  if (settings.levels.empty()) throw ValidationError("at least one level is required");
  if (!settings.fusion || settings.levels.size() == 1) {
    return single_level_search(query, retriever, settings.levels.front(), settings.k);
  }
  FusionOptions options;
  options.c = settings.c;
  options.levels = settings.levels;
  options.parallel = settings.parallel;
  return retrieve_multilevel(query, retriever, settings.k, options).fused;
}

std::vector<std::string> ranked_titles(const RankedList& list, const Corpus& corpus) {
  std::vector<std::string> out;
  out.reserve(list.size());
  for (const auto& e : list.entries) {
    const PaperRecord* r = corpus.find(e.id);
    out.push_back(r ? normalize_title(r->title) : std::string());
  }
  return out;
}

namespace {

std::string metric_name(const char* family, std::size_t k) {
  return std::string(family) + "@" + std::to_string(k);
}

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string failure_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  return "error";
}

struct Generated {
  std::optional<GenerationOutput> output;
  std::optional<FailureRecord> failure;
};

template <typename Instance>
Generated generate_one(const Instance& inst, const std::set<std::string>& truth,
                       const TaskContext& ctx) {
  Generated g;
  try {
    const Query query{inst.query_id, query_text(inst.title, inst.abstract)};
    RankedList context = retrieve(query, *ctx.retriever, ctx.retrieval);
    if (context.entries.size() > static_cast<std::size_t>(std::max(ctx.R, 0))) {
      context.entries.resize(static_cast<std::size_t>(ctx.R));
    }
    const RankedList noisy = inject_noise(context, ctx.noise, *ctx.corpus, truth,
                                          ctx.seed ^ stable_hash(inst.query_id));
    const PromptEnvelope envelope = build_prompt(inst, noisy, *ctx.corpus, ctx.R, ctx.params);
    const int task = std::is_same_v<Instance, Task1Instance> ? 1 : 2;
    g.output = parse_prediction(call_generator(envelope, *ctx.endpoint), task);
  } catch (const std::exception& e) {
    g.failure = FailureRecord{inst.query_id, failure_kind(e), e.what()};
  }
  return g;
}

void check_context(const TaskContext& ctx) {
  if (!ctx.corpus || !ctx.retriever || !ctx.endpoint) {
    throw ValidationError("task context needs a corpus, a retriever and an endpoint");
  }
  if (ctx.R <= 0) throw ValidationError("R must be positive");
}

std::vector<std::string> snap(const std::vector<std::string>& predicted,
                              const std::vector<std::string>& truth, std::size_t distance) {
  if (distance == 0) return predicted;
  return canonicalize(predicted, truth, distance);
}

/// Pooled CDE and hallucination bookkeeping shared by both tasks.
struct DiversityTally {
  double cde_sum = 0.0;
  std::size_t cde_instances = 0;
  std::size_t predictions = 0;
  std::size_t unverified = 0;

  void add(const std::vector<std::string>& predicted, const CategoryLookup& lookup,
           const VerificationSet& verification) {
    try {
      cde_sum += cde(predicted, lookup);
      ++cde_instances;
    } catch (const UndefinedMetricError&) {
    }
    for (const auto& p : predicted) {
      ++predictions;
      if (!verification.contains(p)) ++unverified;
    }
  }

  void write(MetricReport& report) const {
    if (cde_instances) report.values["CDE"] = cde_sum / static_cast<double>(cde_instances);
    if (predictions) {
      report.values["Halluc"] =
          100.0 * static_cast<double>(unverified) / static_cast<double>(predictions);
    }
  }
};

template <typename Instance>
std::vector<std::string> truth_titles(const Instance& inst) {
  if constexpr (std::is_same_v<Instance, Task1Instance>) {
    return inst.ground_truth_refs;
  } else {
    std::vector<std::string> out;
    for (const auto& s : inst.sections) out.insert(out.end(), s.targets.begin(), s.targets.end());
    return out;
  }
}

template <typename Instance>
std::vector<Generated> generate_all(const std::vector<Instance>& instances,
                                    const TaskContext& ctx) {
  std::vector<Generated> results(instances.size());
  parallel_for(instances.size(), ctx.workers, [&](std::size_t i) {
    const auto titles = truth_titles(instances[i]);
    std::set<std::string> truth;
    for (const auto& t : titles) truth.insert(normalize_title(t));
    results[i] = generate_one(instances[i], truth, ctx);
  });
  return results;
}

template <typename Instance>
VerificationSet verification_for(const std::vector<Instance>& instances, const TaskContext& ctx) {
  if (ctx.verification) return *ctx.verification;
  std::vector<std::string> truth;
  for (const auto& inst : instances) {
    const auto t = truth_titles(inst);
    truth.insert(truth.end(), t.begin(), t.end());
  }
  return VerificationSet::from(*ctx.corpus, truth);
}

}  // namespace

RunOutcome eval_retriever(const std::vector<Task1Instance>& instances, const Corpus& corpus,
                          const LevelRetriever& retriever, const RetrievalSettings& settings,
                          const std::vector<std::size_t>& ks) {
  if (instances.empty()) throw UndefinedMetricError("no instances to evaluate");
  std::size_t max_k = 0;
  for (auto k : ks) {
    if (k == 0) throw ValidationError("k must be at least 1");
    max_k = std::max(max_k, k);
  }
  RetrievalSettings run = settings;
  run.k = std::max(run.k, max_k);

  RunOutcome outcome;
  outcome.report.task = 1;
  outcome.report.label = retriever.name() + " " + settings.label();
  std::map<std::string, double> sums;
  for (const auto& inst : instances) {
    const Query query{inst.query_id, query_text(inst.title, inst.abstract)};
    const auto titles = ranked_titles(retrieve(query, retriever, run), corpus);
    InstanceScores scores{inst.query_id, {}};
    for (auto k : ks) {
      scores.values[metric_name("Recall", k)] = recall_at_k(titles, inst.ground_truth_refs, k);
      scores.values[metric_name("MRR", k)] = reciprocal_rank_at_k(titles, inst.ground_truth_refs, k);
    }
    for (const auto& [name, v] : scores.values) sums[name] += v;
    outcome.per_instance.push_back(std::move(scores));
  }
  for (const auto& [name, v] : sums) {
    outcome.report.values[name] = v / static_cast<double>(instances.size());
  }
  outcome.report.instance_count = instances.size();
  return outcome;
}

RunOutcome run_task(const std::vector<Task1Instance>& instances, const TaskContext& ctx) {
  check_context(ctx);
  const auto generated = generate_all(instances, ctx);
  const VerificationSet verification = verification_for(instances, ctx);
  const CategoryLookup lookup = corpus_category_lookup(*ctx.corpus);

  RunOutcome outcome;
  MetricReport& report = outcome.report;
  report.task = 1;
  report.label = ctx.label;
  std::map<std::string, double> sums;
  DiversityTally diversity;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& g = generated[i];
    std::vector<std::string> predicted;
    if (g.output) {
      predicted = snap(g.output->titles, inst.ground_truth_refs, ctx.grid.fuzzy_distance);
      ++report.instance_count;
    } else {
      ++report.failure_count;
      report.failures.push_back(*g.failure);
    }
    InstanceScores scores{inst.query_id, {}};
    if (!inst.ground_truth_refs.empty()) {
      for (auto k : ctx.grid.recall_k) {
        scores.values[metric_name("Recall", k)] = recall_at_k(predicted, inst.ground_truth_refs, k);
      }
      for (auto k : ctx.grid.ndcg_k) {
        scores.values[metric_name("NDCG", k)] = ndcg_at_k(predicted, inst.ground_truth_refs, k);
      }
    }
    for (auto k : ctx.grid.hit_k) {
      scores.values[metric_name("Hit", k)] =
          hit_at_k(predicted, inst.ground_truth_refs, k, ctx.grid.hit_variant);
    }
    for (const auto& [name, v] : scores.values) sums[name] += v;
    if (g.output) diversity.add(predicted, lookup, verification);
    outcome.per_instance.push_back(std::move(scores));
  }
  if (!instances.empty()) {
    for (const auto& [name, v] : sums) {
      report.values[name] = v / static_cast<double>(instances.size());
    }
  }
  diversity.write(report);
  return outcome;
}

RunOutcome run_task(const std::vector<Task2Instance>& instances, const TaskContext& ctx) {
  check_context(ctx);
  const auto generated = generate_all(instances, ctx);
  const VerificationSet verification = verification_for(instances, ctx);
  const CategoryLookup lookup = corpus_category_lookup(*ctx.corpus);

  RunOutcome outcome;
  MetricReport& report = outcome.report;
  report.task = 2;
  report.label = ctx.label;
  std::map<std::size_t, double> credit;  // k → summed placeholder credit
  std::size_t placeholders = 0;
  DiversityTally diversity;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto& g = generated[i];
    if (g.output) {
      ++report.instance_count;
    } else {
      ++report.failure_count;
      report.failures.push_back(*g.failure);
    }

    std::map<std::pair<std::size_t, std::size_t>, const std::vector<std::string>*> by_slot;
    if (g.output) {
      for (const auto& p : g.output->placeholders) by_slot[{p.section, p.placeholder}] = &p.titles;
    }
    const auto truth = truth_titles(inst);
    std::map<std::size_t, double> local;
    std::vector<std::string> distinct;
    std::set<std::string> seen;
    std::size_t count = 0;
    for (std::size_t s = 0; s < inst.sections.size(); ++s) {
      const auto& targets = inst.sections[s].targets;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        ++count;
        const auto it = by_slot.find({s + 1, t + 1});
        if (it == by_slot.end()) continue;
        const auto candidates = snap(*it->second, truth, ctx.grid.fuzzy_distance);
        for (auto k : ctx.grid.paca_k) local[k] += placeholder_credit(candidates, targets[t], k);
        for (const auto& c : candidates) {
          if (seen.insert(normalize_title(c)).second) distinct.push_back(c);
        }
      }
    }
    placeholders += count;
    InstanceScores scores{inst.query_id, {}};
    for (auto k : ctx.grid.paca_k) {
      credit[k] += local[k];
      scores.values[metric_name("PACA", k)] = count ? local[k] / static_cast<double>(count) : 0.0;
    }
    if (g.output) diversity.add(distinct, lookup, verification);
    outcome.per_instance.push_back(std::move(scores));
  }
  if (placeholders > 0) {
    for (auto k : ctx.grid.paca_k) {
      report.values[metric_name("PACA", k)] = credit[k] / static_cast<double>(placeholders);
    }
  }
  report.notes["placeholders"] = std::to_string(placeholders);
  diversity.write(report);
  return outcome;
}

Report ablate_levels(const std::vector<Task1Instance>& instances, const Corpus& corpus,
                     const LevelRetriever& retriever, const RetrievalSettings& settings,
                     const std::vector<std::size_t>& ks) {
  Report report;
  report.suite = "level ablation";
  for (CorpusLevel level : settings.levels) {
    RetrievalSettings single = settings;
    single.levels = {level};
    single.fusion = false;
    auto row = eval_retriever(instances, corpus, retriever, single, ks).report;
    row.label = single.label();
    report.rows.push_back(std::move(row));
  }
  RetrievalSettings fused = settings;
  fused.fusion = true;
  auto row = eval_retriever(instances, corpus, retriever, fused, ks).report;
  row.label = fused.label();
  report.rows.push_back(row);

  for (const auto& [name, value] : row.values) {
    double best = 0.0;
    std::string best_label;
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
      const double v = report.rows[i].values.at(name);
      if (best_label.empty() || v > best) {
        best = v;
        best_label = report.rows[i].label;
      }
    }
    std::ostringstream note;
    if (best > 0.0) {
      note.setf(std::ios::fixed);
      note.precision(2);
      note << (value - best) / best * 100.0 << "% vs " << best_label;
    } else {
      note << "n/a (best single level scores 0)";
    }
    report.notes["fused delta " + name] = note.str();
  }
  return report;
}

std::map<std::string, std::string> best_rows(const Report& report) {
  std::map<std::string, std::string> best;
  std::map<std::string, double> value;
  for (const auto& row : report.rows) {
    for (const auto& [name, v] : row.values) {
      const bool minimize = name == "Halluc";
      const auto it = value.find(name);
      if (it == value.end() || (minimize ? v < it->second : v > it->second)) {
        value[name] = v;
        best[name] = row.label;
      }
    }
  }
  return best;
}

template <typename Instance>
Report depth_sweep(const std::vector<Instance>& instances, TaskContext context,
                   const std::vector<int>& depths) {
  Report report;
  report.suite = "retrieval depth sweep";
  for (int R : depths) {
    context.R = R;
    context.label = "R=" + std::to_string(R);
    report.rows.push_back(run_task(instances, context).report);
  }
  for (const auto& [metric, label] : best_rows(report)) report.notes["best " + metric] = label;
  report.notes["default depth"] = "R=10";
  return report;
}

template <typename Instance>
Report noise_sweep(const std::vector<Instance>& instances, TaskContext context,
                   const std::vector<double>& ratios) {
  Report report;
  report.suite = "noise robustness sweep";
  for (double ratio : ratios) {
    context.noise = ratio;
    std::ostringstream label;
    label << "noise=" << ratio;
    context.label = label.str();
    report.rows.push_back(run_task(instances, context).report);
  }
  return report;
}

template Report depth_sweep(const std::vector<Task1Instance>&, TaskContext,
                            const std::vector<int>&);
template Report depth_sweep(const std::vector<Task2Instance>&, TaskContext,
                            const std::vector<int>&);
template Report noise_sweep(const std::vector<Task1Instance>&, TaskContext,
                            const std::vector<double>&);
template Report noise_sweep(const std::vector<Task2Instance>&, TaskContext,
                            const std::vector<double>&);

BootstrapResult paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t iterations, std::uint64_t seed) {
  if (a.size() != b.size()) throw ValidationError("paired bootstrap needs equal-length samples");
  if (a.empty()) throw UndefinedMetricError("paired bootstrap needs at least one pair");
  if (iterations == 0) throw ValidationError("iterations must be positive");
  const std::size_t n = a.size();
  std::vector<double> diff(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    mean += diff[i];
  }
  mean /= static_cast<double>(n);

  // Resample the centred differences: how often is a shift at least as large
  // as the observed one produced under the null of no difference?
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t extreme = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += diff[pick(rng)] - mean;
    m /= static_cast<double>(n);
    if (std::abs(m) >= std::abs(mean) - 1e-15) ++extreme;
  }
  return {mean, static_cast<double>(extreme + 1) / static_cast<double>(iterations + 1)};
}

}  // namespace citepred
