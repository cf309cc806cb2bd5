// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "citepred/dataset.hpp"
#include "citepred/dense.hpp"
#include "citepred/error.hpp"
#include "citepred/fusion.hpp"
#include "citepred/generation.hpp"
#include "citepred/harness.hpp"
#include "citepred/log.hpp"
#include "citepred/metrics.hpp"
#include "citepred/mock_generator.hpp"
#include "citepred/sparse.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace citepred;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

/// Collects failed checks; the first few are reported.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": " << got << " vs " << want;
    expect(std::abs(got - want) <= tol, s.str());
  }
  bool ok() const { return failures_ == 0; }
  Outcome outcome(const std::string& summary) const {
    if (ok()) return {true, summary};
    return {false, std::to_string(failures_) + " failed checks: " + messages_};
  }

 private:
  std::size_t failures_ = 0;
  std::string messages_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. Metric oracle equivalence

Outcome metric_oracles() {
  const auto start = Clock::now();
  gen::Rng rng(20240601);
  Checker check;
  std::size_t comparisons = 0;
  std::vector<std::vector<std::string>> all_pred, all_gt;
  std::vector<std::vector<std::string>> all_pred_keys, all_gt_keys;
  for (int i = 0; i < 200; ++i) {
    const auto f = gen::random_metric_fixture(rng);
    for (std::size_t k : {1, 3, 5, 10, 20, 40}) {
      const std::string at = "fixture " + std::to_string(i) + " k=" + std::to_string(k);
      if (!f.gt_keys.empty()) {
        check.near(recall_at_k(f.pred_surface, f.gt_surface, k),
                   oracle::recall(f.pred_keys, f.gt_keys, k), 1e-9, "Recall " + at);
        check.near(ndcg_at_k(f.pred_surface, f.gt_surface, k),
                   oracle::ndcg(f.pred_keys, f.gt_keys, k), 1e-9, "NDCG " + at);
        comparisons += 2;
      }
      check.near(reciprocal_rank_at_k(f.pred_surface, f.gt_surface, k),
                 oracle::reciprocal_rank(f.pred_keys, f.gt_keys, k), 1e-9, "RR " + at);
      check.near(hit_at_k(f.pred_surface, f.gt_surface, k, HitVariant::normalized_count),
                 oracle::hit_count(f.pred_keys, f.gt_keys, k), 1e-9, "Hit " + at);
      check.near(hit_at_k(f.pred_surface, f.gt_surface, k, HitVariant::any_hit),
                 oracle::hit_any(f.pred_keys, f.gt_keys, k), 1e-9, "HitAny " + at);
      comparisons += 3;
      if (!f.placeholder_keys.empty()) {
        check.near(paca_at_k(f.cand_surface, f.placeholder_surface, k),
                   oracle::paca(f.cand_keys, f.placeholder_keys, k), 1e-9, "PACA " + at);
        ++comparisons;
      }
    }
    all_pred.push_back(f.pred_surface);
    all_gt.push_back(f.gt_surface);
    all_pred_keys.push_back(f.pred_keys);
    all_gt_keys.push_back(f.gt_keys);
  }
  for (std::size_t k : {10, 20}) {
    double want = 0.0;
    for (std::size_t i = 0; i < all_pred.size(); ++i) {
      want += oracle::reciprocal_rank(all_pred_keys[i], all_gt_keys[i], k);
    }
    check.near(mrr_at_k(all_pred, all_gt, k), want / static_cast<double>(all_pred.size()), 1e-9,
               "MRR@" + std::to_string(k));
    ++comparisons;
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 10.0, "took " + fmt(elapsed, 2) + " s");
  return check.outcome(std::to_string(comparisons) + " comparisons, 200 fixtures, " +
                       fmt(elapsed, 2) + " s");
}

// --------------------------------------------------------------------------
// 2. PACA laws

Outcome paca_laws() {
  gen::Rng rng(77);
  Checker check;
  std::size_t cases = 0;
  while (cases < 1000) {
    const auto f = gen::random_metric_fixture(rng);
    if (f.placeholder_keys.empty()) continue;
    ++cases;
    const double p10 = paca_at_k(f.cand_surface, f.placeholder_surface, 10);
    const double p20 = paca_at_k(f.cand_surface, f.placeholder_surface, 20);
    const double p40 = paca_at_k(f.cand_surface, f.placeholder_surface, 40);
    check.expect(p10 <= p20 && p20 <= p40,
                 "case " + std::to_string(cases) + ": " + fmt(p10) + ", " + fmt(p20) + ", " + fmt(p40));
  }
  const double rank2 = paca_at_k({{"Other Paper", "Target Paper"}}, {"target paper"}, 5);
  check.expect(rank2 == 0.8, "rank 2 at k=5 gave " + fmt(rank2, 17));
  return check.outcome("1000 cases monotone, rank-2@5 = " + fmt(rank2, 1));
}

// --------------------------------------------------------------------------
// 3. CDE bounds

Outcome cde_bounds() {
  Checker check;
  auto lookup_from = [](std::map<std::string, std::string> table) -> CategoryLookup {
    return [table = std::move(table)](const std::string& key) -> std::optional<std::string> {
      const auto it = table.find(key);
      if (it == table.end()) return std::nullopt;
      return it->second;
    };
  };
  for (std::size_t c = 1; c <= 64; ++c) {
    std::map<std::string, std::string> table;
    std::vector<std::string> predicted;
    for (std::size_t i = 0; i < c; ++i) {
      for (int copy = 0; copy < 3; ++copy) {
        const std::string title = "paper " + std::to_string(i) + " " + std::to_string(copy);
        table[title] = "cat" + std::to_string(i);
        predicted.push_back(title);
      }
    }
    check.near(cde(predicted, lookup_from(table)), std::log2(static_cast<double>(c)), 1e-12,
               "uniform C=" + std::to_string(c));
  }
  check.near(cde({"a", "b", "c"}, lookup_from({{"a", "x"}, {"b", "x"}, {"c", "x"}})), 0.0, 0.0,
             "single category");
  gen::Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t categories = rng.between(1, 16);
    std::map<std::string, std::string> table;
    std::vector<std::string> predicted;
    for (std::size_t n = rng.between(1, 50); n > 0; --n) {
      const std::string title = "t" + std::to_string(rng.between(0, 40));
      table.emplace(title, "c" + std::to_string(rng.between(0, categories - 1)));
      predicted.push_back(title);
    }
    const double h = cde(predicted, lookup_from(table));
    check.expect(h >= 0.0 && h <= std::log2(static_cast<double>(categories)) + 1e-12,
                 "out of range: " + fmt(h, 17));
  }
  return check.outcome("uniform C=1..64 within 1e-12, 2000 random cases in [0, log2 C]");
}

// --------------------------------------------------------------------------
// 4. Sparse exactness

Outcome sparse_exactness() {
  Checker check;
  gen::Rng rng(100);
  const auto docs = gen::random_documents(rng, 100, 300, 80);
  const auto index = InvertedIndex::build(docs, CorpusLevel::L1);
  std::size_t queries = 0;
  for (int q = 0; q < 200; ++q) {
    std::string query;
    for (std::size_t n = rng.between(1, 8); n > 0; --n) {
      query += "w" + std::to_string(rng.between(0, 320)) + " ";
    }
    const std::size_t k = rng.between(1, 100);
    for (auto scorer : {SparseScorer::bm25, SparseScorer::tfidf}) {
      ++queries;
      const auto got = index.search(query, scorer, k);
      const auto want = oracle::sparse_full_scan(docs, query, scorer, k);
      const std::string at = std::string(to_string(scorer)) + " query " + std::to_string(q);
      check.expect(got.ids() == want.ids(), at + ": ids differ");
      if (got.size() == want.size()) {
        for (std::size_t i = 0; i < got.size(); ++i) {
          check.near(got.entries[i].score, want.entries[i].score, 1e-9, at);
        }
      }
    }
  }
  const auto hand = InvertedIndex::build(
                        std::vector<std::pair<std::string, std::string>>{
                            {"doc1", "dense retrieval"}, {"doc2", "sparse models"}},
                        CorpusLevel::L1)
                        .search("retrieval", SparseScorer::bm25, 10);
  const bool hand_ok = hand.size() == 1 && hand.entries[0].id == "doc1";
  check.expect(hand_ok, "BM25 hand case returned the wrong documents");
  if (hand_ok) check.near(hand.entries[0].score, std::log(2.0), 1e-9, "BM25 hand case");
  return check.outcome(std::to_string(queries) + " queries on 100 docs equal the full scan; " +
                       "hand case = ln 2");
}

// --------------------------------------------------------------------------
// 5. Dense retrieval

std::vector<EmbeddingVector> as_embeddings(const std::vector<Eigen::VectorXf>& vs) {
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < vs.size(); ++i) out.push_back({"v" + std::to_string(i), vs[i]});
  return out;
}

Outcome dense_exact() {
  Checker check;
  gen::Rng rng(1000);
  auto raw = gen::random_unit_vectors(rng, 1000, 48);
  for (auto& v : raw) v *= static_cast<float>(0.5 + 4.0 * rng.unit());
  const auto vectors = as_embeddings(raw);
  std::vector<std::string> ids;
  for (const auto& v : vectors) ids.push_back(v.id);
  const auto index = DenseIndex::build(vectors, CorpusLevel::L1);
  for (int q = 0; q < 100; ++q) {
    const Eigen::VectorXf query = gen::random_unit_vectors(rng, 1, 48)[0];
    const auto got = index.search(query, 20, SearchMode::exact);
    const auto want = oracle::cosine_full_scan(ids, raw, query, 20);
    check.expect(got.ids() == want.ids(), "query " + std::to_string(q) + ": ids differ");
  }
  return check.outcome("100 queries on 1000 vectors equal brute-force cosine top-20");
}

Outcome dense_approximate() {
  const auto start = Clock::now();
  Checker check;
  gen::Rng rng(10000);
  const auto raw = gen::random_unit_vectors(rng, 10000, 64);
  const auto index = DenseIndex::build(as_embeddings(raw), CorpusLevel::L1);
  const int queries = 200;
  double hits = 0.0;
  for (int q = 0; q < queries; ++q) {
    const Eigen::VectorXf query = gen::random_unit_vectors(rng, 1, 64)[0];
    const auto exact = index.search(query, 10, SearchMode::exact).ids();
    for (const auto& id : index.search(query, 10, SearchMode::approximate).ids()) {
      hits += std::find(exact.begin(), exact.end(), id) != exact.end() ? 1.0 : 0.0;
    }
  }
  const double recall = hits / (10.0 * queries);
  const double elapsed = seconds_since(start);
  check.expect(recall >= 0.95, "recall@10 " + fmt(recall));
  check.expect(elapsed < 60.0, "took " + fmt(elapsed, 2) + " s");
  return check.outcome("recall@10 " + fmt(recall) + " with nlist " + std::to_string(index.nlist()) +
                       ", nprobe " + std::to_string(index.nprobe()) + ", " + fmt(elapsed, 2) + " s");
}

// --------------------------------------------------------------------------
// 6. Fusion

RankedList ranked(const std::vector<std::string>& ids) {
  RankedList out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.entries.push_back({ids[i], static_cast<double>(ids.size() - i)});
  }
  return out;
}

Outcome fusion_hand_and_invariance() {
  Checker check;
  const auto single = rrf_fuse({ranked({"a"})}, 60.0, 10);
  check.near(single.entries.at(0).score, 1.0 / 61.0, 1e-9, "rank 1 in one list");
  const auto both = rrf_fuse({ranked({"a"}), ranked({"x", "y", "a"})}, 60.0, 10);
  check.expect(both.entries.at(0).id == "a", "double-listed document not first");
  check.near(both.entries.at(0).score, 1.0 / 61.0 + 1.0 / 63.0, 1e-9, "ranks 1 and 3");

  gen::Rng rng(6100);
  for (int round = 0; round < 100; ++round) {
    std::vector<RankedList> lists;
    for (int l = 0; l < 3; ++l) {
      std::vector<std::string> pool;
      const std::size_t universe = rng.between(1, 60);
      for (std::size_t i = 0; i < universe; ++i) pool.push_back("d" + std::to_string(i));
      std::shuffle(pool.begin(), pool.end(), rng.engine());
      pool.resize(rng.between(0, universe));
      RankedList list;
      double score = rng.unit();
      for (const auto& id : pool) {
        list.entries.push_back({id, score});
        score -= 0.001 + rng.unit();
      }
      lists.push_back(std::move(list));
    }
    const std::size_t k = rng.between(1, 150);
    const auto fused = rrf_fuse(lists, 60.0, k);
    const auto want = oracle::rrf(lists, 60.0, k);
    check.expect(fused.ids() == want.ids(), "oracle ids differ in round " + std::to_string(round));
    auto permuted = lists;
    std::shuffle(permuted.begin(), permuted.end(), rng.engine());
    check.expect(rrf_fuse(permuted, 60.0, k) == fused, "permutation changed round " + std::to_string(round));
    auto transformed = lists;
    for (auto& l : transformed) {
      for (auto& e : l.entries) e.score = 10.0 + std::exp(3.0 * e.score);
    }
    check.expect(rrf_fuse(transformed, 60.0, k) == fused,
                 "monotone transform changed round " + std::to_string(round));
  }
  return check.outcome("1/61 and 1/61 + 1/63 exact; 100 triples invariant");
}

Outcome fusion_planted(const fixture::PlantedPipeline& p) {
  Checker check;
  const auto report = ablate_levels(p.task1, p.retrieval, *p.bm25, {}, {50});
  double best_single = 0.0, fused = 0.0;
  for (const auto& row : report.rows) {
    const double v = row.values.at("MRR@50");
    if (row.label.rfind("fused", 0) == 0) {
      fused = v;
    } else {
      best_single = std::max(best_single, v);
    }
  }
  check.expect(fused >= 0.98 * best_single,
               "fused " + fmt(fused) + " < 0.98 x best single " + fmt(best_single));
  return check.outcome("fused MRR@50 " + fmt(fused) + " vs best single " + fmt(best_single) + " over " +
                       std::to_string(p.task1.size()) + " queries");
}

// --------------------------------------------------------------------------
// 7. Dataset integrity

bool independent_caps(const Task2Instance& inst) {
  static const std::regex token(R"(\[ref\]_(\d+))");
  if (inst.sections.size() > 3) return false;
  for (const auto& s : inst.sections) {
    std::map<std::string, int> per_ref;
    for (const auto& t : s.targets) ++per_ref[t];
    if (per_ref.size() > 3) return false;
    for (const auto& [t, n] : per_ref) {
      if (n > 10) return false;
    }
    std::multiset<std::size_t> found;
    for (auto it = std::sregex_iterator(s.text.begin(), s.text.end(), token);
         it != std::sregex_iterator(); ++it) {
      found.insert(std::stoul((*it)[1].str()));
    }
    if (found.size() != s.targets.size()) return false;
    for (std::size_t i = 1; i <= s.targets.size(); ++i) {
      if (found.count(i) != 1) return false;
    }
  }
  return true;
}

Outcome dataset_integrity(const fixture::PlantedPipeline& p) {
  Checker check;
  gen::Rng rng(7007);
  std::size_t instances = 0;
  for (int round = 0; round < 100; ++round) {
    const auto built = build_task2(ingest_all(gen::random_task2_papers(rng, 12, 6)));
    for (const auto& inst : built.instances) {
      ++instances;
      check.expect(independent_caps(inst) && satisfies_task2_caps(inst),
                   "caps violated by " + inst.query_id + " in corpus " + std::to_string(round));
    }
  }
  check.expect(instances > 0, "no instances were built");
  check.expect(verify_no_leakage(p.task1, p.retrieval).passed, "Task 1 leakage after pipeline");
  check.expect(verify_no_leakage(p.task2, p.retrieval).passed, "Task 2 leakage after pipeline");
  std::vector<std::string> planted_overlap;
  for (const auto& inst : p.task1) planted_overlap.push_back(inst.query_id);
  planted_overlap.push_back(p.retrieval.records().front().id);
  const auto leak = verify_no_leakage(planted_overlap, p.retrieval);
  check.expect(!leak.passed && leak.offending_ids.size() == 1, "planted overlap not detected");
  return check.outcome(std::to_string(instances) + " instances over 100 corpora within caps; " +
                       "leakage check clean after pipeline and catches the planted overlap");
}

// --------------------------------------------------------------------------
// 8. Noise robustness

Outcome noise_robustness(const fixture::PlantedPipeline& p) {
  Checker check;
  ChatEndpoint endpoint("mock-copy", "mock", make_mock_transport({}));
  TaskContext ctx;
  ctx.corpus = &p.retrieval;
  ctx.retriever = p.bm25.get();
  ctx.endpoint = &endpoint;
  const auto report = noise_sweep(p.task2, ctx, {0.0, 0.2, 0.4, 0.8, 1.0});
  std::vector<double> paca;
  for (const auto& row : report.rows) paca.push_back(row.values.at("PACA@20"));
  for (std::size_t i = 1; i < paca.size(); ++i) {
    check.expect(paca[i] <= paca[i - 1], "PACA@20 rose at step " + std::to_string(i));
  }
  check.expect(paca.back() == 0.0, "PACA@20 at noise 1.0 is " + fmt(paca.back()));
  const double halluc = report.rows.front().values.count("Halluc")
                            ? report.rows.front().values.at("Halluc")
                            : -1.0;
  check.expect(halluc == 0.0, "hallucination at noise 0 is " + fmt(halluc));
  std::string series;
  for (double v : paca) series += (series.empty() ? "" : ", ") + fmt(v);
  return check.outcome("PACA@20 " + series + "; Halluc@0 " + fmt(halluc, 1) + "%");
}

// --------------------------------------------------------------------------
// 9. Parsing

Outcome parsing(const fixture::PlantedPipeline& p) {
  Checker check;
  gen::Rng rng(909);
  const auto good = gen::well_formed_responses(rng, 1000);
  std::size_t parsed = 0, fenced = 0;
  for (const auto& c : good) {
    try {
      const auto out = parse_prediction(c.raw, c.task);
      const bool match = c.task == 1 ? out.titles == c.titles : out.placeholders.size() == c.placeholders;
      check.expect(match, "content mismatch for a well-formed response");
      parsed += match;
      fenced += c.raw.find("```") != std::string::npos;
    } catch (const std::exception& e) {
      check.expect(false, std::string("well-formed response rejected: ") + e.what());
    }
  }

  const auto bad = gen::malformed_responses(rng, 1500);
  check.expect(bad.size() >= 1000, "fuzz corpus too small");
  std::size_t typed = 0;
  for (const auto& raw : bad) {
    for (int task : {1, 2}) {
      try {
        parse_prediction(raw, task);
        check.expect(false, "malformed response accepted");
      } catch (const ParseError&) {
        ++typed;
      } catch (const SchemaError&) {
        ++typed;
      } catch (const std::exception& e) {
        check.expect(false, std::string("untyped failure: ") + e.what());
      }
    }
  }

  // End to end: malformed model output is scored as zero predictions.
  auto calls = std::make_shared<std::size_t>(0);
  auto corpus = std::make_shared<std::vector<std::string>>(bad);
  std::mutex mutex;
  HttpTransport garbage = [corpus, calls, &mutex](const std::string&, const std::string&) {
    std::lock_guard<std::mutex> lock(mutex);
    return HttpResponse{200, chat_response_body((*corpus)[(*calls)++ % corpus->size()]), {}};
  };
  ChatEndpoint endpoint("garbage", "mock", garbage);
  TaskContext ctx;
  ctx.corpus = &p.retrieval;
  ctx.retriever = p.bm25.get();
  ctx.endpoint = &endpoint;
  for (int task : {1, 2}) {
    const auto run = task == 1 ? run_task(p.task1, ctx) : run_task(p.task2, ctx);
    const std::size_t n = task == 1 ? p.task1.size() : p.task2.size();
    check.expect(run.report.instance_count == 0 && run.report.failure_count == n,
                 "task " + std::to_string(task) + " did not record every failure");
    for (const auto& [name, v] : run.report.values) {
      check.expect(v == 0.0, name + " is nonzero for malformed output");
    }
  }
  return check.outcome(std::to_string(parsed) + "/" + std::to_string(good.size()) + " well-formed (" +
                       std::to_string(fenced) + " fenced); " + std::to_string(bad.size()) +
                       " malformed cases, " + std::to_string(typed) + " typed errors; " +
                       "zero-prediction scoring end to end");
}

}  // namespace

int main() {
  // Short-context warnings are expected in the sweeps; keep the output to
  // one line per criterion.
  set_warning_sink([](std::string_view) {});

  const auto pipeline_start = Clock::now();
  const auto planted = fixture::build_planted_pipeline({.docs = 500, .queries = 50});
  std::printf("fixture: planted corpus %zu papers, %zu Task 1 and %zu Task 2 instances (%.2f s)\n",
              planted.full.size(), planted.task1.size(), planted.task2.size(),
              seconds_since(pipeline_start));

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric-oracle-equivalence", metric_oracles},
      {"paca-laws", paca_laws},
      {"cde-bounds", cde_bounds},
      {"sparse-exactness", sparse_exactness},
      {"dense-exact", dense_exact},
      {"dense-approximate-recall", dense_approximate},
      {"fusion-hand-and-invariance", fusion_hand_and_invariance},
      {"fusion-planted-mrr", [&] { return fusion_planted(planted); }},
      {"dataset-integrity", [&] { return dataset_integrity(planted); }},
      {"noise-robustness", [&] { return noise_robustness(planted); }},
      {"parsing", [&] { return parsing(planted); }},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += outcome.passed ? 0 : 1;
    std::printf("%s %s (%s; %.2f s)\n", outcome.passed ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
