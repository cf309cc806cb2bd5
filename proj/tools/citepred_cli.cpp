// citepred command-line front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "citepred/config.hpp"
#include "citepred/corpus.hpp"
#include "citepred/crawl.hpp"
#include "citepred/dataset.hpp"
#include "citepred/dense.hpp"
#include "citepred/embedding.hpp"
#include "citepred/error.hpp"
#include "citepred/fusion.hpp"
#include "citepred/generation.hpp"
#include "citepred/harness.hpp"
#include "citepred/mock_generator.hpp"
#include "citepred/report.hpp"
#include "citepred/sparse.hpp"
#include "citepred/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace citepred;

namespace {

std::vector<RawPaper> read_raw_papers(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      const auto ext = entry.path().extension();
      if (ext == ".json" || ext == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  std::vector<RawPaper> papers;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open '" + file.string() + "'");
    if (file.extension() == ".json") {
      const json j = json::parse(in, nullptr, false);
      if (j.is_discarded()) throw LoadError("'" + file.string() + "' is not valid JSON");
      if (j.is_array()) {
        for (const auto& item : j) papers.push_back(raw_paper_from_json(item));
      } else {
        papers.push_back(raw_paper_from_json(j));
      }
      continue;
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        throw LoadError("'" + file.string() + "' has malformed JSON", line_no);
      }
      papers.push_back(raw_paper_from_json(j));
    }
  }
  return papers;
}

std::vector<CorpusLevel> levels_from(const std::string& text) {
  if (text == "all") return {kAllLevels.begin(), kAllLevels.end()};
  return {parse_level(text)};
}

fs::path sparse_index_path(const fs::path& dir, CorpusLevel level) {
  return dir / ("sparse_" + std::string(to_string(level)) + ".json");
}

fs::path dense_index_path(const fs::path& dir, CorpusLevel level) {
  return dir / ("dense_" + std::string(to_string(level)) + ".bin");
}

/// Retriever described by the configuration.
std::shared_ptr<LevelRetriever> make_retriever(const ExperimentConfig& config, const Corpus& corpus,
                                               const std::vector<Task1Instance>& task1) {
  if (config.scorer == "bm25" || config.scorer == "tfidf") {
    std::map<CorpusLevel, std::shared_ptr<const InvertedIndex>> indexes;
    for (CorpusLevel level : config.levels) {
      const auto path = sparse_index_path(config.index_dir, level);
      if (!config.index_dir.empty() && fs::exists(path)) {
        indexes[level] = std::make_shared<InvertedIndex>(InvertedIndex::load(path));
      } else {
        indexes[level] = std::make_shared<InvertedIndex>(InvertedIndex::build(corpus, level));
      }
    }
    return std::make_shared<SparseRetriever>(std::move(indexes),
                                             parse_sparse_scorer(config.scorer));
  }
  if (config.scorer == "dense") {
    if (config.vectors.empty()) throw ValidationError("dense retrieval needs 'vectors'");
    std::map<CorpusLevel, std::shared_ptr<const DenseIndex>> indexes;
    for (CorpusLevel level : config.levels) {
      indexes[level] =
          std::make_shared<DenseIndex>(load_dense_index(dense_index_path(config.index_dir, level)));
    }
    auto encoder = std::make_shared<PrecomputedProvider>(PrecomputedProvider::from_file(config.vectors));
    return std::make_shared<DenseRetriever>(std::move(indexes), encoder, config.dense_mode);
  }
  if (config.scorer == "hashing") {
    auto encoder = std::make_shared<HashingProvider>(config.hashing_dim);
    std::map<CorpusLevel, std::shared_ptr<const DenseIndex>> indexes;
    for (CorpusLevel level : config.levels) {
      indexes[level] =
          std::make_shared<DenseIndex>(DenseIndex::build(embed_corpus(*encoder, corpus, level), level));
    }
    return std::make_shared<DenseRetriever>(std::move(indexes), encoder, config.dense_mode);
  }
  if (config.scorer == "oracle") {
    std::unordered_map<std::string, std::vector<std::string>> relevant;
    for (const auto& inst : task1) {
      auto& ids = relevant[inst.query_id];
      for (const auto& title : inst.ground_truth_refs) {
        if (const auto* r = corpus.find_by_title(title)) ids.push_back(r->id);
      }
    }
    return std::make_shared<OracleRetriever>(std::move(relevant));
  }
  if (config.scorer == "random") {
    std::vector<std::string> ids;
    for (const auto& r : corpus.records()) ids.push_back(r.id);
    return std::make_shared<RandomRetriever>(std::move(ids), config.seed);
  }
  throw ValidationError("unknown scorer '" + config.scorer + "'");
}

std::unique_ptr<ChatEndpoint> make_endpoint(const ExperimentConfig& config) {
  MockOptions mock;
  mock.threshold = config.mock_threshold;
  if (config.generator == "mock-copy") {
    mock.kind = MockKind::context_copying;
  } else if (config.generator == "mock-ignore") {
    mock.kind = MockKind::context_ignoring;
    mock.fixed_titles = {"A Survey of Imaginary Methods", "Unverifiable Results Revisited"};
  } else if (config.generator == "mock-degrade") {
    mock.kind = MockKind::length_degrading;
  } else if (config.generator == "http") {
    if (config.endpoint_url.empty()) throw ValidationError("'endpoint_url' is required for http");
    const char* key = std::getenv(config.api_key_env.c_str());
    return std::make_unique<ChatEndpoint>(
        "http", config.endpoint_model, make_http_transport(config.endpoint_url, key ? key : ""));
  } else {
    throw ValidationError("unknown generator '" + config.generator + "'");
  }
  return std::make_unique<ChatEndpoint>(config.generator, "mock", make_mock_transport(mock));
}

RetrievalSettings retrieval_settings(const ExperimentConfig& config) {
  RetrievalSettings s;
  s.levels = config.levels;
  s.fusion = config.fusion;
  s.k = config.k;
  s.c = config.rrf_c;
  return s;
}

/// Loaded inputs of one experiment.
struct Workspace {
  ExperimentConfig config;
  Corpus corpus;
  std::vector<Task1Instance> task1;
  std::vector<Task2Instance> task2;
  std::shared_ptr<LevelRetriever> retriever;
  std::unique_ptr<ChatEndpoint> endpoint;

  Workspace(const fs::path& config_path, bool need_generator)
      : Workspace(load_config(config_path), need_generator) {}

  Workspace(ExperimentConfig loaded, bool need_generator) : config(std::move(loaded)) {
    config.validate();
    if (config.corpus.empty()) throw ValidationError("'corpus' is required");
    corpus = load_corpus(config.corpus);
    if (!config.task1.empty()) task1 = load_task1(config.task1);
    if (!config.task2.empty()) task2 = load_task2(config.task2);
    retriever = make_retriever(config, corpus, task1);
    if (need_generator) endpoint = make_endpoint(config);
  }

  TaskContext context() {
    TaskContext ctx;
    ctx.corpus = &corpus;
    ctx.retriever = retriever.get();
    ctx.endpoint = endpoint.get();
    ctx.retrieval = retrieval_settings(config);
    ctx.params.temperature = config.temperature;
    ctx.params.presence_penalty = config.presence_penalty;
    ctx.params.max_tokens = config.max_tokens;
    ctx.R = config.R;
    ctx.noise = config.noise;
    ctx.seed = config.seed;
    ctx.workers = config.workers;
    ctx.grid.recall_k = config.recall_k;
    ctx.grid.ndcg_k = config.ndcg_k;
    ctx.grid.hit_k = config.hit_k;
    ctx.grid.paca_k = config.paca_k;
    ctx.grid.hit_variant = config.hit_variant;
    ctx.grid.fuzzy_distance = config.fuzzy_distance;
    std::ostringstream label;
    label << "task" << config.task << " " << retriever->name() << " R=" << config.R
          << " noise=" << config.noise;
    ctx.label = label.str();
    return ctx;
  }

  void require_dataset() const {
    if (config.task == 1 && task1.empty()) throw ValidationError("'task1' dataset is required");
    if (config.task == 2 && task2.empty()) throw ValidationError("'task2' dataset is required");
  }
};

void emit(const Report& report, const ExperimentConfig& config, const std::string& stem) {
  write_report(report, config.output_dir, stem);
  std::cout << report_to_table(report);
  std::cout << "wrote " << (config.output_dir / (stem + ".{json,csv,txt}")).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citepred: citation prediction benchmark toolkit"};
  app.require_subcommand(1);

  // corpus ---------------------------------------------------------------
  auto* corpus_cmd = app.add_subcommand("corpus", "Build and maintain the paper corpus");
  corpus_cmd->require_subcommand(1);

  std::string ingest_input, ingest_out;
  bool any_category = false;
  auto* ingest = corpus_cmd->add_subcommand("ingest", "Ingest raw papers into corpus JSONL");
  ingest->add_option("--input", ingest_input, "Raw paper file or directory")->required();
  ingest->add_option("--out", ingest_out, "Output corpus JSONL")->required();
  ingest->add_flag("--any-category", any_category, "Accept categories outside the default set");
  ingest->callback([&] {
    IngestOptions options;
    if (!any_category) options.categories = default_categories();
    std::vector<PaperRecord> records;
    std::size_t rejected = 0;
    for (const auto& raw : read_raw_papers(ingest_input)) {
      try {
        records.push_back(ingest_paper(raw, options));
      } catch (const ValidationError& e) {
        std::cerr << "skipped: " << e.what() << '\n';
        ++rejected;
      }
    }
    const Corpus corpus(std::move(records));
    persist_corpus(corpus, ingest_out);
    std::cout << "ingested " << corpus.size() << " papers, rejected " << rejected << '\n';
  });

  std::string merge_base, merge_batch, merge_out;
  auto* merge = corpus_cmd->add_subcommand("merge", "Merge a new batch into an existing corpus");
  merge->add_option("--base", merge_base)->required();
  merge->add_option("--batch", merge_batch)->required();
  merge->add_option("--out", merge_out)->required();
  merge->callback([&] {
    const Corpus merged = incremental_merge(load_corpus(merge_base), load_corpus(merge_batch));
    persist_corpus(merged, merge_out);
    std::cout << "merged corpus has " << merged.size() << " papers\n";
  });

  std::string plan_category, plan_start, plan_end;
  std::int64_t plan_volume = 0;
  auto* plan = corpus_cmd->add_subcommand("plan-crawl", "Plan crawl windows for a category");
  plan->add_option("--category", plan_category)->required();
  plan->add_option("--volume", plan_volume, "Estimated yearly paper volume")->required();
  plan->add_option("--start", plan_start, "YYYY or YYYY-MM-DD")->required();
  plan->add_option("--end", plan_end, "YYYY or YYYY-MM-DD")->required();
  plan->callback([&] {
    const CrawlPlan p = plan_crawl_windows(
        plan_category, plan_volume, {parse_date(plan_start), parse_date(plan_end, true)});
    json windows = json::array();
    for (const auto& w : p.windows) {
      windows.push_back({{"start", format_date(w.start)}, {"end", format_date(w.end)}});
    }
    std::cout << json{{"category", p.category},
                      {"volume_estimate", p.volume_estimate},
                      {"granularity", to_string(p.granularity)},
                      {"windows", windows}}
                     .dump(2)
              << '\n';
  });

  // dataset --------------------------------------------------------------
  auto* dataset_cmd = app.add_subcommand("dataset", "Build and check evaluation datasets");
  dataset_cmd->require_subcommand(1);

  std::string build_corpus, build_out, build_retrieval;
  int build_task = 1;
  auto* build = dataset_cmd->add_subcommand("build", "Carve a task dataset out of a corpus");
  build->add_option("--corpus", build_corpus)->required();
  build->add_option("--task", build_task)->required()->check(CLI::IsMember({1, 2}));
  build->add_option("--out", build_out, "Dataset JSONL")->required();
  build->add_option("--retrieval-corpus", build_retrieval,
                    "Corpus JSONL with the query papers removed")
      ->required();
  build->callback([&] {
    const Corpus corpus = load_corpus(build_corpus);
    std::set<std::string> removal;
    std::vector<Exclusion> exclusions;
    std::size_t count = 0;
    if (build_task == 1) {
      auto b = build_task1(corpus);
      save_task1(b.instances, build_out);
      removal = b.removal_ids;
      exclusions = b.exclusions;
      count = b.instances.size();
    } else {
      auto b = build_task2(corpus);
      save_task2(b.instances, build_out);
      removal = b.removal_ids;
      exclusions = b.exclusions;
      count = b.instances.size();
    }
    const auto removed = remove_papers(corpus, removal);
    persist_corpus(removed.corpus, build_retrieval);
    const auto leak = verify_no_leakage(std::vector<std::string>(removal.begin(), removal.end()),
                                        removed.corpus);
    std::map<std::string, std::size_t> reasons;
    for (const auto& e : exclusions) ++reasons[e.reason];
    std::cout << "task " << build_task << ": " << count << " instances, "
              << exclusions.size() << " excluded, retrieval corpus " << removed.corpus.size()
              << " papers, leakage check " << (leak.passed ? "passed" : "FAILED") << '\n';
    for (const auto& [reason, n] : reasons) std::cout << "  excluded (" << reason << "): " << n << '\n';
    if (!leak.passed) throw Error("query papers remain in the retrieval corpus");
  });

  std::string leak_dataset, leak_corpus;
  int leak_task = 1;
  auto* leak = dataset_cmd->add_subcommand("verify-leakage",
                                           "Check that no query paper is in a corpus");
  leak->add_option("--dataset", leak_dataset)->required();
  leak->add_option("--task", leak_task)->required()->check(CLI::IsMember({1, 2}));
  leak->add_option("--corpus", leak_corpus)->required();
  leak->callback([&] {
    const Corpus corpus = load_corpus(leak_corpus);
    const LeakageReport r = leak_task == 1 ? verify_no_leakage(load_task1(leak_dataset), corpus)
                                           : verify_no_leakage(load_task2(leak_dataset), corpus);
    if (r.passed) {
      std::cout << "no leakage\n";
      return;
    }
    for (const auto& id : r.offending_ids) std::cout << "leaked: " << id << '\n';
    throw Error(std::to_string(r.offending_ids.size()) + " query papers found in the corpus");
  });

  // index ----------------------------------------------------------------
  auto* index_cmd = app.add_subcommand("index", "Build retrieval indexes");
  index_cmd->require_subcommand(1);

  std::string sparse_corpus, sparse_dir, sparse_level = "all";
  bool sparse_stopwords = false, sparse_stem = false;
  auto* sparse = index_cmd->add_subcommand("sparse", "Build inverted indexes");
  sparse->add_option("--corpus", sparse_corpus)->required();
  sparse->add_option("--level", sparse_level, "L1, L2, L3 or all");
  sparse->add_option("--out-dir", sparse_dir)->required();
  sparse->add_flag("--stopwords", sparse_stopwords, "Drop English stopwords");
  sparse->add_flag("--stem", sparse_stem, "Strip plural suffixes");
  sparse->callback([&] {
    const Corpus corpus = load_corpus(sparse_corpus);
    SparseConfig config;
    config.tokenizer = {sparse_stopwords, sparse_stem};
    fs::create_directories(sparse_dir);
    for (CorpusLevel level : levels_from(sparse_level)) {
      const auto index = InvertedIndex::build(corpus, level, config);
      index.save(sparse_index_path(sparse_dir, level));
      std::cout << to_string(level) << ": " << index.doc_count() << " docs, "
                << index.vocabulary_size() << " terms\n";
    }
  });

  std::string dense_vectors, dense_level = "L1", dense_dir, dense_corpus;
  std::size_t dense_hash_dim = 0;
  auto* dense = index_cmd->add_subcommand("dense", "Build a dense vector index");
  dense->add_option("--vectors", dense_vectors, "Vector file (JSONL or binary)");
  dense->add_option("--corpus", dense_corpus, "Corpus to embed with the hashing encoder");
  dense->add_option("--hashing-dim", dense_hash_dim, "Embed --corpus with feature hashing");
  dense->add_option("--level", dense_level, "L1, L2, L3 or all");
  dense->add_option("--out-dir", dense_dir)->required();
  dense->callback([&] {
    fs::create_directories(dense_dir);
    for (CorpusLevel level : levels_from(dense_level)) {
      std::vector<EmbeddingVector> vectors;
      if (!dense_vectors.empty()) {
        vectors = load_vectors(dense_vectors);
      } else if (!dense_corpus.empty() && dense_hash_dim > 0) {
        HashingProvider provider(dense_hash_dim);
        vectors = embed_corpus(provider, load_corpus(dense_corpus), level);
      } else {
        throw ValidationError("give --vectors, or --corpus with --hashing-dim");
      }
      const auto index = DenseIndex::build(vectors, level);
      save_dense_index(index, dense_index_path(dense_dir, level));
      std::cout << to_string(level) << ": " << index.size() << " vectors, dim " << index.dim()
                << ", " << index.nlist() << " lists\n";
    }
  });

  // retrieve -------------------------------------------------------------
  std::string retrieve_config, retrieve_mode = "fused", retrieve_out, retrieve_scorer;
  std::size_t retrieve_k = 0;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Rank corpus papers for every query");
  retrieve_cmd->add_option("--config", retrieve_config)->required();
  retrieve_cmd->add_option("--mode", retrieve_mode, "fused, L1, L2 or L3");
  retrieve_cmd->add_option("--k", retrieve_k, "Results per level");
  retrieve_cmd->add_option("--scorer", retrieve_scorer, "bm25, tfidf, dense, hashing, oracle, random");
  retrieve_cmd->add_option("--out", retrieve_out, "Results JSONL (stdout if omitted)");
  retrieve_cmd->callback([&] {
    auto config = load_config(retrieve_config);
    if (!retrieve_scorer.empty()) config.scorer = retrieve_scorer;
    if (retrieve_k) config.k = retrieve_k;
    if (retrieve_mode != "fused") {
      config.levels = {parse_level(retrieve_mode)};
      config.fusion = false;
    }
    Workspace ws(std::move(config), false);
    std::vector<std::pair<std::string, std::string>> queries;
    for (const auto& i : ws.task1) queries.emplace_back(i.query_id, query_text(i.title, i.abstract));
    for (const auto& i : ws.task2) queries.emplace_back(i.query_id, query_text(i.title, i.abstract));
    std::ofstream file;
    if (!retrieve_out.empty()) file.open(retrieve_out);
    std::ostream& out = retrieve_out.empty() ? std::cout : file;
    const auto settings = retrieval_settings(ws.config);
    for (const auto& [id, text] : queries) {
      const RankedList list = retrieve({id, text}, *ws.retriever, settings);
      json ids = json::array(), scores = json::array();
      for (const auto& e : list.entries) {
        ids.push_back(e.id);
        scores.push_back(e.score);
      }
      out << json{{"query_id", id}, {"ids", ids}, {"scores", scores}}.dump() << '\n';
    }
  });

  // experiments ----------------------------------------------------------
  std::string config_path;
  auto* eval = app.add_subcommand("eval-retriever", "Recall and MRR of the configured retriever");
  eval->add_option("--config", config_path)->required();
  eval->callback([&] {
    Workspace ws(config_path, false);
    if (ws.task1.empty()) throw ValidationError("'task1' dataset is required");
    Report report;
    report.suite = "retriever evaluation";
    report.rows.push_back(
        eval_retriever(ws.task1, ws.corpus, *ws.retriever, retrieval_settings(ws.config),
                       ws.config.retriever_k)
            .report);
    emit(report, ws.config, "eval_retriever");
  });

  std::string gen_out;
  int gen_task = 0, gen_R = 0;
  double gen_noise = -1.0;
  std::string gen_endpoint;
  auto* generate = app.add_subcommand("generate", "Generate predictions for every instance");
  generate->add_option("--config", config_path)->required();
  generate->add_option("--task", gen_task)->check(CLI::IsMember({1, 2}));
  generate->add_option("--R", gen_R);
  generate->add_option("--noise", gen_noise)->check(CLI::Range(0.0, 1.0));
  generate->add_option("--endpoint", gen_endpoint, "mock-copy, mock-ignore, mock-degrade or http");
  generate->add_option("--out", gen_out, "Predictions JSONL (stdout if omitted)");
  generate->callback([&] {
    Workspace ws(config_path, false);
    if (gen_task) ws.config.task = gen_task;
    if (gen_R) ws.config.R = gen_R;
    if (gen_noise >= 0.0) ws.config.noise = gen_noise;
    if (!gen_endpoint.empty()) ws.config.generator = gen_endpoint;
    ws.config.validate();
    ws.require_dataset();
    ws.endpoint = make_endpoint(ws.config);
    const TaskContext ctx = ws.context();
    std::ofstream file;
    if (!gen_out.empty()) file.open(gen_out);
    std::ostream& out = gen_out.empty() ? std::cout : file;
    auto run_one = [&](const auto& inst) {
      json line{{"query_id", inst.query_id}};
      try {
        RankedList context = retrieve({inst.query_id, query_text(inst.title, inst.abstract)},
                                      *ws.retriever, ctx.retrieval);
        std::set<std::string> truth;
        const RankedList noisy = inject_noise(context, ctx.noise, ws.corpus, truth, ctx.seed);
        const auto envelope = build_prompt(inst, noisy, ws.corpus, ctx.R, ctx.params);
        const std::string raw = call_generator(envelope, *ws.endpoint);
        line["raw"] = raw;
        line["prediction"] = json::parse(serialize_prediction(parse_prediction(raw, ws.config.task)));
      } catch (const Error& e) {
        line["error"] = e.what();
      }
      out << line.dump() << '\n';
    };
    if (ws.config.task == 1) {
      for (const auto& inst : ws.task1) run_one(inst);
    } else {
      for (const auto& inst : ws.task2) run_one(inst);
    }
  });

  auto* run = app.add_subcommand("run-task", "End-to-end generation and scoring");
  run->add_option("--config", config_path)->required();
  run->callback([&] {
    Workspace ws(config_path, true);
    ws.require_dataset();
    Report report;
    report.suite = "task " + std::to_string(ws.config.task);
    report.rows.push_back(ws.config.task == 1 ? run_task(ws.task1, ws.context()).report
                                              : run_task(ws.task2, ws.context()).report);
    emit(report, ws.config, "run_task");
  });

  auto* ablate = app.add_subcommand("ablate-levels", "Single-level vs fused retrieval");
  ablate->add_option("--config", config_path)->required();
  ablate->callback([&] {
    Workspace ws(config_path, false);
    if (ws.task1.empty()) throw ValidationError("'task1' dataset is required");
    emit(ablate_levels(ws.task1, ws.corpus, *ws.retriever, retrieval_settings(ws.config),
                       ws.config.retriever_k),
         ws.config, "ablate_levels");
  });

  auto* depth = app.add_subcommand("depth-sweep", "Prediction quality across retrieval depths");
  depth->add_option("--config", config_path)->required();
  depth->callback([&] {
    Workspace ws(config_path, true);
    ws.require_dataset();
    emit(ws.config.task == 1 ? depth_sweep(ws.task1, ws.context(), ws.config.depth_values)
                             : depth_sweep(ws.task2, ws.context(), ws.config.depth_values),
         ws.config, "depth_sweep");
  });

  auto* noise = app.add_subcommand("noise-sweep", "Prediction quality under retrieval noise");
  noise->add_option("--config", config_path)->required();
  noise->callback([&] {
    Workspace ws(config_path, true);
    ws.require_dataset();
    emit(ws.config.task == 1 ? noise_sweep(ws.task1, ws.context(), ws.config.noise_values)
                             : noise_sweep(ws.task2, ws.context(), ws.config.noise_values),
         ws.config, "noise_sweep");
  });

  std::string report_input, report_format = "table";
  auto* report_cmd = app.add_subcommand("report", "Render a saved report");
  report_cmd->add_option("--input", report_input, "Report JSON")->required();
  report_cmd->add_option("--format", report_format)->check(CLI::IsMember({"table", "csv", "json"}));
  report_cmd->callback([&] {
    const Report r = read_report(report_input);
    if (report_format == "csv") {
      std::cout << report_to_csv(r);
    } else if (report_format == "json") {
      std::cout << report_to_json(r) << '\n';
    } else {
      std::cout << report_to_table(r);
    }
  });

  std::string synth_out;
  PlantedOptions synth_options;
  auto* synth = app.add_subcommand("synth", "Write a planted-citation fixture as raw papers");
  synth->add_option("--out", synth_out, "Raw paper JSONL")->required();
  synth->add_option("--docs", synth_options.docs);
  synth->add_option("--queries", synth_options.queries);
  synth->add_option("--refs", synth_options.refs_per_query);
  synth->add_option("--seed", synth_options.seed);
  synth->callback([&] {
    const auto fixture = make_planted_corpus(synth_options);
    std::ofstream out(synth_out);
    if (!out) throw Error("cannot open '" + synth_out + "' for writing");
    for (const auto& p : fixture.papers) out << raw_paper_to_json(p).dump() << '\n';
    std::cout << "wrote " << fixture.papers.size() << " papers (" << fixture.query_ids.size()
              << " citing papers)\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
