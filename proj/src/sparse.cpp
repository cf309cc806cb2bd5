#include "citepred/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"

namespace citepred {

using nlohmann::json;

namespace {
constexpr int kIndexFormatVersion = 1;
}

std::string_view to_string(SparseScorer scorer) {
  return scorer == SparseScorer::bm25 ? "bm25" : "tfidf";
}

SparseScorer parse_sparse_scorer(std::string_view text) {
  if (text == "bm25") return SparseScorer::bm25;
  if (text == "tfidf") return SparseScorer::tfidf;
  throw ValidationError("unknown sparse scorer '" + std::string(text) + "'");
}

InvertedIndex InvertedIndex::build(const Corpus& corpus, CorpusLevel level,
                                   const SparseConfig& config) {
  std::vector<std::pair<std::string, std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.records()) docs.emplace_back(r.id, r.level_text(level));
  return build(docs, level, config);
}

InvertedIndex InvertedIndex::build(const std::vector<std::pair<std::string, std::string>>& docs,
                                   CorpusLevel level, const SparseConfig& config) {
  if (docs.empty()) throw ValidationError("cannot index an empty corpus");
  InvertedIndex index;
  index.level_ = level;
  index.config_ = config;
  std::unordered_set<std::string> ids;
  for (const auto& [id, text] : docs) {
    if (!ids.insert(id).second) throw ValidationError("duplicate document id '" + id + "'");
    const auto doc = static_cast<std::uint32_t>(index.doc_ids_.size());
    const auto tokens = tokenize(text, config.tokenizer);
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (auto& [term, n] : tf) index.vocabulary_[term].push_back({doc, n});
    index.doc_ids_.push_back(id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
  }
  index.finalize();
  return index;
}

void InvertedIndex::finalize() {
  double total = 0.0;
  for (auto len : doc_lengths_) total += len;
  avg_doc_length_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());

  const auto n = static_cast<double>(doc_ids_.size());
  tfidf_norms_.assign(doc_ids_.size(), 0.0);
  // Sorted terms keep the summation order, and so the norms, identical
  // across builds and reloads.
  std::vector<const std::string*> terms;
  terms.reserve(vocabulary_.size());
  for (const auto& entry : vocabulary_) terms.push_back(&entry.first);
  std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });
  for (const std::string* term : terms) {
    const auto& postings = vocabulary_.at(*term);
    const double idf = std::log(n / static_cast<double>(postings.size()));
    for (const auto& p : postings) {
      const double w = std::log1p(static_cast<double>(p.tf)) * idf;
      tfidf_norms_[p.doc] += w * w;
    }
  }
  for (auto& v : tfidf_norms_) v = std::sqrt(v);
}

std::span<const Posting> InvertedIndex::postings(const std::string& term) const {
  const auto it = vocabulary_.find(term);
  if (it == vocabulary_.end()) return {};
  return it->second;
}

RankedList InvertedIndex::search(std::string_view query, SparseScorer scorer,
                                 std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::map<std::string, std::uint32_t> qtf;
  for (auto& t : tokenize(query, config_.tokenizer)) ++qtf[t];
  if (qtf.empty()) return {};

  const auto n = static_cast<double>(doc_ids_.size());
  std::vector<double> scores(doc_ids_.size(), 0.0);
  std::vector<char> touched(doc_ids_.size(), 0);

  if (scorer == SparseScorer::bm25) {
    const double k1 = config_.bm25.k1;
    const double b = config_.bm25.b;
    for (const auto& [term, _] : qtf) {
      const auto plist = postings(term);
      if (plist.empty()) continue;
      const auto df = static_cast<double>(plist.size());
      const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      for (const auto& p : plist) {
        const double tf = p.tf;
        const double norm = 1.0 - b + b * doc_lengths_[p.doc] / avg_doc_length_;
        scores[p.doc] += idf * tf * (k1 + 1.0) / (tf + k1 * norm);
        touched[p.doc] = 1;
      }
    }
  } else {
    double qnorm = 0.0;
    for (const auto& [term, count] : qtf) {
      const auto plist = postings(term);
      if (plist.empty()) continue;
      const double idf = std::log(n / static_cast<double>(plist.size()));
      const double wq = std::log1p(static_cast<double>(count)) * idf;
      qnorm += wq * wq;
      for (const auto& p : plist) {
        scores[p.doc] += wq * std::log1p(static_cast<double>(p.tf)) * idf;
        touched[p.doc] = 1;
      }
    }
    qnorm = std::sqrt(qnorm);
    for (std::size_t d = 0; d < scores.size(); ++d) {
      if (!touched[d]) continue;
      const double denom = qnorm * tfidf_norms_[d];
      scores[d] = denom > 0.0 ? scores[d] / denom : 0.0;
    }
  }

  std::vector<ScoredDoc> candidates;
  for (std::size_t d = 0; d < scores.size(); ++d) {
    if (touched[d] && scores[d] > 0.0) candidates.push_back({doc_ids_[d], scores[d]});
  }
  return top_k(std::move(candidates), k);
}

bool InvertedIndex::operator==(const InvertedIndex& o) const {
  return level_ == o.level_ && config_.tokenizer.stem == o.config_.tokenizer.stem &&
         config_.tokenizer.remove_stopwords == o.config_.tokenizer.remove_stopwords &&
         config_.bm25.k1 == o.config_.bm25.k1 && config_.bm25.b == o.config_.bm25.b &&
         doc_ids_ == o.doc_ids_ && doc_lengths_ == o.doc_lengths_ && vocabulary_ == o.vocabulary_;
}

void InvertedIndex::save(const std::filesystem::path& path) const {
  json postings = json::object();
  for (const auto& [term, plist] : vocabulary_) {
    json arr = json::array();
    for (const auto& p : plist) arr.push_back({p.doc, p.tf});
    postings[term] = std::move(arr);
  }
  const json doc = {{"format", "citepred-sparse-index"},
                    {"version", kIndexFormatVersion},
                    {"level", std::string(to_string(level_))},
                    {"config",
                     {{"stem", config_.tokenizer.stem},
                      {"remove_stopwords", config_.tokenizer.remove_stopwords},
                      {"k1", config_.bm25.k1},
                      {"b", config_.bm25.b}}},
                    {"doc_ids", doc_ids_},
                    {"doc_lengths", doc_lengths_},
                    {"postings", std::move(postings)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << doc.dump() << '\n';
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  InvertedIndex index;
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != "citepred-sparse-index") throw LoadError("not a sparse index file");
    if (doc.at("version").get<int>() != kIndexFormatVersion) {
      throw LoadError("unsupported sparse index version");
    }
    index.level_ = parse_level(doc.at("level").get<std::string>());
    const auto& cfg = doc.at("config");
    index.config_.tokenizer.stem = cfg.at("stem").get<bool>();
    index.config_.tokenizer.remove_stopwords = cfg.at("remove_stopwords").get<bool>();
    index.config_.bm25.k1 = cfg.at("k1").get<double>();
    index.config_.bm25.b = cfg.at("b").get<double>();
    index.doc_ids_ = doc.at("doc_ids").get<std::vector<std::string>>();
    index.doc_lengths_ = doc.at("doc_lengths").get<std::vector<std::uint32_t>>();
    if (index.doc_ids_.size() != index.doc_lengths_.size() || index.doc_ids_.empty()) {
      throw LoadError("document table is inconsistent");
    }
    for (const auto& [term, arr] : doc.at("postings").items()) {
      auto& plist = index.vocabulary_[term];
      for (const auto& p : arr) {
        const Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
        if (posting.doc >= index.doc_ids_.size()) throw LoadError("posting references unknown doc");
        plist.push_back(posting);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed sparse index: ") + e.what());
  }
  index.finalize();
  return index;
}

}  // namespace citepred
