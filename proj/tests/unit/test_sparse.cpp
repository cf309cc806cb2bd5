#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "citepred/error.hpp"
#include "citepred/sparse.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace citepred;

namespace {

using Docs = std::vector<std::pair<std::string, std::string>>;

void check_equal(const RankedList& got, const RankedList& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got.entries[i].id == want.entries[i].id);
    CHECK(got.entries[i].score == doctest::Approx(want.entries[i].score).epsilon(1e-12));
    CHECK(std::abs(got.entries[i].score - want.entries[i].score) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("index statistics") {
  const Docs docs = {{"a", "graph neural networks"}, {"b", "graph graph retrieval models"}};
  const auto index = InvertedIndex::build(docs, CorpusLevel::L1);
  CHECK(index.vocabulary_size() == 5);
  CHECK(index.doc_count() == 2);
  CHECK(index.avg_doc_length() == doctest::Approx(3.5));
  const auto postings = index.postings("graph");
  REQUIRE(postings.size() == 2);
  CHECK(postings[1].tf == 2);
  CHECK(index.document_frequency("retrieval") == 1);
  CHECK(index.postings("absent").empty());
  CHECK_THROWS_AS(InvertedIndex::build(Docs{}, CorpusLevel::L1), ValidationError);
  CHECK_THROWS_AS(InvertedIndex::build(Docs{{"a", "x"}, {"a", "y"}}, CorpusLevel::L1),
                  ValidationError);
}

TEST_CASE("100-doc fixture statistics match a recount") {
  gen::Rng rng(8);
  const Docs docs = gen::random_documents(rng, 100, 150, 60);
  const auto index = InvertedIndex::build(docs, CorpusLevel::L2);
  double total = 0;
  for (const auto& [id, text] : docs) total += static_cast<double>(tokenize(text).size());
  CHECK(index.doc_count() == 100);
  CHECK(index.avg_doc_length() == doctest::Approx(total / 100.0).epsilon(1e-12));
}

TEST_CASE("BM25 hand case equals ln 2") {
  // N = 2, df = 1, tf = 1, |d| = avgdl: idf = ln(1.5/1.5 + 1), tf part = 1.
  const Docs docs = {{"doc1", "dense retrieval"}, {"doc2", "sparse models"}};
  const auto index = InvertedIndex::build(docs, CorpusLevel::L1);
  const auto result = index.search("retrieval", SparseScorer::bm25, 10);
  REQUIRE(result.size() == 1);
  CHECK(result.entries[0].id == "doc1");
  CHECK(std::abs(result.entries[0].score - std::log(2.0)) <= 1e-9);
}

TEST_CASE("single-match dominance, no overlap and empty queries") {
  const Docs docs = {{"doc1", "graph retrieval"}, {"doc2", "image models"}};
  const auto index = InvertedIndex::build(docs, CorpusLevel::L1);
  for (auto scorer : {SparseScorer::bm25, SparseScorer::tfidf}) {
    const auto r = index.search("retrieval of graphs", scorer, 5);
    REQUIRE_FALSE(r.empty());
    CHECK(r.entries[0].id == "doc1");
    CHECK(index.search("unrelated words", scorer, 5).empty());
    CHECK(index.search(" ,.; ", scorer, 5).empty());
  }
  CHECK_THROWS_AS(index.search("graph", SparseScorer::bm25, 0), ValidationError);
}

TEST_CASE("search equals a full-scan oracle") {
  gen::Rng rng(99);
  for (int round = 0; round < 20; ++round) {
    const Docs docs = gen::random_documents(rng, rng.between(1, 120), rng.between(5, 200), 50);
    const auto index = InvertedIndex::build(docs, CorpusLevel::L3);
    for (int q = 0; q < 10; ++q) {
      std::string query;
      for (std::size_t n = rng.between(1, 6); n > 0; --n) {
        query += "w" + std::to_string(rng.between(0, 220)) + " ";
      }
      const std::size_t k = rng.between(1, 130);
      for (auto scorer : {SparseScorer::bm25, SparseScorer::tfidf}) {
        const auto got = index.search(query, scorer, k);
        CHECK(is_well_ordered(got));
        check_equal(got, oracle::sparse_full_scan(docs, query, scorer, k));
      }
    }
  }
}

TEST_CASE("stopword and stemming switches reach the oracle too") {
  gen::Rng rng(4);
  const Docs docs = {{"a", "the graphs of networks"}, {"b", "a graph and the network"},
                     {"c", "studies of the boxes"}, {"d", "box study"}};
  SparseConfig config;
  config.tokenizer = {true, true};
  const auto index = InvertedIndex::build(docs, CorpusLevel::L1, config);
  for (auto scorer : {SparseScorer::bm25, SparseScorer::tfidf}) {
    for (const char* q : {"graphs", "the box studies", "network graph"}) {
      check_equal(index.search(q, scorer, 10), oracle::sparse_full_scan(docs, q, scorer, 10, config));
    }
  }
}

TEST_CASE("adding a document without the query term keeps BM25 order") {
  // Holds exactly when the average length is unchanged and the query has one
  // term: idf then rescales every score by the same factor.
  gen::Rng rng(31);
  auto fixed_length = [&](std::size_t count, std::size_t length, const std::string& prefix) {
    Docs docs;
    for (std::size_t d = 0; d < count; ++d) {
      std::string text;
      for (std::size_t i = 0; i < length; ++i) text += "w" + std::to_string(rng.between(0, 30)) + " ";
      docs.emplace_back(prefix + std::to_string(d), text);
    }
    return docs;
  };
  for (int round = 0; round < 30; ++round) {
    Docs docs = fixed_length(40, 12, "d");
    const std::string query = "w" + std::to_string(rng.between(0, 30));
    const auto before = InvertedIndex::build(docs, CorpusLevel::L1).search(query, SparseScorer::bm25, 100);
    Docs extra = fixed_length(1, 12, "zz");
    for (auto& c : extra[0].second) c = c == 'w' ? 'u' : c;
    docs.push_back(extra[0]);
    const auto after = InvertedIndex::build(docs, CorpusLevel::L1).search(query, SparseScorer::bm25, 100);
    CHECK(before.ids() == after.ids());
  }
}

TEST_CASE("index persists and reloads") {
  gen::Rng rng(2);
  const Docs docs = gen::random_documents(rng, 50, 80, 40);
  const auto index = InvertedIndex::build(docs, CorpusLevel::L2);
  const auto path = std::filesystem::temp_directory_path() / "citepred_unit_sparse.json";
  index.save(path);
  const auto back = InvertedIndex::load(path);
  CHECK(back == index);
  CHECK(back.level() == CorpusLevel::L2);
  CHECK(back.search("w1 w2", SparseScorer::tfidf, 10) == index.search("w1 w2", SparseScorer::tfidf, 10));
}

TEST_CASE("scorer names parse") {
  CHECK(parse_sparse_scorer("bm25") == SparseScorer::bm25);
  CHECK(parse_sparse_scorer("tfidf") == SparseScorer::tfidf);
  CHECK_THROWS_AS(parse_sparse_scorer("dense"), ValidationError);
}
