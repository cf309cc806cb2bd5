#include "pipeline.hpp"

#include <map>
#include <set>

#include "citepred/sparse.hpp"

namespace fixture {

PlantedPipeline build_planted_pipeline(const citepred::PlantedOptions& options) {
  PlantedPipeline p;
  p.planted = citepred::make_planted_corpus(options);
  p.full = citepred::ingest_all(p.planted.papers);
  auto t1 = citepred::build_task1(p.full);
  auto t2 = citepred::build_task2(p.full);
  p.task1 = std::move(t1.instances);
  p.task2 = std::move(t2.instances);
  std::set<std::string> removal = t1.removal_ids;
  removal.insert(t2.removal_ids.begin(), t2.removal_ids.end());
  p.retrieval = citepred::remove_papers(p.full, removal).corpus;

  std::map<citepred::CorpusLevel, std::shared_ptr<const citepred::InvertedIndex>> indexes;
  for (auto level : citepred::kAllLevels) {
    indexes[level] = std::make_shared<const citepred::InvertedIndex>(
        citepred::InvertedIndex::build(p.retrieval, level));
  }
  p.bm25 = std::make_shared<citepred::SparseRetriever>(indexes, citepred::SparseScorer::bm25);
  return p;
}

citepred::PaperRecord record(const std::string& id, const std::string& title,
                             const std::string& category, const std::string& body) {
  citepred::RawPaper raw;
  raw.id = id;
  raw.title = title;
  raw.abstract = "Abstract of " + title + ".";
  raw.domain_category = category;
  if (!body.empty()) raw.sections = {{"1 Introduction", body}};
  return citepred::ingest_paper(raw);
}

}  // namespace fixture
