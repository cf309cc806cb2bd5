#include "citepred/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"
#include "citepred/text.hpp"

namespace citepred {

using nlohmann::json;

std::string_view to_string(CorpusLevel level) {
  switch (level) {
    case CorpusLevel::L1:
      return "L1";
    case CorpusLevel::L2:
      return "L2";
    case CorpusLevel::L3:
      return "L3";
  }
  return "L?";
}

CorpusLevel parse_level(std::string_view text) {
  if (text == "L1" || text == "l1" || text == "1") return CorpusLevel::L1;
  if (text == "L2" || text == "l2" || text == "2") return CorpusLevel::L2;
  if (text == "L3" || text == "l3" || text == "3") return CorpusLevel::L3;
  throw ValidationError("unknown corpus level '" + std::string(text) + "'");
}

const std::vector<std::string>& default_categories() {
  static const std::vector<std::string> labels = {
      "AI & ML",  "DB & DM",          "Systems",  "Networking",   "Security & Privacy",
      "Theory",   "Graphics & Vision", "HCI",      "Software Eng", "Architecture"};
  return labels;
}

const std::string& PaperRecord::level_text(CorpusLevel level) const {
  switch (level) {
    case CorpusLevel::L1:
      return level1_text;
    case CorpusLevel::L2:
      return level2_text;
    case CorpusLevel::L3:
      return level3_text;
  }
  return level1_text;
}

// ---------------------------------------------------------------------------
// JSON mapping

void to_json(json& j, const PaperRecord& r) {
  json refs = json::array();
  for (const auto& ref : r.references) {
    json o = {{"title", ref.title}};
    if (ref.id) o["id"] = *ref.id;
    refs.push_back(std::move(o));
  }
  j = json{{"id", r.id},
           {"title", r.title},
           {"abstract", r.abstract},
           {"domain_category", r.domain_category},
           {"authors", r.authors},
           {"year", r.year},
           {"venue", r.venue},
           {"level1_text", r.level1_text},
           {"level2_text", r.level2_text},
           {"level3_text", r.level3_text},
           {"references", std::move(refs)}};
  if (r.empty_introduction) j["empty_introduction"] = true;
  if (r.malformed_references) j["malformed_references"] = true;
  if (!r.sections.empty()) {
    json secs = json::array();
    for (const auto& s : r.sections) secs.push_back({{"heading", s.heading}, {"text", s.text}});
    j["sections"] = std::move(secs);
  }
}

namespace {

const json& require(const json& j, const char* key, json::value_t type) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
  const bool ok = it->type() == type ||
                  (type == json::value_t::number_integer &&
                   it->type() == json::value_t::number_unsigned);
  if (!ok) throw ValidationError(std::string("key '") + key + "' has the wrong type");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  return require(j, key, json::value_t::string).get<std::string>();
}

std::vector<SectionText> sections_from_json(const json& arr) {
  std::vector<SectionText> out;
  for (const auto& s : arr) {
    if (!s.is_object()) throw ValidationError("section entries must be objects");
    out.push_back({s.value("heading", std::string{}), require_string(s, "text")});
  }
  return out;
}

}  // namespace

void from_json(const json& j, PaperRecord& r) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  r.id = require_string(j, "id");
  if (r.id.empty()) throw ValidationError("empty id");
  r.title = require_string(j, "title");
  r.abstract = require_string(j, "abstract");
  r.domain_category = require_string(j, "domain_category");
  r.authors.clear();
  for (const auto& a : require(j, "authors", json::value_t::array)) {
    if (!a.is_string()) throw ValidationError("authors must be strings");
    r.authors.push_back(a.get<std::string>());
  }
  r.year = require(j, "year", json::value_t::number_integer).get<int>();
  r.venue = require_string(j, "venue");
  r.level1_text = require_string(j, "level1_text");
  r.level2_text = require_string(j, "level2_text");
  r.level3_text = require_string(j, "level3_text");
  r.references.clear();
  for (const auto& ref : require(j, "references", json::value_t::array)) {
    if (!ref.is_object()) throw ValidationError("reference entries must be objects");
    ReferenceDescriptor d{require_string(ref, "title"), std::nullopt};
    if (d.title.empty()) throw ValidationError("reference with empty title");
    if (ref.contains("id") && !ref["id"].is_null()) d.id = ref["id"].get<std::string>();
    r.references.push_back(std::move(d));
  }
  r.empty_introduction = j.value("empty_introduction", false);
  r.malformed_references = j.value("malformed_references", false);
  r.sections.clear();
  if (j.contains("sections")) r.sections = sections_from_json(j["sections"]);
}

RawPaper raw_paper_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("raw paper is not a JSON object");
  RawPaper raw;
  raw.id = j.value("id", std::string{});
  raw.title = j.value("title", std::string{});
  raw.abstract = j.value("abstract", std::string{});
  raw.domain_category = j.value("domain_category", std::string{});
  raw.authors = j.value("authors", std::vector<std::string>{});
  raw.year = j.value("year", 0);
  raw.venue = j.value("venue", std::string{});
  raw.body = j.value("body", std::string{});
  if (j.contains("sections")) raw.sections = sections_from_json(j["sections"]);
  if (j.contains("references")) {
    for (const auto& ref : j["references"]) {
      RawPaper::Reference r;
      if (ref.is_string()) {
        r.title = ref.get<std::string>();
      } else if (ref.is_object()) {
        r.title = ref.value("title", std::string{});
        if (ref.contains("id") && ref["id"].is_string()) r.id = ref["id"].get<std::string>();
      }
      raw.references.push_back(std::move(r));
    }
  }
  return raw;
}

json raw_paper_to_json(const RawPaper& raw) {
  json refs = json::array();
  for (const auto& r : raw.references) {
    json o = {{"title", r.title}};
    if (r.id) o["id"] = *r.id;
    refs.push_back(std::move(o));
  }
  json j = {{"id", raw.id},
            {"title", raw.title},
            {"abstract", raw.abstract},
            {"domain_category", raw.domain_category},
            {"authors", raw.authors},
            {"year", raw.year},
            {"venue", raw.venue},
            {"references", std::move(refs)}};
  if (!raw.body.empty()) j["body"] = raw.body;
  if (!raw.sections.empty()) {
    json secs = json::array();
    for (const auto& s : raw.sections) secs.push_back({{"heading", s.heading}, {"text", s.text}});
    j["sections"] = std::move(secs);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Ingest

PaperRecord ingest_paper(const RawPaper& raw, const IngestOptions& options) {
  if (trim(raw.title).empty()) throw ValidationError("rejected '" + raw.id + "': missing title");
  if (trim(raw.abstract).empty()) {
    throw ValidationError("rejected '" + raw.id + "': missing abstract");
  }
  if (raw.id.empty()) throw ValidationError("rejected: missing id");
  if (!options.categories.empty() &&
      std::find(options.categories.begin(), options.categories.end(), raw.domain_category) ==
          options.categories.end()) {
    throw ValidationError("rejected '" + raw.id + "': unknown domain category '" +
                          raw.domain_category + "'");
  }

  PaperRecord rec;
  rec.id = raw.id;
  rec.title = raw.title;
  rec.abstract = raw.abstract;
  rec.domain_category = raw.domain_category;
  rec.authors = raw.authors;
  rec.year = raw.year;
  rec.venue = raw.venue;

  rec.level1_text = strip_citation_markers(raw.domain_category) + "\n" +
                    strip_citation_markers(trim(raw.title)) + "\n" +
                    strip_citation_markers(trim(raw.abstract));

  const std::vector<SectionText> sections =
      raw.sections.empty() ? split_sections(raw.body) : raw.sections;

  const SectionText* intro = nullptr;
  for (const auto& s : sections) {
    if (is_introduction_heading(s.heading)) {
      intro = &s;
      break;
    }
  }

  rec.level2_text = rec.level1_text;
  if (intro != nullptr && !trim(intro->text).empty()) {
    rec.level2_text += "\n\n" + strip_citation_markers(trim(intro->text));
  } else {
    rec.empty_introduction = true;
  }

  rec.level3_text = rec.level2_text;
  for (const auto& s : sections) {
    if (&s == intro || is_abstract_heading(s.heading) || is_references_heading(s.heading)) {
      continue;
    }
    const std::string body = strip_citation_markers(trim(s.text));
    const std::string heading = strip_citation_markers(trim(s.heading));
    if (body.empty() && heading.empty()) continue;
    rec.level3_text += "\n\n";
    if (!heading.empty()) rec.level3_text += heading + "\n";
    rec.level3_text += body;
  }
  for (const auto& s : sections) {
    if (is_abstract_heading(s.heading) || is_references_heading(s.heading)) continue;
    if (trim(s.text).empty()) continue;
    rec.sections.push_back({trim(s.heading), trim(s.text)});
  }

  for (const auto& ref : raw.references) {
    std::string norm = normalize_title(ref.title);
    if (norm.empty()) {
      rec.malformed_references = true;
      continue;
    }
    rec.references.push_back({std::move(norm), ref.id});
  }
  return rec;
}

bool levels_nested(const PaperRecord& r) {
  return r.level2_text.rfind(r.level1_text, 0) == 0 && r.level3_text.rfind(r.level2_text, 0) == 0;
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(std::vector<PaperRecord> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.id < b.id; });
  by_id_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!by_id_.emplace(records_[i].id, i).second) {
      throw ValidationError("duplicate id '" + records_[i].id + "'");
    }
    by_title_.emplace(normalize_title(records_[i].title), i);
  }
}

const PaperRecord* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

const PaperRecord* Corpus::find_by_title(std::string_view normalized_title) const {
  const auto it = by_title_.find(std::string(normalized_title));
  return it == by_title_.end() ? nullptr : &records_[it->second];
}

RemovalReport remove_papers(const Corpus& corpus, const std::set<std::string>& ids) {
  RemovalReport report;
  std::vector<PaperRecord> kept;
  kept.reserve(corpus.size());
  for (const auto& r : corpus.records()) {
    if (ids.count(r.id)) {
      ++report.removed;
    } else {
      kept.push_back(r);
    }
  }
  for (const auto& id : ids) {
    if (!corpus.contains(id)) report.not_found.push_back(id);
  }
  report.corpus = Corpus(std::move(kept));
  return report;
}

void persist_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  for (const auto& r : corpus.records()) {
    out << json(r).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::vector<PaperRecord> records;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    PaperRecord rec;
    try {
      from_json(json::parse(line), rec);
    } catch (const json::exception& e) {
      throw LoadError(std::string("malformed record: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw LoadError(std::string("invalid record: ") + e.what(), line_no);
    }
    if (auto [it, fresh] = seen.emplace(rec.id, line_no); !fresh) {
      throw LoadError("duplicate id '" + rec.id + "' (first seen on line " +
                          std::to_string(it->second) + ")",
                      line_no);
    }
    records.push_back(std::move(rec));
  }
  return Corpus(std::move(records));
}

Corpus incremental_merge(const Corpus& base, const Corpus& batch) {
  // Working set keyed by id; a title index points at the id holding it.
  std::map<std::string, PaperRecord> by_id;
  std::map<std::string, std::string> title_owner;
  auto insert = [&](const PaperRecord& r) {
    const std::string key = normalize_title(r.title);
    std::set<std::string> rivals;
    if (auto it = title_owner.find(key); it != title_owner.end()) rivals.insert(it->second);
    if (by_id.count(r.id)) rivals.insert(r.id);
    for (const auto& rid : rivals) {
      if (by_id.at(rid).level3_text.size() >= r.level3_text.size()) return;
    }
    for (const auto& rid : rivals) {
      title_owner.erase(normalize_title(by_id.at(rid).title));
      by_id.erase(rid);
    }
    title_owner[key] = r.id;
    by_id[r.id] = r;
  };
  for (const auto& r : base.records()) insert(r);
  for (const auto& r : batch.records()) insert(r);

  std::vector<PaperRecord> merged;
  merged.reserve(by_id.size());
  for (auto& [id, r] : by_id) merged.push_back(std::move(r));
  return Corpus(std::move(merged));
}

}  // namespace citepred
