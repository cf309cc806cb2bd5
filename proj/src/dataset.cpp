#include "citepred/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"
#include "citepred/text.hpp"

namespace citepred {

using nlohmann::json;

std::size_t Task2Instance::placeholder_count() const {
  std::size_t n = 0;
  for (const auto& s : sections) n += s.targets.size();
  return n;
}

std::string placeholder_token(std::size_t index) { return "[ref]_" + std::to_string(index); }

namespace {

// Empty string when the paper's references are usable as ground truth.
std::string reference_problem(const PaperRecord& r) {
  if (r.malformed_references) return "citation error";
  if (r.references.empty()) return "no references";
  std::unordered_set<std::string> seen;
  for (const auto& ref : r.references) {
    if (ref.title.empty()) return "citation error";
    if (!seen.insert(ref.title).second) return "duplicate citation";
  }
  return {};
}

bool has_valid_identifier(const ReferenceDescriptor& ref, const Corpus& corpus) {
  return (ref.id && !ref.id->empty()) || corpus.find_by_title(ref.title) != nullptr;
}

}  // namespace

DatasetBuild<Task1Instance> build_task1(const Corpus& corpus) {
  DatasetBuild<Task1Instance> out;
  for (const auto& r : corpus.records()) {
    if (auto problem = reference_problem(r); !problem.empty()) {
      out.exclusions.push_back({r.id, std::move(problem)});
      continue;
    }
    Task1Instance inst{r.id, r.title, r.abstract, {}};
    for (const auto& ref : r.references) inst.ground_truth_refs.push_back(ref.title);
    out.instances.push_back(std::move(inst));
    out.removal_ids.insert(r.id);
  }
  return out;
}

namespace {

struct SectionStats {
  std::size_t index = 0;
  std::vector<CitationMarker> markers;
  // Reference position (0-based) → occurrence count and first occurrence.
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> freq;
};

}  // namespace

DatasetBuild<Task2Instance> build_task2(const Corpus& corpus, const Task2Options& options) {
  DatasetBuild<Task2Instance> out;
  for (const auto& r : corpus.records()) {
    if (auto problem = reference_problem(r); !problem.empty()) {
      out.exclusions.push_back({r.id, std::move(problem)});
      continue;
    }

    std::vector<SectionStats> stats;
    std::string problem;
    for (std::size_t si = 0; si < r.sections.size() && problem.empty(); ++si) {
      SectionStats st;
      st.index = si;
      st.markers = find_citation_markers(r.sections[si].text);
      std::size_t occurrence = 0;
      for (const auto& m : st.markers) {
        for (int n : m.numbers) {
          if (n < 1 || static_cast<std::size_t>(n) > r.references.size()) {
            problem = "citation error";
            break;
          }
          auto& [count, first] = st.freq[static_cast<std::size_t>(n - 1)];
          if (count++ == 0) first = occurrence;
          ++occurrence;
        }
        if (!problem.empty()) break;
      }
      for (const auto& [ref, cf] : st.freq) {
        if (cf.first > options.max_occurrences_per_section) {
          problem = "reference cited more than " +
                    std::to_string(options.max_occurrences_per_section) + " times in a section";
          break;
        }
      }
      stats.push_back(std::move(st));
    }
    if (!problem.empty()) {
      out.exclusions.push_back({r.id, std::move(problem)});
      continue;
    }

    // Most-cited sections first, ties by order of appearance.
    std::vector<const SectionStats*> ranked;
    for (const auto& st : stats) {
      if (!st.markers.empty()) ranked.push_back(&st);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto* a, const auto* b) {
      return a->markers.size() > b->markers.size();
    });
    if (ranked.size() > options.max_sections) ranked.resize(options.max_sections);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto* a, const auto* b) { return a->index < b->index; });

    Task2Instance inst{r.id, r.title, r.abstract, {}};
    for (const SectionStats* st : ranked) {
      std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> candidates;
      for (const auto& entry : st->freq) {
        if (has_valid_identifier(r.references[entry.first], corpus)) candidates.push_back(entry);
      }
      std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
      });
      if (candidates.size() > options.max_refs_per_section) {
        candidates.resize(options.max_refs_per_section);
      }
      std::unordered_set<std::size_t> kept;
      for (const auto& c : candidates) kept.insert(c.first);
      if (kept.empty()) continue;

      const std::string& src = r.sections[st->index].text;
      Task2Section section{r.sections[st->index].heading, {}, {}};
      std::size_t pos = 0;
      for (const auto& m : st->markers) {
        std::vector<std::string> tokens;
        for (int n : m.numbers) {
          const auto ref = static_cast<std::size_t>(n - 1);
          if (!kept.count(ref)) continue;
          section.targets.push_back(r.references[ref].title);
          tokens.push_back(placeholder_token(section.targets.size()));
        }
        std::size_t cut = m.begin;
        if (tokens.empty()) {
          while (cut > pos && (src[cut - 1] == ' ' || src[cut - 1] == '\t')) --cut;
        }
        section.text.append(src, pos, cut - pos);
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          if (t > 0) section.text.push_back(' ');
          section.text += tokens[t];
        }
        pos = m.end;
      }
      section.text.append(src, pos, std::string::npos);
      inst.sections.push_back(std::move(section));
    }

    if (inst.sections.empty()) {
      out.exclusions.push_back({r.id, "no section with resolvable citations"});
      continue;
    }
    out.removal_ids.insert(r.id);
    out.instances.push_back(std::move(inst));
  }
  return out;
}

bool satisfies_task2_caps(const Task2Instance& inst, const Task2Options& options) {
  static const std::regex token(R"(\[ref\]_(\d+))");
  if (inst.sections.size() > options.max_sections) return false;
  for (const auto& s : inst.sections) {
    std::map<std::string, std::size_t> per_ref;
    for (const auto& t : s.targets) ++per_ref[t];
    if (per_ref.size() > options.max_refs_per_section) return false;
    for (const auto& [t, n] : per_ref) {
      if (n > options.max_occurrences_per_section) return false;
    }
    std::vector<std::size_t> seen(s.targets.size() + 1, 0);
    for (auto it = std::sregex_iterator(s.text.begin(), s.text.end(), token);
         it != std::sregex_iterator(); ++it) {
      const auto idx = std::stoul((*it)[1].str());
      if (idx == 0 || idx > s.targets.size()) return false;
      ++seen[idx];
    }
    for (std::size_t i = 1; i < seen.size(); ++i) {
      if (seen[i] != 1) return false;
    }
  }
  return true;
}

LeakageReport verify_no_leakage(const std::vector<std::string>& query_ids, const Corpus& corpus) {
  LeakageReport report;
  std::set<std::string> offending;
  for (const auto& id : query_ids) {
    if (corpus.contains(id)) offending.insert(id);
  }
  report.offending_ids.assign(offending.begin(), offending.end());
  report.passed = report.offending_ids.empty();
  return report;
}

LeakageReport verify_no_leakage(const std::vector<Task1Instance>& instances, const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& i : instances) ids.push_back(i.query_id);
  return verify_no_leakage(ids, corpus);
}

LeakageReport verify_no_leakage(const std::vector<Task2Instance>& instances, const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& i : instances) ids.push_back(i.query_id);
  return verify_no_leakage(ids, corpus);
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

template <typename Fn>
void read_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw LoadError(std::string("malformed instance: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw LoadError(std::string("invalid instance: ") + e.what(), line_no);
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void save_task1(const std::vector<Task1Instance>& instances, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& i : instances) {
    out << json{{"query_id", i.query_id},
                {"title", i.title},
                {"abstract", i.abstract},
                {"ground_truth_refs", i.ground_truth_refs}}
               .dump()
        << '\n';
  }
}

std::vector<Task1Instance> load_task1(const std::filesystem::path& path) {
  std::vector<Task1Instance> out;
  read_jsonl(path, [&](const json& j) {
    Task1Instance i{j.at("query_id").get<std::string>(), j.at("title").get<std::string>(),
                    j.at("abstract").get<std::string>(),
                    j.at("ground_truth_refs").get<std::vector<std::string>>()};
    if (i.ground_truth_refs.empty()) throw ValidationError("empty ground truth");
    out.push_back(std::move(i));
  });
  return out;
}

void save_task2(const std::vector<Task2Instance>& instances, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& i : instances) {
    json sections = json::array();
    for (const auto& s : i.sections) {
      json placeholders = json::array();
      for (std::size_t k = 0; k < s.targets.size(); ++k) {
        placeholders.push_back({{"index", k + 1}, {"title", s.targets[k]}});
      }
      sections.push_back(
          {{"heading", s.heading}, {"text", s.text}, {"placeholders", std::move(placeholders)}});
    }
    out << json{{"query_id", i.query_id},
                {"title", i.title},
                {"abstract", i.abstract},
                {"sections", std::move(sections)}}
               .dump()
        << '\n';
  }
}

std::vector<Task2Instance> load_task2(const std::filesystem::path& path) {
  std::vector<Task2Instance> out;
  read_jsonl(path, [&](const json& j) {
    Task2Instance inst{j.at("query_id").get<std::string>(), j.at("title").get<std::string>(),
                       j.at("abstract").get<std::string>(), {}};
    for (const auto& s : j.at("sections")) {
      Task2Section sec{s.value("heading", std::string{}), s.at("text").get<std::string>(), {}};
      const auto& ph = s.at("placeholders");
      sec.targets.resize(ph.size());
      std::vector<bool> filled(ph.size(), false);
      for (const auto& p : ph) {
        const auto idx = p.at("index").get<std::size_t>();
        if (idx == 0 || idx > ph.size() || filled[idx - 1]) {
          throw ValidationError("placeholder indices must be 1..m without repeats");
        }
        filled[idx - 1] = true;
        sec.targets[idx - 1] = p.at("title").get<std::string>();
      }
      inst.sections.push_back(std::move(sec));
    }
    out.push_back(std::move(inst));
  });
  return out;
}

}  // namespace citepred
