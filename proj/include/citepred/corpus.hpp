#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "citepred/markup.hpp"

namespace citepred {

/// Nested text granularity of a paper: L1 ⊂ L2 ⊂ L3.
enum class CorpusLevel { L1 = 1, L2 = 2, L3 = 3 };

inline constexpr std::array<CorpusLevel, 3> kAllLevels = {CorpusLevel::L1, CorpusLevel::L2,
                                                          CorpusLevel::L3};

std::string_view to_string(CorpusLevel level);
/// Accepts "L1"/"l1"/"1" etc.
CorpusLevel parse_level(std::string_view text);

/// Subfield labels used when no explicit category list is configured.
const std::vector<std::string>& default_categories();

struct ReferenceDescriptor {
  std::string title;  ///< normalized title
  std::optional<std::string> id;

  bool operator==(const ReferenceDescriptor&) const = default;
};

struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::string domain_category;
  std::vector<std::string> authors;
  int year = 0;
  std::string venue;
  std::string level1_text;
  std::string level2_text;
  std::string level3_text;
  std::vector<ReferenceDescriptor> references;

  /// No introduction heading was found; level2_text equals level1_text.
  bool empty_introduction = false;
  /// At least one raw reference had no usable title and was dropped.
  bool malformed_references = false;
  /// Body sections with citation markers still in place (references and
  /// abstract excluded). Needed to carve position-level instances.
  std::vector<SectionText> sections;

  const std::string& level_text(CorpusLevel level) const;

  bool operator==(const PaperRecord&) const = default;
};

void to_json(nlohmann::json& j, const PaperRecord& record);
/// Throws ValidationError on missing keys or wrong types.
void from_json(const nlohmann::json& j, PaperRecord& record);

/// Pre-extracted paper as it arrives from the crawler. Either `sections` or
/// `body` carries the full text.
struct RawPaper {
  std::string id;
  std::string title;
  std::string abstract;
  std::string domain_category;
  std::vector<std::string> authors;
  int year = 0;
  std::string venue;
  std::string body;
  std::vector<SectionText> sections;
  struct Reference {
    std::string title;
    std::optional<std::string> id;
  };
  std::vector<Reference> references;
};

RawPaper raw_paper_from_json(const nlohmann::json& j);
nlohmann::json raw_paper_to_json(const RawPaper& raw);

struct IngestOptions {
  /// When non-empty, domain_category must be one of these labels.
  std::vector<std::string> categories;
};

/// Builds the three text levels. Throws ValidationError when the title or
/// abstract is missing or the category is not configured.
PaperRecord ingest_paper(const RawPaper& raw, const IngestOptions& options = {});

/// Immutable, id-ordered set of papers with unique ids.
class Corpus {
 public:
  Corpus() = default;
  /// Throws ValidationError naming the first duplicated id.
  explicit Corpus(std::vector<PaperRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<PaperRecord>& records() const noexcept { return records_; }

  const PaperRecord* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  /// Lookup by normalized title; the smallest id wins on title clashes.
  const PaperRecord* find_by_title(std::string_view normalized_title) const;

  bool operator==(const Corpus& other) const { return records_ == other.records_; }

 private:
  std::vector<PaperRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_title_;
};

struct RemovalReport {
  Corpus corpus;
  std::size_t removed = 0;
  std::vector<std::string> not_found;  ///< sorted
};

RemovalReport remove_papers(const Corpus& corpus, const std::set<std::string>& ids);

/// Writes one JSON object per line, UTF-8, in id order.
void persist_corpus(const Corpus& corpus, const std::filesystem::path& path);
/// Throws LoadError carrying the 1-based line of a malformed record or the
/// name of a duplicated id. Nothing is returned on error.
Corpus load_corpus(const std::filesystem::path& path);

/// Union of both corpora. Records with the same normalized title (or the
/// same id) collapse to the one with the longer level3_text; on equal length
/// the base copy stays.
Corpus incremental_merge(const Corpus& base, const Corpus& batch);

/// True when L1 is a prefix of L2 and L2 a prefix of L3.
bool levels_nested(const PaperRecord& record);

}  // namespace citepred
