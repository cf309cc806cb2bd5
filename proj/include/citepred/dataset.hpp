#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "citepred/corpus.hpp"

namespace citepred {

/// Whole-paper reference-list prediction item.
struct Task1Instance {
  std::string query_id;
  std::string title;
  std::string abstract;
  std::vector<std::string> ground_truth_refs;  ///< normalized titles, reference order

  bool operator==(const Task1Instance&) const = default;
};

/// One citation-dense section with placeholders `[ref]_1 … [ref]_m`.
/// `targets[i - 1]` is the normalized ground-truth title of `[ref]_i`.
struct Task2Section {
  std::string heading;
  std::string text;
  std::vector<std::string> targets;

  bool operator==(const Task2Section&) const = default;
};

struct Task2Instance {
  std::string query_id;
  std::string title;
  std::string abstract;
  std::vector<Task2Section> sections;

  std::size_t placeholder_count() const;
  bool operator==(const Task2Instance&) const = default;
};

/// Literal placeholder token, 1-based.
std::string placeholder_token(std::size_t index);

struct Exclusion {
  std::string id;
  std::string reason;
};

template <typename Instance>
struct DatasetBuild {
  std::vector<Instance> instances;
  std::vector<Exclusion> exclusions;
  /// Query papers that must leave the retrieval corpus.
  std::set<std::string> removal_ids;
};

/// Keeps papers whose reference lists are non-empty, duplicate-free and free
/// of malformed entries.
DatasetBuild<Task1Instance> build_task1(const Corpus& corpus);

struct Task2Options {
  std::size_t max_sections = 3;
  std::size_t max_refs_per_section = 3;
  /// A paper is dropped when one reference is cited more often than this
  /// inside a single section.
  std::size_t max_occurrences_per_section = 10;
};

/// Picks the most citation-dense sections of each paper and keeps
/// placeholders for the most frequent resolvable references in each.
DatasetBuild<Task2Instance> build_task2(const Corpus& corpus, const Task2Options& options = {});

/// True when the section/reference/occurrence caps hold and every placeholder
/// in the text has exactly one target (and vice versa).
bool satisfies_task2_caps(const Task2Instance& instance, const Task2Options& options = {});

struct LeakageReport {
  bool passed = true;
  std::vector<std::string> offending_ids;  ///< sorted
};

LeakageReport verify_no_leakage(const std::vector<std::string>& query_ids, const Corpus& corpus);
LeakageReport verify_no_leakage(const std::vector<Task1Instance>& instances, const Corpus& corpus);
LeakageReport verify_no_leakage(const std::vector<Task2Instance>& instances, const Corpus& corpus);

void save_task1(const std::vector<Task1Instance>& instances, const std::filesystem::path& path);
std::vector<Task1Instance> load_task1(const std::filesystem::path& path);
void save_task2(const std::vector<Task2Instance>& instances, const std::filesystem::path& path);
std::vector<Task2Instance> load_task2(const std::filesystem::path& path);

}  // namespace citepred
