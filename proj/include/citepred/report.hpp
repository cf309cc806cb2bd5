#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace citepred {

/// One instance that could not be scored normally.
struct FailureRecord {
  std::string instance_id;
  std::string kind;  ///< "parse", "schema", "transport", ...
  std::string message;

  bool operator==(const FailureRecord&) const = default;
};

/// Metric values of one configuration. Keys look like "Recall@20", "PACA@10",
/// "CDE", "Halluc". `instance_count` counts instances that produced output;
/// failed instances are listed in `failures` and scored as empty predictions.
struct MetricReport {
  int task = 1;
  std::string label;
  std::map<std::string, double> values;
  std::size_t instance_count = 0;
  std::size_t failure_count = 0;
  std::vector<FailureRecord> failures;
  std::map<std::string, std::string> notes;

  bool operator==(const MetricReport&) const = default;
};

/// A set of configurations compared side by side (ablation, sweep, ...).
struct Report {
  std::string suite;
  std::vector<MetricReport> rows;
  std::map<std::string, std::string> notes;

  bool operator==(const Report&) const = default;
};

void to_json(nlohmann::json& j, const FailureRecord& f);
void from_json(const nlohmann::json& j, FailureRecord& f);
void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);
void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

/// Metric names ordered by family (Recall, MRR, NDCG, Hit, PACA, CDE, Halluc)
/// and then by k.
std::vector<std::string> ordered_metric_names(const Report& report);

std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);
std::string report_to_csv(const Report& report);
std::string report_to_table(const Report& report, int precision = 4);

/// Writes <stem>.json, <stem>.csv and <stem>.txt into `dir`.
void write_report(const Report& report, const std::filesystem::path& dir, const std::string& stem);
Report read_report(const std::filesystem::path& path);

}  // namespace citepred
