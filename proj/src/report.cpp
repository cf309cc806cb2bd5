#include "citepred/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"

namespace citepred {

using nlohmann::json;

void to_json(json& j, const FailureRecord& f) {
  j = json{{"instance_id", f.instance_id}, {"kind", f.kind}, {"message", f.message}};
}

void from_json(const json& j, FailureRecord& f) {
  j.at("instance_id").get_to(f.instance_id);
  j.at("kind").get_to(f.kind);
  j.at("message").get_to(f.message);
}

void to_json(json& j, const MetricReport& r) {
  j = json{{"task", r.task},
           {"label", r.label},
           {"values", r.values},
           {"instance_count", r.instance_count},
           {"failure_count", r.failure_count},
           {"failures", r.failures},
           {"notes", r.notes}};
}

void from_json(const json& j, MetricReport& r) {
  j.at("task").get_to(r.task);
  j.at("label").get_to(r.label);
  j.at("values").get_to(r.values);
  j.at("instance_count").get_to(r.instance_count);
  j.at("failure_count").get_to(r.failure_count);
  r.failures = j.value("failures", std::vector<FailureRecord>{});
  r.notes = j.value("notes", std::map<std::string, std::string>{});
}

void to_json(json& j, const Report& r) {
  j = json{{"suite", r.suite}, {"rows", r.rows}, {"notes", r.notes}};
}

void from_json(const json& j, Report& r) {
  j.at("suite").get_to(r.suite);
  j.at("rows").get_to(r.rows);
  r.notes = j.value("notes", std::map<std::string, std::string>{});
}

namespace {

int family_rank(const std::string& name) {
  static const std::array<const char*, 7> families = {"Recall", "MRR",  "NDCG",  "Hit",
                                                      "PACA",   "CDE", "Halluc"};
  const std::string family = name.substr(0, name.find('@'));
  for (std::size_t i = 0; i < families.size(); ++i) {
    if (family == families[i]) return static_cast<int>(i);
  }
  return static_cast<int>(families.size());
}

long metric_k(const std::string& name) {
  const auto at = name.find('@');
  if (at == std::string::npos) return 0;
  try {
    return std::stol(name.substr(at + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> ordered_metric_names(const Report& report) {
  std::set<std::string> names;
  for (const auto& row : report.rows) {
    for (const auto& [name, value] : row.values) names.insert(name);
  }
  std::vector<std::string> out(names.begin(), names.end());
  std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    const int fa = family_rank(a), fb = family_rank(b);
    if (fa != fb) return fa < fb;
    const long ka = metric_k(a), kb = metric_k(b);
    if (ka != kb) return ka < kb;
    return a < b;
  });
  return out;
}

std::string report_to_json(const Report& report) { return json(report).dump(2); }

Report report_from_json(const std::string& text) {
  try {
    return json::parse(text).get<Report>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed report: ") + e.what());
  }
}

std::string report_to_csv(const Report& report) {
  const auto names = ordered_metric_names(report);
  std::ostringstream out;
  out << "label,task,instances,failures";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << '\n';
  for (const auto& row : report.rows) {
    out << csv_field(row.label) << ',' << row.task << ',' << row.instance_count << ','
        << row.failure_count;
    for (const auto& n : names) {
      out << ',';
      if (const auto it = row.values.find(n); it != row.values.end()) {
        out << json(it->second).dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string report_to_table(const Report& report, int precision) {
  const auto names = ordered_metric_names(report);
  std::vector<std::string> header = {"Configuration", "Task", "N", "Failed"};
  header.insert(header.end(), names.begin(), names.end());
  std::vector<std::vector<std::string>> cells;
  for (const auto& row : report.rows) {
    std::vector<std::string> line = {row.label, std::to_string(row.task),
                                     std::to_string(row.instance_count),
                                     std::to_string(row.failure_count)};
    for (const auto& n : names) {
      const auto it = row.values.find(n);
      line.push_back(it == row.values.end() ? "-" : format_number(it->second, precision));
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
  }

  std::ostringstream out;
  if (!report.suite.empty()) out << report.suite << '\n';
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      // Labels left-aligned, numbers right-aligned.
      if (c == 0) {
        out << line[c] << std::string(width[c] - line[c].size(), ' ');
      } else {
        out << std::string(width[c] - line[c].size(), ' ') << line[c];
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& line : cells) emit(line);
  for (const auto& [key, value] : report.notes) out << key << ": " << value << '\n';
  for (const auto& row : report.rows) {
    for (const auto& [key, value] : row.notes) out << row.label << " " << key << ": " << value << '\n';
  }
  return out.str();
}

void write_report(const Report& report, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::array<std::pair<const char*, std::string>, 3> outputs = {
      std::pair<const char*, std::string>{".json", report_to_json(report)},
      {".csv", report_to_csv(report)},
      {".txt", report_to_table(report)}};
  for (const auto& [ext, text] : outputs) {
    const auto path = dir / (stem + ext);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
  }
}

Report read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return report_from_json(buffer.str());
}

}  // namespace citepred
