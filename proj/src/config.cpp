#include "citepred/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "citepred/error.hpp"
#include "citepred/text.hpp"

namespace citepred {

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw LoadError("expected 'key = value'", line_no);
    std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) throw LoadError("empty key", line_no);
    if (!out.emplace(key, trim(stripped.substr(eq + 1))).second) {
      throw LoadError("key '" + key + "' given twice", line_no);
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("'" + key + "' expects an integer, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("'" + key + "' expects a number, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "yes" || value == "1") return true;
  if (value == "off" || value == "false" || value == "no" || value == "0") return false;
  throw ValidationError("'" + key + "' expects on/off, got '" + value + "'");
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const long long v = parse_int(key, value);
  if (v < 0) throw ValidationError("'" + key + "' must not be negative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_counts(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value)) out.push_back(parse_count(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  return out.str();
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"corpus", [](auto& c, auto&, auto& v) { c.corpus = v; }},
      {"task1", [](auto& c, auto&, auto& v) { c.task1 = v; }},
      {"task2", [](auto& c, auto&, auto& v) { c.task2 = v; }},
      {"index_dir", [](auto& c, auto&, auto& v) { c.index_dir = v; }},
      {"vectors", [](auto& c, auto&, auto& v) { c.vectors = v; }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"task", [](auto& c, auto& k, auto& v) { c.task = static_cast<int>(parse_int(k, v)); }},
      {"scorer", [](auto& c, auto&, auto& v) { c.scorer = v; }},
      {"levels",
       [](auto& c, auto&, auto& v) {
         c.levels.clear();
         for (const auto& item : split_list(v)) c.levels.push_back(parse_level(item));
       }},
      {"fusion", [](auto& c, auto& k, auto& v) { c.fusion = parse_bool(k, v); }},
      {"k", [](auto& c, auto& k, auto& v) { c.k = parse_count(k, v); }},
      {"rrf_c", [](auto& c, auto& k, auto& v) { c.rrf_c = parse_real(k, v); }},
      {"dense_mode", [](auto& c, auto&, auto& v) { c.dense_mode = parse_search_mode(v); }},
      {"hashing_dim", [](auto& c, auto& k, auto& v) { c.hashing_dim = parse_count(k, v); }},
      {"generator", [](auto& c, auto&, auto& v) { c.generator = v; }},
      {"endpoint_url", [](auto& c, auto&, auto& v) { c.endpoint_url = v; }},
      {"endpoint_model", [](auto& c, auto&, auto& v) { c.endpoint_model = v; }},
      {"api_key_env", [](auto& c, auto&, auto& v) { c.api_key_env = v; }},
      {"temperature", [](auto& c, auto& k, auto& v) { c.temperature = parse_real(k, v); }},
      {"presence_penalty",
       [](auto& c, auto& k, auto& v) { c.presence_penalty = parse_real(k, v); }},
      {"max_tokens",
       [](auto& c, auto& k, auto& v) { c.max_tokens = static_cast<int>(parse_int(k, v)); }},
      {"mock_threshold", [](auto& c, auto& k, auto& v) { c.mock_threshold = parse_count(k, v); }},
      {"R", [](auto& c, auto& k, auto& v) { c.R = static_cast<int>(parse_int(k, v)); }},
      {"noise", [](auto& c, auto& k, auto& v) { c.noise = parse_real(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(parse_int(k, v)); }},
      {"workers", [](auto& c, auto& k, auto& v) { c.workers = parse_count(k, v); }},
      {"recall_k", [](auto& c, auto& k, auto& v) { c.recall_k = parse_counts(k, v); }},
      {"ndcg_k", [](auto& c, auto& k, auto& v) { c.ndcg_k = parse_counts(k, v); }},
      {"hit_k", [](auto& c, auto& k, auto& v) { c.hit_k = parse_counts(k, v); }},
      {"paca_k", [](auto& c, auto& k, auto& v) { c.paca_k = parse_counts(k, v); }},
      {"retriever_k", [](auto& c, auto& k, auto& v) { c.retriever_k = parse_counts(k, v); }},
      {"hit_variant", [](auto& c, auto&, auto& v) { c.hit_variant = parse_hit_variant(v); }},
      {"fuzzy_distance", [](auto& c, auto& k, auto& v) { c.fuzzy_distance = parse_count(k, v); }},
      {"depth_values",
       [](auto& c, auto& k, auto& v) {
         c.depth_values.clear();
         for (const auto& item : split_list(v)) {
           c.depth_values.push_back(static_cast<int>(parse_int(k, item)));
         }
       }},
      {"noise_values",
       [](auto& c, auto& k, auto& v) {
         c.noise_values.clear();
         for (const auto& item : split_list(v)) c.noise_values.push_back(parse_real(k, item));
       }},
  };
  return table;
}

void require_positive(const std::vector<std::size_t>& ks, const char* name) {
  for (auto k : ks) {
    if (k == 0) throw ValidationError(std::string(name) + " values must be positive");
  }
}

void require_path(const std::filesystem::path& p, const char* name) {
  if (!p.empty() && !std::filesystem::exists(p)) {
    throw ValidationError(std::string(name) + " path '" + p.string() + "' does not exist");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require_path(corpus, "corpus");
  require_path(task1, "task1");
  require_path(task2, "task2");
  require_path(index_dir, "index_dir");
  require_path(vectors, "vectors");
  if (task != 1 && task != 2) throw ValidationError("task must be 1 or 2");
  if (k == 0) throw ValidationError("k must be positive");
  if (!(rrf_c > 0.0)) throw ValidationError("rrf_c must be positive");
  if (levels.empty()) throw ValidationError("at least one level is required");
  if (R <= 0) throw ValidationError("R must be positive");
  if (!(noise >= 0.0 && noise <= 1.0)) throw ValidationError("noise must lie in [0, 1]");
  for (double n : noise_values) {
    if (!(n >= 0.0 && n <= 1.0)) throw ValidationError("noise_values must lie in [0, 1]");
  }
  for (int r : depth_values) {
    if (r <= 0) throw ValidationError("depth_values must be positive");
  }
  if (workers == 0) throw ValidationError("workers must be positive");
  require_positive(recall_k, "recall_k");
  require_positive(ndcg_k, "ndcg_k");
  require_positive(hit_k, "hit_k");
  require_positive(paca_k, "paca_k");
  require_positive(retriever_k, "retriever_k");
}

ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& values,
                                        const ExperimentConfig& defaults) {
  ExperimentConfig config = defaults;
  for (const auto& [key, value] : values) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ValidationError("unknown configuration key '" + key + "'");
    it->second(config, key, value);
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig config = config_from_key_values(parse_key_values(buffer.str()));
  const auto base = path.parent_path();
  for (auto* p : {&config.corpus, &config.task1, &config.task2, &config.index_dir,
                  &config.vectors, &config.output_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return config;
}

std::string config_to_text(const ExperimentConfig& c) {
  std::vector<std::string> levels;
  for (auto l : c.levels) levels.emplace_back(to_string(l));
  std::ostringstream out;
  out << "corpus = " << c.corpus.string() << '\n'
      << "task1 = " << c.task1.string() << '\n'
      << "task2 = " << c.task2.string() << '\n'
      << "index_dir = " << c.index_dir.string() << '\n'
      << "vectors = " << c.vectors.string() << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "task = " << c.task << '\n'
      << "scorer = " << c.scorer << '\n'
      << "levels = " << join(levels) << '\n'
      << "fusion = " << (c.fusion ? "on" : "off") << '\n'
      << "k = " << c.k << '\n'
      << "rrf_c = " << c.rrf_c << '\n'
      << "dense_mode = " << to_string(c.dense_mode) << '\n'
      << "hashing_dim = " << c.hashing_dim << '\n'
      << "generator = " << c.generator << '\n'
      << "endpoint_url = " << c.endpoint_url << '\n'
      << "endpoint_model = " << c.endpoint_model << '\n'
      << "api_key_env = " << c.api_key_env << '\n'
      << "temperature = " << c.temperature << '\n'
      << "presence_penalty = " << c.presence_penalty << '\n'
      << "max_tokens = " << c.max_tokens << '\n'
      << "mock_threshold = " << c.mock_threshold << '\n'
      << "R = " << c.R << '\n'
      << "noise = " << c.noise << '\n'
      << "seed = " << c.seed << '\n'
      << "workers = " << c.workers << '\n'
      << "recall_k = " << join(c.recall_k) << '\n'
      << "ndcg_k = " << join(c.ndcg_k) << '\n'
      << "hit_k = " << join(c.hit_k) << '\n'
      << "paca_k = " << join(c.paca_k) << '\n'
      << "retriever_k = " << join(c.retriever_k) << '\n'
      << "hit_variant = " << to_string(c.hit_variant) << '\n'
      << "fuzzy_distance = " << c.fuzzy_distance << '\n'
      << "depth_values = " << join(c.depth_values) << '\n'
      << "noise_values = " << join(c.noise_values) << '\n';
  return out.str();
}

}  // namespace citepred
