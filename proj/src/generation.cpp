#include "citepred/generation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"
#include "citepred/log.hpp"
#include "citepred/text.hpp"

namespace citepred {

using nlohmann::json;

namespace {

constexpr const char* kTask1Schema =
    R"({"titles": ["<title of a cited paper>", ...], "reasoning": "<short justification>"})";
constexpr const char* kTask2Schema =
    R"({"predictions": [{"section": <section number>, "placeholder": "[ref]_<i>", )"
    R"("titles": ["<most likely title>", ...]}, ...], "reasoning": "<short justification>"})";

std::string single_line(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool space = false;
  for (char c : text) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::string system_message(int task) {
  std::ostringstream s;
  if (task == 1) {
    s << "You are an expert in scientific literature. Given a paper's title and abstract, "
         "predict the titles of the papers it cites, most likely first.\n";
  } else {
    s << "You are an expert in scientific literature. Each section of the paper below "
         "contains placeholders [ref]_i marking where a citation was removed. Numbering "
         "restarts in every section. For each placeholder, predict a ranked list of titles "
         "of the paper cited there.\n";
  }
  s << "Use the retrieved papers as context where helpful.\n"
       "Answer in strict JSON with exactly this shape and nothing else:\n"
    << (task == 1 ? kTask1Schema : kTask2Schema);
  return s.str();
}

void append_context(std::ostringstream& s, const std::string& title, const std::string& abstract,
                    const RankedList& retrieved, const Corpus& corpus, int R) {
  if (R <= 0) throw ValidationError("retrieval depth R must be positive");
  const std::size_t wanted = static_cast<std::size_t>(R);
  if (retrieved.size() < wanted) {
    log_warning("retrieval returned " + std::to_string(retrieved.size()) + " papers, fewer than R=" +
                std::to_string(R) + "; using all of them");
  }
  const std::size_t n = std::min(wanted, retrieved.size());
  s << "Query paper\nPaper title: " << single_line(title)
    << "\nAbstract: " << single_line(abstract) << "\n\n";
  s << "Retrieved papers (" << n << ")\n";
  for (std::size_t i = 0; i < n; ++i) {
    const PaperRecord* record = corpus.find(retrieved.entries[i].id);
    if (!record) {
      throw ValidationError("retrieved id '" + retrieved.entries[i].id + "' is not in the corpus");
    }
    s << "[Retrieved " << (i + 1) << "]\nTitle: " << single_line(record->title)
      << "\nContent: " << single_line(record->level1_text) << "\n";
  }
}

}  // namespace

PromptEnvelope build_prompt(const Task1Instance& instance, const RankedList& retrieved,
                            const Corpus& corpus, int R, const GenerationParams& params) {
  std::ostringstream user;
  append_context(user, instance.title, instance.abstract, retrieved, corpus, R);
  user << "\nPredict the reference list of the query paper.";
  PromptEnvelope envelope;
  envelope.task = 1;
  envelope.retrieval_depth = R;
  envelope.params = params;
  envelope.messages = {{"system", system_message(1)}, {"user", user.str()}};
  return envelope;
}

PromptEnvelope build_prompt(const Task2Instance& instance, const RankedList& retrieved,
                            const Corpus& corpus, int R, const GenerationParams& params) {
  std::ostringstream user;
  append_context(user, instance.title, instance.abstract, retrieved, corpus, R);
  user << "\nSections with placeholders\n";
  for (std::size_t s = 0; s < instance.sections.size(); ++s) {
    const auto& section = instance.sections[s];
    user << "### Section " << (s + 1) << ": " << single_line(section.heading) << "\n"
         << section.text << "\n";
  }
  user << "\nPredict the cited paper for every placeholder.";
  PromptEnvelope envelope;
  envelope.task = 2;
  envelope.retrieval_depth = R;
  envelope.params = params;
  envelope.messages = {{"system", system_message(2)}, {"user", user.str()}};
  return envelope;
}

ChatEndpoint::ChatEndpoint(std::string name, std::string model, HttpTransport transport,
                           RetryPolicy retry)
    : name_(std::move(name)),
      model_(std::move(model)),
      transport_(std::move(transport)),
      retry_(std::move(retry)) {
  if (!transport_) throw ValidationError("endpoint '" + name_ + "' has no transport");
}

std::string chat_request_body(const PromptEnvelope& envelope, const ChatEndpoint& endpoint) {
  json messages = json::array();
  for (const auto& m : envelope.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  json body{{"model", endpoint.model()},
            {"messages", std::move(messages)},
            {"max_tokens", envelope.params.max_tokens}};
  if (endpoint.sends_temperature()) body["temperature"] = envelope.params.temperature;
  if (endpoint.sends_presence_penalty()) {
    body["presence_penalty"] = envelope.params.presence_penalty;
  }
  return body.dump();
}

namespace {

bool rejects_parameter(const HttpResponse& response, std::string_view parameter) {
  return (response.status == 400 || response.status == 422) &&
         response.body.find(parameter) != std::string::npos;
}

std::string first_choice_content(const HttpResponse& response) {
  try {
    const json j = json::parse(response.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completion response: ") + e.what(),
                         response.status, false);
  }
}

}  // namespace

std::string call_generator(const PromptEnvelope& envelope, ChatEndpoint& endpoint) {
  const RetryPolicy& retry = endpoint.retry();
  const int attempts = std::max(1, retry.max_attempts);
  int failures = 0;
  while (true) {
    std::optional<std::chrono::milliseconds> wait;
    std::string reason;
    try {
      const HttpResponse response = endpoint.transport()("/chat/completions",
                                                         chat_request_body(envelope, endpoint));
      if (response.status >= 200 && response.status < 300) return first_choice_content(response);
      if (endpoint.sends_presence_penalty() && rejects_parameter(response, "presence_penalty")) {
        log_warning("endpoint '" + endpoint.name() + "' rejects presence_penalty; omitting it");
        endpoint.disable_presence_penalty();
        continue;
      }
      if (endpoint.sends_temperature() && rejects_parameter(response, "temperature")) {
        log_warning("endpoint '" + endpoint.name() + "' rejects temperature; omitting it");
        endpoint.disable_temperature();
        continue;
      }
      if (!is_retryable_status(response.status)) {
        throw TransportError("endpoint '" + endpoint.name() + "' returned status " +
                                 std::to_string(response.status),
                             response.status, false);
      }
      reason = "status " + std::to_string(response.status);
      wait = retry_after(response);
      if (++failures >= attempts) {
        throw TransportError("endpoint '" + endpoint.name() + "' failed after " +
                                 std::to_string(attempts) + " attempts (" + reason + ")",
                             response.status, true);
      }
    } catch (const TransportError& e) {
      if (!e.retryable() || e.status() != 0) throw;
      if (++failures >= attempts) {
        throw TransportError("endpoint '" + endpoint.name() + "' failed after " +
                                 std::to_string(attempts) + " attempts: " + e.what(),
                             0, true);
      }
    }
    retry.pause(wait ? *wait : retry.backoff_for(failures - 1));
  }
}

namespace {

std::optional<json> parse_object(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

std::optional<json> fenced_json(const std::string& raw) {
  std::size_t pos = 0;
  while (true) {
    const auto open = raw.find("```", pos);
    if (open == std::string::npos) return std::nullopt;
    const auto line_end = raw.find('\n', open + 3);
    if (line_end == std::string::npos) return std::nullopt;
    const auto close = raw.find("```", line_end + 1);
    if (close == std::string::npos) return std::nullopt;
    const std::string_view body(raw.data() + line_end + 1, close - line_end - 1);
    if (auto j = parse_object(body); j && j->is_object()) return j;
    pos = close + 3;
  }
}

std::vector<std::string> unique_titles(const json& array, const std::string& raw) {
  if (!array.is_array()) throw SchemaError("'titles' must be an array", raw);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& item : array) {
    if (!item.is_string()) throw SchemaError("'titles' entries must be strings", raw);
    const std::string title = item.get<std::string>();
    const std::string key = normalize_title(title);
    if (key.empty() || !seen.insert(key).second) continue;
    out.push_back(title);
  }
  return out;
}

std::size_t positive_index(const json& value, const char* field, const std::string& raw) {
  if (value.is_number_integer() || value.is_number_unsigned()) {
    const auto v = value.get<long long>();
    if (v >= 1) return static_cast<std::size_t>(v);
  } else if (value.is_string()) {
    // Accept "[ref]_3", "ref_3", "3".
    const std::string s = value.get<std::string>();
    const auto digits = s.find_last_not_of("0123456789");
    const std::string tail = digits == std::string::npos ? s : s.substr(digits + 1);
    if (!tail.empty() && tail.size() < 9) {
      const auto v = std::stoul(tail);
      if (v >= 1) return v;
    }
  }
  throw SchemaError(std::string("'") + field + "' must be a positive index", raw);
}

}  // namespace

GenerationOutput parse_prediction(const std::string& raw, int task) {
  if (task != 1 && task != 2) throw ValidationError("task must be 1 or 2");
  std::optional<json> doc = parse_object(trim(raw));
  if (!doc) doc = fenced_json(raw);
  if (!doc) throw ParseError("response contains no parseable JSON", raw);
  if (!doc->is_object()) throw SchemaError("response JSON is not an object", raw);

  GenerationOutput out;
  out.task = task;
  out.raw = raw;
  if (const auto it = doc->find("reasoning"); it != doc->end() && it->is_string()) {
    out.reasoning = it->get<std::string>();
  }

  if (task == 1) {
    const auto it = doc->find("titles");
    if (it == doc->end()) throw SchemaError("response is missing 'titles'", raw);
    out.titles = unique_titles(*it, raw);
    return out;
  }

  const auto it = doc->find("predictions");
  if (it == doc->end()) throw SchemaError("response is missing 'predictions'", raw);
  if (!it->is_array()) throw SchemaError("'predictions' must be an array", raw);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> merged;
  for (const auto& p : *it) {
    if (!p.is_object()) throw SchemaError("'predictions' entries must be objects", raw);
    const std::size_t section = p.contains("section") ? positive_index(p["section"], "section", raw)
                                                      : 1;
    if (!p.contains("placeholder")) throw SchemaError("prediction is missing 'placeholder'", raw);
    const std::size_t placeholder = positive_index(p["placeholder"], "placeholder", raw);
    if (!p.contains("titles")) throw SchemaError("prediction is missing 'titles'", raw);
    auto titles = unique_titles(p["titles"], raw);
    auto& slot = merged[{section, placeholder}];
    slot.insert(slot.end(), titles.begin(), titles.end());
  }
  for (auto& [key, titles] : merged) {
    json array(titles);
    out.placeholders.push_back({key.first, key.second, unique_titles(array, raw)});
  }
  return out;
}

std::string serialize_prediction(const GenerationOutput& output) {
  json j;
  if (output.task == 1) {
    j["titles"] = output.titles;
  } else {
    json predictions = json::array();
    for (const auto& p : output.placeholders) {
      predictions.push_back({{"section", p.section},
                             {"placeholder", placeholder_token(p.placeholder)},
                             {"titles", p.titles}});
    }
    j["predictions"] = std::move(predictions);
  }
  j["reasoning"] = output.reasoning;
  return j.dump();
}

RankedList inject_noise(const RankedList& retrieved, double ratio, const Corpus& corpus,
                        const std::set<std::string>& ground_truth_titles, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ValidationError("noise ratio must lie in [0, 1]");
  const std::size_t n = retrieved.size();
  const auto replace = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  if (replace == 0) return retrieved;

  std::unordered_set<std::string> taken;
  for (const auto& e : retrieved.entries) taken.insert(e.id);
  std::vector<std::string> pool;
  for (const auto& r : corpus.records()) {
    if (taken.count(r.id) || ground_truth_titles.count(normalize_title(r.title))) continue;
    pool.push_back(r.id);
  }
  if (pool.size() < replace) {
    throw ValidationError("noise injection needs " + std::to_string(replace) +
                          " replacement papers but only " + std::to_string(pool.size()) +
                          " are available");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < replace; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  RankedList out = retrieved;
  for (std::size_t i = 0; i < replace; ++i) out.entries[n - 1 - i].id = pool[i];
  return out;
}

}  // namespace citepred
