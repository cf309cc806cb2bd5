#include "citepred/mock_generator.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"

namespace citepred {

using nlohmann::json;

std::string chat_response_body(const std::string& content) {
  return json{{"id", "mock"},
              {"object", "chat.completion"},
              {"choices",
               json::array({{{"index", 0},
                             {"message", {{"role", "assistant"}, {"content", content}}},
                             {"finish_reason", "stop"}}})}}
      .dump();
}

std::vector<std::string> context_titles(const std::string& user_message) {
  std::vector<std::string> titles;
  std::istringstream in(user_message);
  std::string line;
  bool expect_title = false;
  while (std::getline(in, line)) {
    if (line.rfind("[Retrieved ", 0) == 0) {
      expect_title = true;
      continue;
    }
    if (expect_title && line.rfind("Title: ", 0) == 0) titles.push_back(line.substr(7));
    expect_title = false;
  }
  return titles;
}

std::vector<std::pair<std::size_t, std::size_t>> prompt_placeholders(
    const std::string& user_message) {
  static const std::regex section_re(R"(^### Section (\d+):)");
  static const std::regex token_re(R"(\[ref\]_(\d+))");
  std::set<std::pair<std::size_t, std::size_t>> found;
  std::istringstream in(user_message);
  std::string line;
  std::size_t section = 0;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_search(line, m, section_re)) {
      section = std::stoul(m[1].str());
      continue;
    }
    if (section == 0) continue;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), token_re);
         it != std::sregex_iterator(); ++it) {
      found.emplace(section, std::stoul((*it)[1].str()));
    }
  }
  return {found.begin(), found.end()};
}

namespace {

std::vector<std::string> choose_titles(const MockOptions& options,
                                       const std::vector<std::string>& context) {
  switch (options.kind) {
    case MockKind::context_copying:
      return context;
    case MockKind::context_ignoring:
      return options.fixed_titles;
    case MockKind::length_degrading: {
      const long n = static_cast<long>(context.size());
      const long keep = std::clamp(2 * static_cast<long>(options.threshold) - n, 0L, n);
      return {context.begin(), context.begin() + keep};
    }
  }
  return {};
}

}  // namespace

HttpTransport make_mock_transport(const MockOptions& options) {
  return [options](const std::string& path, const std::string& body) {
    if (path != "/chat/completions") return HttpResponse{404, "unknown path", {}};
    json request = json::parse(body, nullptr, false);
    if (request.is_discarded() || !request.contains("messages")) {
      return HttpResponse{400, R"({"error":"malformed request"})", {}};
    }
    std::string system, user;
    for (const auto& m : request["messages"]) {
      const std::string role = m.value("role", "");
      if (role == "system") system = m.value("content", "");
      if (role == "user") user = m.value("content", "");
    }
    const bool task2 = system.find("\"predictions\"") != std::string::npos;
    const auto titles = choose_titles(options, context_titles(user));

    json answer;
    if (task2) {
      json predictions = json::array();
      for (const auto& [section, index] : prompt_placeholders(user)) {
        predictions.push_back({{"section", section},
                               {"placeholder", "[ref]_" + std::to_string(index)},
                               {"titles", titles}});
      }
      answer["predictions"] = std::move(predictions);
    } else {
      answer["titles"] = titles;
    }
    answer["reasoning"] = "mock";
    std::string content = answer.dump();
    if (options.fenced) content = "Here is my answer:\n```json\n" + content + "\n```\n";
    return HttpResponse{200, chat_response_body(content), {}};
  };
}

HttpTransport ScriptedEndpoint::transport() {
  auto calls = std::make_shared<std::size_t>(0);
  auto mutex = std::make_shared<std::mutex>();
  return [this, calls, mutex](const std::string&, const std::string& body) {
    std::lock_guard<std::mutex> lock(*mutex);
    requests.push_back(body);
    const std::size_t call = (*calls)++;
    if (call < failures_before_connect) throw TransportError("connection refused", 0, true);
    if (responses.empty()) throw TransportError("no scripted response", 0, false);
    const std::size_t i = std::min(call - failures_before_connect, responses.size() - 1);
    return responses[i];
  };
}

}  // namespace citepred
