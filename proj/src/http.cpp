#include "citepred/http.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>

#include "httplib.h"

#include "citepred/error.hpp"
#include "citepred/log.hpp"

namespace citepred {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_slot() {
  static WarningSink sink;
  return sink;
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  WarningSink previous = std::move(sink_slot());
  sink_slot() = std::move(sink);
  return previous;
}

void log_warning(std::string_view message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink_slot()) {
    sink_slot()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::chrono::milliseconds RetryPolicy::backoff_for(int attempt) const {
  const double scaled =
      static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, attempt));
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

void RetryPolicy::pause(std::chrono::milliseconds d) const {
  if (sleep) {
    sleep(d);
  } else {
    std::this_thread::sleep_for(d);
  }
}

std::optional<std::chrono::milliseconds> retry_after(const HttpResponse& response) {
  const auto it = response.headers.find("retry-after");
  if (it == response.headers.end()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double seconds = std::stod(it->second, &used);
    if (used == 0 || seconds < 0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<long long>(seconds * 1000.0));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool is_retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

HttpTransport make_http_transport(const std::string& base_url, const std::string& api_key,
                                  std::chrono::milliseconds timeout) {
  // Split "scheme://host:port/prefix" into the client address and a path prefix.
  std::string host = base_url;
  std::string prefix;
  const auto scheme = base_url.find("://");
  const auto path_start = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start != std::string::npos) {
    host = base_url.substr(0, path_start);
    prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  }
  auto client = std::make_shared<httplib::Client>(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout).count();
  client->set_connection_timeout(std::max<long long>(1, secs), 0);
  client->set_read_timeout(std::max<long long>(1, secs), 0);
  client->set_write_timeout(std::max<long long>(1, secs), 0);
  auto mutex = std::make_shared<std::mutex>();

  return [client, mutex, prefix, api_key](const std::string& path, const std::string& body) {
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
    httplib::Result result;
    {
      std::lock_guard<std::mutex> lock(*mutex);
      result = client->Post(prefix + path, headers, body, "application/json");
    }
    if (!result) {
      throw TransportError("request to " + prefix + path +
                               " failed: " + httplib::to_string(result.error()),
                           0, true);
    }
    HttpResponse response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [name, value] : result->headers) response.headers[lowercase(name)] = value;
    return response;
  };
}

}  // namespace citepred
