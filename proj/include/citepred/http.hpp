#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace citepred {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  ///< lowercase names
};

/// POSTs a JSON body to `path` relative to the endpoint's base address.
/// Throws TransportError when no response arrives at all.
using HttpTransport = std::function<HttpResponse(const std::string& path, const std::string& body)>;

/// Real transport backed by cpp-httplib. `base_url` like
/// "http://localhost:8000" or "https://api.example.com/v1"; a non-empty
/// `api_key` is sent as a bearer token.
HttpTransport make_http_transport(const std::string& base_url, const std::string& api_key,
                                  std::chrono::milliseconds timeout = std::chrono::seconds(120));

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{16000};
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  std::chrono::milliseconds backoff_for(int attempt) const;
  void pause(std::chrono::milliseconds d) const;
};

/// Seconds from a Retry-After header, if present and numeric.
std::optional<std::chrono::milliseconds> retry_after(const HttpResponse& response);

bool is_retryable_status(int status);

}  // namespace citepred
