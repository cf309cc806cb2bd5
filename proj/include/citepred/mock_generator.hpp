#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "citepred/http.hpp"

namespace citepred {

// Offline chat-completion endpoints. Each returns an HttpTransport that
// accepts the standard request body and answers in the standard response
// shape, so the full client path is exercised without a network.

enum class MockKind {
  context_copying,   ///< predicts the retrieved titles in context order
  context_ignoring,  ///< predicts a fixed list regardless of context
  length_degrading,  ///< copies max(0, min(n, 2T − n)) of n context titles
};

struct MockOptions {
  MockKind kind = MockKind::context_copying;
  std::vector<std::string> fixed_titles;  ///< context_ignoring output
  std::size_t threshold = 10;             ///< T of length_degrading
  bool fenced = false;                    ///< wrap the JSON in a ``` block
};

HttpTransport make_mock_transport(const MockOptions& options);

/// Retrieved titles found in a rendered prompt, in context order.
std::vector<std::string> context_titles(const std::string& user_message);

/// (section, placeholder) pairs found in a rendered Task 2 prompt.
std::vector<std::pair<std::size_t, std::size_t>> prompt_placeholders(const std::string& user_message);

/// Scripted endpoint for fault injection: replays `responses` in order and
/// then repeats the last one. Records every request body it receives.
struct ScriptedEndpoint {
  std::vector<HttpResponse> responses;
  std::vector<std::string> requests;
  std::size_t failures_before_connect = 0;  ///< leading connection errors

  HttpTransport transport();
};

/// Response body carrying `content` as the first choice.
std::string chat_response_body(const std::string& content);

}  // namespace citepred
