#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/dataset.hpp"
#include "citepred/http.hpp"
#include "citepred/ranked_list.hpp"

namespace citepred {

struct ChatMessage {
  std::string role;  ///< "system" or "user"
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct GenerationParams {
  double temperature = 0.1;
  double presence_penalty = 1.0;
  int max_tokens = 2048;

  bool operator==(const GenerationParams&) const = default;
};

struct PromptEnvelope {
  int task = 1;
  int retrieval_depth = 0;
  std::vector<ChatMessage> messages;  ///< system first, then user
  GenerationParams params;

  bool operator==(const PromptEnvelope&) const = default;
};

/// Renders the top-R retrieved papers (title and level-1 text) into the user
/// message. Throws ValidationError when R ≤ 0 or a retrieved id is not in
/// the corpus; a list shorter than R is used whole with a warning.
PromptEnvelope build_prompt(const Task1Instance& instance, const RankedList& retrieved,
                            const Corpus& corpus, int R, const GenerationParams& params = {});
PromptEnvelope build_prompt(const Task2Instance& instance, const RankedList& retrieved,
                            const Corpus& corpus, int R, const GenerationParams& params = {});

/// Chat-completion service. Parameters the service rejects are remembered
/// and left out of later requests.
class ChatEndpoint {
 public:
  ChatEndpoint(std::string name, std::string model, HttpTransport transport,
               RetryPolicy retry = {});

  const std::string& name() const noexcept { return name_; }
  const std::string& model() const noexcept { return model_; }
  const RetryPolicy& retry() const noexcept { return retry_; }
  const HttpTransport& transport() const noexcept { return transport_; }

  bool sends_temperature() const noexcept { return send_temperature_; }
  bool sends_presence_penalty() const noexcept { return send_presence_penalty_; }
  void disable_temperature() noexcept { send_temperature_ = false; }
  void disable_presence_penalty() noexcept { send_presence_penalty_ = false; }

 private:
  std::string name_;
  std::string model_;
  HttpTransport transport_;
  RetryPolicy retry_;
  std::atomic<bool> send_temperature_{true};
  std::atomic<bool> send_presence_penalty_{true};
};

/// Request body in the chat-completion wire shape.
std::string chat_request_body(const PromptEnvelope& envelope, const ChatEndpoint& endpoint);

/// Sends the envelope and returns the first choice's message content.
/// Retries connection failures, 408, 429 (honoring Retry-After) and 5xx with
/// exponential backoff; a 400 naming `presence_penalty` or `temperature`
/// drops that parameter and resends. Throws TransportError when attempts
/// run out or on a non-retryable status.
std::string call_generator(const PromptEnvelope& envelope, ChatEndpoint& endpoint);

struct PlaceholderPrediction {
  std::size_t section = 0;      ///< 1-based
  std::size_t placeholder = 0;  ///< 1-based, matches [ref]_i
  std::vector<std::string> titles;

  bool operator==(const PlaceholderPrediction&) const = default;
};

struct GenerationOutput {
  int task = 1;
  std::vector<std::string> titles;                 ///< Task 1
  std::vector<PlaceholderPrediction> placeholders;  ///< Task 2, sorted by (section, placeholder)
  std::string reasoning;
  std::string raw;

  /// Equality ignores `raw`.
  bool operator==(const GenerationOutput& other) const {
    return task == other.task && titles == other.titles && placeholders == other.placeholders &&
           reasoning == other.reasoning;
  }
};

/// Strict JSON first, then the first fenced code block holding a JSON object.
/// Titles are deduplicated by normalized form, keeping the first occurrence.
/// Throws ParseError when no JSON is found and SchemaError when the JSON
/// lacks the task's fields.
GenerationOutput parse_prediction(const std::string& raw, int task);

std::string serialize_prediction(const GenerationOutput& output);

/// Replaces ⌊ratio·n⌋ entries, lowest-ranked first, with papers drawn
/// uniformly from the corpus that are neither retrieved nor ground truth.
/// Replacements keep the score of the entry they displace. Throws
/// ValidationError for a ratio outside [0, 1] or a pool that is too small.
RankedList inject_noise(const RankedList& retrieved, double ratio, const Corpus& corpus,
                        const std::set<std::string>& ground_truth_titles, std::uint64_t seed);

}  // namespace citepred
