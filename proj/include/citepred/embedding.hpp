#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "citepred/dense.hpp"
#include "citepred/http.hpp"
#include "citepred/text.hpp"

namespace citepred {

/// One text to embed. `id` is carried through to the output vector and is the
/// lookup key for precomputed providers.
struct EmbedItem {
  std::string id;
  std::string text;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// One vector per input, in input order. Identical input yields identical
  /// output.
  virtual std::vector<EmbeddingVector> embed(const std::vector<EmbedItem>& items) = 0;
  virtual std::size_t dim() const = 0;
};

/// Serves vectors loaded from a vector file. Unknown ids throw
/// ValidationError.
class PrecomputedProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(std::vector<EmbeddingVector> vectors);
  static PrecomputedProvider from_file(const std::filesystem::path& path);

  std::vector<EmbeddingVector> embed(const std::vector<EmbedItem>& items) override;
  std::size_t dim() const override { return dim_; }
  bool contains(const std::string& id) const { return by_id_.count(id) != 0; }

 private:
  std::unordered_map<std::string, DenseVector<float>> by_id_;
  std::size_t dim_ = 0;
};

/// Deterministic bag-of-words feature hashing. Needs no model and no
/// network; useful as an offline baseline and in tests.
class HashingProvider : public EmbeddingProvider {
 public:
  explicit HashingProvider(std::size_t dim = 256, TokenizerOptions tokenizer = {true, true});

  std::vector<EmbeddingVector> embed(const std::vector<EmbedItem>& items) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
  TokenizerOptions tokenizer_;
};

struct RemoteEmbeddingConfig {
  std::string model;
  std::size_t max_chars = 8000;  ///< longer texts are chunked and averaged
  std::size_t batch_size = 32;
  RetryPolicy retry;
};

/// OpenAI-style `/embeddings` endpoint: request {model, input:[...]},
/// response {data:[{index, embedding:[...]}]}.
class RemoteProvider : public EmbeddingProvider {
 public:
  RemoteProvider(HttpTransport transport, RemoteEmbeddingConfig config);

  std::vector<EmbeddingVector> embed(const std::vector<EmbedItem>& items) override;
  std::size_t dim() const override { return dim_; }

 private:
  std::vector<std::vector<float>> request(const std::vector<std::string>& inputs);

  HttpTransport transport_;
  RemoteEmbeddingConfig config_;
  std::size_t dim_ = 0;
};

/// Splits text into pieces of at most `max_chars` bytes, preferring
/// whitespace boundaries and never cutting a UTF-8 sequence.
std::vector<std::string> chunk_text(const std::string& text, std::size_t max_chars);

/// Embeds every paper of one corpus level.
std::vector<EmbeddingVector> embed_corpus(EmbeddingProvider& provider, const Corpus& corpus,
                                          CorpusLevel level);

/// Query text shared by all levels: title, blank line, abstract.
std::string query_text(const std::string& title, const std::string& abstract);

}  // namespace citepred
