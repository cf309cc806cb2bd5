#include "citepred/embedding.hpp"

#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "citepred/error.hpp"
#include "citepred/log.hpp"

namespace citepred {

using nlohmann::json;

std::string query_text(const std::string& title, const std::string& abstract) {
  return title + "\n\n" + abstract;
}

PrecomputedProvider::PrecomputedProvider(std::vector<EmbeddingVector> vectors) {
  validate_embeddings(vectors);
  if (!vectors.empty()) dim_ = static_cast<std::size_t>(vectors.front().values.size());
  for (auto& v : vectors) by_id_.emplace(std::move(v.id), std::move(v.values));
}

PrecomputedProvider PrecomputedProvider::from_file(const std::filesystem::path& path) {
  return PrecomputedProvider(load_vectors(path));
}

std::vector<EmbeddingVector> PrecomputedProvider::embed(const std::vector<EmbedItem>& items) {
  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    const auto it = by_id_.find(item.id);
    if (it == by_id_.end()) throw ValidationError("no precomputed vector for '" + item.id + "'");
    out.push_back({item.id, it->second});
  }
  return out;
}

HashingProvider::HashingProvider(std::size_t dim, TokenizerOptions tokenizer)
    : dim_(dim), tokenizer_(tokenizer) {
  if (dim_ < 2) throw ValidationError("hashing dimension must be at least 2");
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::vector<EmbeddingVector> HashingProvider::embed(const std::vector<EmbedItem>& items) {
  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    std::unordered_map<std::string, int> counts;
    for (auto& tok : tokenize(item.text, tokenizer_)) ++counts[tok];
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
    // Bucket 0 is a constant bias so that empty text still has a direction.
    acc[0] = 1e-3;
    for (const auto& [tok, n] : counts) {
      const std::uint64_t h = fnv1a(tok);
      const auto bucket = static_cast<Eigen::Index>(1 + h % (dim_ - 1));
      acc[bucket] += 1.0 + std::log(static_cast<double>(n));
    }
    out.push_back({item.id, (acc / acc.norm()).cast<float>()});
  }
  return out;
}

std::vector<std::string> chunk_text(const std::string& text, std::size_t max_chars) {
  if (max_chars == 0) throw ValidationError("chunk size must be positive");
  std::vector<std::string> chunks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text.size() - pos <= max_chars) {
      chunks.push_back(text.substr(pos));
      break;
    }
    std::size_t cut = pos + max_chars;
    const auto space = text.find_last_of(" \t\n", cut);
    if (space != std::string::npos && space > pos) {
      cut = space;
    } else {
      while (cut > pos && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
      if (cut == pos) cut = pos + max_chars;
    }
    chunks.push_back(text.substr(pos, cut - pos));
    pos = cut;
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) ++pos;
  }
  if (chunks.empty()) chunks.emplace_back();
  return chunks;
}

RemoteProvider::RemoteProvider(HttpTransport transport, RemoteEmbeddingConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
  if (!transport_) throw ValidationError("remote embedding provider needs a transport");
  if (config_.batch_size == 0) config_.batch_size = 1;
}

std::vector<std::vector<float>> RemoteProvider::request(const std::vector<std::string>& inputs) {
  const std::string body = json{{"model", config_.model}, {"input", inputs}}.dump();
  const int attempts = std::max(1, config_.retry.max_attempts);
  for (int attempt = 0;; ++attempt) {
    std::optional<std::chrono::milliseconds> wait;
    try {
      const HttpResponse response = transport_("/embeddings", body);
      if (response.status == 200) {
        const json j = json::parse(response.body);
        std::vector<std::vector<float>> rows(inputs.size());
        std::size_t position = 0;
        for (const auto& entry : j.at("data")) {
          const std::size_t index = entry.contains("index") ? entry.at("index").get<std::size_t>()
                                                            : position;
          if (index >= rows.size()) throw Error("embedding response index out of range");
          rows[index] = entry.at("embedding").get<std::vector<float>>();
          ++position;
        }
        for (const auto& row : rows) {
          if (row.empty()) throw Error("embedding response is missing entries");
        }
        return rows;
      }
      if (!is_retryable_status(response.status)) {
        throw TransportError("embedding service returned status " +
                                 std::to_string(response.status),
                             response.status, false);
      }
      if (attempt + 1 >= attempts) {
        throw TransportError("embedding service returned status " +
                                 std::to_string(response.status) + " after " +
                                 std::to_string(attempts) + " attempts",
                             response.status, true);
      }
      wait = retry_after(response);
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt + 1 >= attempts) throw;
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed embedding response: ") + e.what(), 200, false);
    }
    config_.retry.pause(wait ? *wait : config_.retry.backoff_for(attempt));
  }
}

std::vector<EmbeddingVector> RemoteProvider::embed(const std::vector<EmbedItem>& items) {
  // Flatten every item into chunks, then average chunk vectors per item.
  std::vector<std::string> inputs;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto chunks = chunk_text(items[i].text, config_.max_chars);
    if (chunks.size() > 1) {
      log_warning("text for '" + items[i].id + "' exceeds " + std::to_string(config_.max_chars) +
                  " characters; averaging " + std::to_string(chunks.size()) + " chunks");
    }
    for (auto& c : chunks) {
      inputs.push_back(std::move(c));
      owner.push_back(i);
    }
  }

  std::vector<Eigen::VectorXd> sums(items.size());
  std::vector<int> counts(items.size(), 0);
  for (std::size_t start = 0; start < inputs.size(); start += config_.batch_size) {
    const std::size_t stop = std::min(inputs.size(), start + config_.batch_size);
    const std::vector<std::string> batch(inputs.begin() + static_cast<std::ptrdiff_t>(start),
                                         inputs.begin() + static_cast<std::ptrdiff_t>(stop));
    const auto rows = request(batch);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t item = owner[start + r];
      if (dim_ == 0) dim_ = rows[r].size();
      if (rows[r].size() != dim_) throw Error("embedding service returned inconsistent dimensions");
      Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
      for (std::size_t c = 0; c < dim_; ++c) v[static_cast<Eigen::Index>(c)] = rows[r][c];
      if (counts[item] == 0) {
        sums[item] = v;
      } else {
        sums[item] += v;
      }
      ++counts[item];
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({items[i].id, (sums[i] / counts[i]).cast<float>()});
  }
  return out;
}

std::vector<EmbeddingVector> embed_corpus(EmbeddingProvider& provider, const Corpus& corpus,
                                          CorpusLevel level) {
  std::vector<EmbedItem> items;
  items.reserve(corpus.size());
  for (const auto& r : corpus.records()) items.push_back({r.id, r.level_text(level)});
  return provider.embed(items);
}

}  // namespace citepred
