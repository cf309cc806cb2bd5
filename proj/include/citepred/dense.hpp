#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "citepred/corpus.hpp"
#include "citepred/error.hpp"
#include "citepred/ranked_list.hpp"

namespace citepred {

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseRows = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct BasicEmbedding {
  std::string id;
  DenseVector<Scalar> values;
};

using EmbeddingVector = BasicEmbedding<float>;

enum class SearchMode { exact, approximate };

/// Coarse quantizer settings. Zero means "derive from the index size":
/// nlist = round(sqrt(n)), nprobe = ceil(3·nlist / 4). Isotropic data needs
/// that many probes for recall@10 above 0.95; clustered data can use fewer.
struct IvfParams {
  std::size_t nlist = 0;
  std::size_t nprobe = 0;
  int iterations = 15;
  std::uint64_t seed = 0x5eed;
};

/// Throws ValidationError naming the offending id when an entry is
/// non-finite, has zero norm, has a different dimension from the first
/// vector, or repeats an id.
template <typename Scalar>
void validate_embeddings(const std::vector<BasicEmbedding<Scalar>>& vectors) {
  std::unordered_set<std::string> ids;
  const Eigen::Index dim = vectors.empty() ? 0 : vectors.front().values.size();
  for (const auto& v : vectors) {
    if (!ids.insert(v.id).second) throw ValidationError("duplicate vector id '" + v.id + "'");
    if (v.values.size() != dim) {
      throw ValidationError("vector '" + v.id + "' has dimension " +
                            std::to_string(v.values.size()) + ", expected " + std::to_string(dim));
    }
    if (!v.values.allFinite()) throw ValidationError("vector '" + v.id + "' has non-finite values");
    if (!(v.values.norm() > Scalar(0))) throw ValidationError("vector '" + v.id + "' has zero norm");
  }
}

/// Row-normalized vectors of one corpus level; cosine similarity is a dot
/// product against the normalized query. Immutable after build and safe for
/// concurrent searches.
template <typename Scalar>
class BasicDenseIndex {
 public:
  using Rows = DenseRows<Scalar>;
  using Vector = DenseVector<Scalar>;

  static BasicDenseIndex build(const std::vector<BasicEmbedding<Scalar>>& vectors,
                               CorpusLevel level, const IvfParams& params = {}) {
    validate_embeddings(vectors);
    BasicDenseIndex index;
    index.level_ = level;
    index.dim_ = vectors.empty() ? 0 : vectors.front().values.size();
    index.rows_.resize(static_cast<Eigen::Index>(vectors.size()), index.dim_);
    index.ids_.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      // Normalize in double so that positive rescaling of the input does not
      // perturb the stored rows.
      const Eigen::VectorXd v = vectors[i].values.template cast<double>();
      index.rows_.row(static_cast<Eigen::Index>(i)) = (v / v.norm()).template cast<Scalar>();
      index.ids_.push_back(vectors[i].id);
    }
    index.build_ivf(params);
    return index;
  }

  CorpusLevel level() const noexcept { return level_; }
  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const Rows& rows() const noexcept { return rows_; }
  std::size_t nlist() const noexcept { return lists_.size(); }
  std::size_t nprobe() const noexcept { return nprobe_; }

  RankedList search(const Vector& query, std::size_t k, SearchMode mode = SearchMode::exact) const {
    if (k == 0) throw ValidationError("k must be at least 1");
    if (ids_.empty()) return {};
    if (query.size() != dim_) {
      throw ValidationError("query dimension " + std::to_string(query.size()) +
                            " does not match index dimension " + std::to_string(dim_));
    }
    const Scalar norm = query.norm();
    if (!query.allFinite() || !(norm > Scalar(0))) {
      throw ValidationError("query vector must be finite with non-zero norm");
    }
    const Vector q = query / norm;

    std::vector<ScoredDoc> candidates;
    if (mode == SearchMode::exact || lists_.size() < 2) {
      const Vector scores = rows_ * q;
      candidates.reserve(ids_.size());
      for (Eigen::Index i = 0; i < scores.size(); ++i) {
        candidates.push_back({ids_[static_cast<std::size_t>(i)], static_cast<double>(scores[i])});
      }
    } else {
      const Vector centroid_scores = centroids_ * q;
      std::vector<Eigen::Index> order(static_cast<std::size_t>(centroid_scores.size()));
      for (std::size_t c = 0; c < order.size(); ++c) order[c] = static_cast<Eigen::Index>(c);
      const std::size_t probe = std::min(nprobe_, order.size());
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(probe),
                        order.end(), [&](Eigen::Index a, Eigen::Index b) {
                          if (centroid_scores[a] != centroid_scores[b]) {
                            return centroid_scores[a] > centroid_scores[b];
                          }
                          return a < b;
                        });
      for (std::size_t p = 0; p < probe; ++p) {
        for (Eigen::Index row : lists_[static_cast<std::size_t>(order[p])]) {
          candidates.push_back({ids_[static_cast<std::size_t>(row)],
                                static_cast<double>(rows_.row(row).dot(q.transpose()))});
        }
      }
    }
    return top_k(std::move(candidates), k);
  }

 private:
  void build_ivf(const IvfParams& params) {
    const auto n = static_cast<Eigen::Index>(ids_.size());
    std::size_t nlist = params.nlist;
    if (nlist == 0) nlist = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    nlist = std::min<std::size_t>(nlist, static_cast<std::size_t>(n));
    if (nlist < 2) return;
    nprobe_ = params.nprobe != 0 ? params.nprobe : (3 * nlist + 3) / 4;

    // Spherical k-means with k-means++ seeding.
    std::mt19937_64 rng(params.seed);
    const auto k = static_cast<Eigen::Index>(nlist);
    centroids_.resize(k, dim_);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids_.row(0) = rows_.row(pick(rng));
    Eigen::VectorXd best = Eigen::VectorXd::Constant(n, -2.0);
    for (Eigen::Index c = 1; c < k; ++c) {
      const Vector sims = rows_ * centroids_.row(c - 1).transpose();
      for (Eigen::Index i = 0; i < n; ++i) best[i] = std::max(best[i], static_cast<double>(sims[i]));
      const Eigen::VectorXd weight = (1.0 - best.array()).max(0.0).square().matrix();
      const double total = weight.sum();
      Eigen::Index chosen = pick(rng);
      if (total > 0.0) {
        double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        for (Eigen::Index i = 0; i < n; ++i) {
          target -= weight[i];
          if (target <= 0.0) {
            chosen = i;
            break;
          }
        }
      }
      centroids_.row(c) = rows_.row(chosen);
    }

    std::vector<Eigen::Index> assignment(static_cast<std::size_t>(n), 0);
    for (int iter = 0; iter < params.iterations; ++iter) {
      const Rows sims = rows_ * centroids_.transpose();
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        sims.row(i).maxCoeff(&arg);
        if (assignment[static_cast<std::size_t>(i)] != arg) changed = true;
        assignment[static_cast<std::size_t>(i)] = arg;
      }
      Rows sums = Rows::Zero(k, dim_);
      std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assignment[static_cast<std::size_t>(i)]) += rows_.row(i);
        ++counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])];
      }
      for (Eigen::Index c = 0; c < k; ++c) {
        const Scalar len = sums.row(c).norm();
        if (counts[static_cast<std::size_t>(c)] == 0 || !(len > Scalar(0))) {
          centroids_.row(c) = rows_.row(pick(rng));
        } else {
          centroids_.row(c) = sums.row(c) / len;
        }
      }
      if (!changed && iter > 0) break;
    }

    lists_.assign(nlist, {});
    const Rows sims = rows_ * centroids_.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index arg = 0;
      sims.row(i).maxCoeff(&arg);
      lists_[static_cast<std::size_t>(arg)].push_back(i);
    }
  }

  CorpusLevel level_ = CorpusLevel::L1;
  Eigen::Index dim_ = 0;
  Rows rows_;
  std::vector<std::string> ids_;
  Rows centroids_;
  std::vector<std::vector<Eigen::Index>> lists_;
  std::size_t nprobe_ = 0;
};

using DenseIndex = BasicDenseIndex<float>;

inline RankedList dense_search(const DenseIndex& index, const DenseVector<float>& query,
                               std::size_t k, SearchMode mode = SearchMode::exact) {
  return index.search(query, k, mode);
}

std::string_view to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view text);

// ---------------------------------------------------------------------------
// Vector files
//
// JSONL:  {"id": "...", "vector": [f0, f1, ...]} per line.
// Binary: "CPVECS01" | u64 count | u32 dim | count × (u32 len, id bytes)
//         | count × dim little-endian f32, row-major.

/// Reads either format (detected by magic bytes) and validates every vector.
/// Throws LoadError naming the offending id or line.
std::vector<EmbeddingVector> load_vectors(const std::filesystem::path& path);
void save_vectors_jsonl(const std::vector<EmbeddingVector>& vectors,
                        const std::filesystem::path& path);
void save_vectors_binary(const std::vector<EmbeddingVector>& vectors,
                         const std::filesystem::path& path);

/// Index file: "CPDIDX01" | u8 level | vector payload as in the binary
/// vector format. The coarse quantizer is rebuilt on load from `params`.
void save_dense_index(const DenseIndex& index, const std::filesystem::path& path);
DenseIndex load_dense_index(const std::filesystem::path& path, const IvfParams& params = {});

}  // namespace citepred
