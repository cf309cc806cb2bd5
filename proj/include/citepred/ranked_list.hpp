#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace citepred {

struct ScoredDoc {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

/// Ordered retrieval output: scores non-increasing, ties by ascending id,
/// ids unique.
struct RankedList {
  std::vector<ScoredDoc> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  std::vector<std::string> ids() const;

  bool operator==(const RankedList&) const = default;
};

/// Strict ordering used by every ranking stage.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

/// Sorts candidates into ranking order and keeps the first `k`.
RankedList top_k(std::vector<ScoredDoc> candidates, std::size_t k);

/// True when `list` satisfies the ordering and uniqueness invariants.
bool is_well_ordered(const RankedList& list);

}  // namespace citepred
