#include "citepred/ranked_list.hpp"

#include <algorithm>
#include <unordered_set>

namespace citepred {

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

RankedList top_k(std::vector<ScoredDoc> candidates, std::size_t k) {
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), ranks_before);
  candidates.resize(keep);
  return RankedList{std::move(candidates)};
}

bool is_well_ordered(const RankedList& list) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (!seen.insert(list.entries[i].id).second) return false;
    if (i > 0 && !ranks_before(list.entries[i - 1], list.entries[i])) return false;
  }
  return true;
}

}  // namespace citepred
