#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "nuec/core/types.hpp"

namespace nuec {

using Score = std::int64_t;

struct ScoredEntry {
  ElementId id{0};
  Score score{0};

  friend constexpr bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
  friend std::ostream& operator<<(std::ostream& os, const ScoredEntry& e) {
    return os << '(' << e.id << ',' << e.score << ')';
  }
};

// Ranking order shared by every top-K type: higher score first, then smaller id.
inline constexpr bool ranksAbove(Score s1, ElementId id1, Score s2, ElementId id2) {
  return s1 > s2 || (s1 == s2 && id1 < id2);
}

// Generic top-K: keeps the best tuple per id (by `better`), then the K best overall.
// `key(t)` yields the element id; `better(a, b)` must be a strict total order.
template <class Tuple, class Key, class Better>
std::vector<Tuple> topKBy(const std::vector<Tuple>& tuples, std::size_t k, Key key, Better better) {
  std::unordered_map<ElementId, const Tuple*> best;
  best.reserve(tuples.size());
  for (const auto& t : tuples) {
    auto [it, inserted] = best.try_emplace(key(t), &t);
    if (!inserted && better(t, *it->second)) it->second = &t;
  }
  std::vector<Tuple> out;
  out.reserve(best.size());
  for (const auto& [id, t] : best) out.push_back(*t);
  const auto keep = std::min(k, out.size());
  std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(), better);
  out.resize(keep);
  return out;
}

inline std::vector<ScoredEntry> topK(const std::vector<ScoredEntry>& entries, std::size_t k) {
  return topKBy(entries, k, [](const ScoredEntry& e) { return e.id; },
                [](const ScoredEntry& a, const ScoredEntry& b) {
                  return ranksAbove(a.score, a.id, b.score, b.id);
                });
}

}  // namespace nuec
