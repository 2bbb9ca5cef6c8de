#pragma once

#include <algorithm>
#include <map>
#include <variant>
#include <vector>

#include "nuec/types/histogram.hpp"
#include "nuec/types/top_sum.hpp"
#include "nuec/types/topk.hpp"
#include "nuec/types/topk_rmv.hpp"

// Sequential reference semantics: the query result of applying every
// generated effect operation, computed directly from the full operation log.
namespace nuec::oracle {

namespace detail {

// Best score per id, then sorted by (score desc, id asc) and cut at K.
inline std::vector<ScoredEntry> rank(const std::map<ElementId, Score>& best, std::size_t k) {
  std::vector<ScoredEntry> all;
  for (const auto& [id, score] : best) all.push_back({id, score});
  std::sort(all.begin(), all.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace detail

inline std::vector<ScoredEntry> evaluate(const TopKRmv& type, const std::vector<TopKRmv::Payload>& ops) {
  std::vector<const TopKRmv::Add*> adds;
  std::vector<const TopKRmv::Rmv*> rmvs;
  for (const auto& op : ops) {
    if (const auto* a = std::get_if<TopKRmv::Add>(&op)) {
      adds.push_back(a);
    } else {
      rmvs.push_back(&std::get<TopKRmv::Rmv>(op));
    }
  }
  std::map<ElementId, Score> best;
  for (const auto* a : adds) {
    const bool removed = std::any_of(rmvs.begin(), rmvs.end(), [&](const TopKRmv::Rmv* r) {
      return r->id == a->id && a->ts.val <= r->vc[a->ts.siteId];
    });
    if (removed) continue;
    auto [it, inserted] = best.try_emplace(a->id, a->score);
    if (!inserted) it->second = std::max(it->second, a->score);
  }
  return detail::rank(best, type.k());
}

inline std::vector<ScoredEntry> evaluate(const TopSum& type, const std::vector<TopSum::Payload>& ops) {
  std::map<ElementId, Score> sums;
  for (const auto& op : ops) sums[op.id] += op.amount;
  return detail::rank(sums, type.k());
}

inline std::vector<ScoredEntry> evaluate(const TopK& type, const std::vector<TopK::Payload>& ops) {
  std::map<ElementId, Score> best;
  for (const auto& op : ops) {
    auto [it, inserted] = best.try_emplace(op.id, op.score);
    if (!inserted) it->second = std::max(it->second, op.score);
  }
  return detail::rank(best, type.k());
}

inline BinCounts evaluate(const Histogram&, const std::vector<Histogram::Payload>& ops) {
  BinCounts total;
  for (const auto& op : ops) {
    for (const auto& [bin, n] : op.delta) total[bin] += n;
  }
  return total;
}

}  // namespace nuec::oracle
