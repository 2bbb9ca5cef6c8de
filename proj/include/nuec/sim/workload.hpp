#pragma once

#include <random>
#include <vector>

#include "nuec/sim/config.hpp"
#include "nuec/types/histogram.hpp"
#include "nuec/types/top_sum.hpp"
#include "nuec/types/topk.hpp"
#include "nuec/types/topk_rmv.hpp"

namespace nuec::sim {

struct WorkItem {
  ReplicaId replica{0};
  bool remove{false};
  ElementId id{0};
  Score value{0};
  friend bool operator==(const WorkItem&, const WorkItem&) = default;
};

inline bool supportsRemove(DataTypeKind k) { return k == DataTypeKind::TopKRmv; }

// Uniform workload: each op goes to a random replica; removes (with
// probability removeRatio, for types that have them) target a previously
// added id, adds draw id in [1,nIds] and value in [1,maxScore].
inline std::vector<WorkItem> generateWorkload(const SimConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<ReplicaId> pickReplica(0, static_cast<ReplicaId>(cfg.nReplicas - 1));
  std::uniform_int_distribution<ElementId> pickId(1, cfg.nIds);
  std::uniform_int_distribution<Score> pickScore(1, cfg.maxScore);
  std::bernoulli_distribution isRemove(supportsRemove(cfg.dataType) ? cfg.removeRatio : 0.0);

  std::vector<WorkItem> out;
  out.reserve(cfg.nOps);
  std::vector<ElementId> added;
  std::vector<bool> known(cfg.nIds + 1, false);
  for (std::size_t i = 0; i < cfg.nOps; ++i) {
    WorkItem item;
    item.replica = pickReplica(rng);
    if (isRemove(rng) && !added.empty()) {
      std::uniform_int_distribution<std::size_t> pickAdded(0, added.size() - 1);
      item.remove = true;
      item.id = added[pickAdded(rng)];
    } else {
      item.id = pickId(rng);
      item.value = pickScore(rng);
      if (!known[item.id]) {
        known[item.id] = true;
        added.push_back(item.id);
      }
    }
    out.push_back(item);
  }
  return out;
}

inline TopKRmv::PrepareOp makePrepare(const TopKRmv&, const WorkItem& w) {
  if (w.remove) return TopKRmv::RmvOp{w.id};
  return TopKRmv::AddOp{w.id, w.value};
}
inline TopSum::PrepareOp makePrepare(const TopSum&, const WorkItem& w) { return TopSum::AddOp{w.id, w.value}; }
inline TopK::PrepareOp makePrepare(const TopK&, const WorkItem& w) { return ScoredEntry{w.id, w.value}; }
inline Histogram::PrepareOp makePrepare(const Histogram&, const WorkItem& w) { return Histogram::AddOp{w.id}; }

}  // namespace nuec::sim
