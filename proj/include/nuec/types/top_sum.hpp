#pragma once

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuec/core/data_type.hpp"
#include "nuec/size_model.hpp"
#include "nuec/types/ranking.hpp"

namespace nuec {

// Top-K over per-id sums of positive increments. Adds for ids outside the top
// stay local while the local share cannot lift the id into the top, using an
// even split of the remaining gap across replicas.
class TopSum {
 public:
  struct Add {
    ElementId id{0};
    Score amount{0};
    friend bool operator==(const Add&, const Add&) = default;
  };
  using Payload = Add;
  struct AddOp {
    ElementId id{0};
    Score amount{0};
  };
  using PrepareOp = AddOp;
  struct State {
    std::map<ElementId, Score> sums;
  };
  using Metadata = NoMetadata;
  using Query = std::vector<ScoredEntry>;

  explicit TopSum(std::size_t k) : k_(k) {
    if (k == 0) throw std::invalid_argument("top-sum: K must be positive");
  }

  std::size_t k() const { return k_; }

  State initial() const { return {}; }

  Query query(const State& s) const {
    std::vector<ScoredEntry> entries;
    entries.reserve(s.sums.size());
    for (const auto& [id, sum] : s.sums) entries.push_back({id, sum});
    return topK(entries, k_);
  }

  Payload prepare(const State&, ReplicaId, const PrepareOp& op) const {
    if (op.amount <= 0) throw std::invalid_argument("top-sum: add amount must be positive");
    return Add{op.id, op.amount};
  }

  void apply(State& s, const Payload& p) const { s.sums[p.id] += p.amount; }

  std::set<OpId> maskedForever(const OpLog<Payload>&, const State&, const OpLog<Payload>&,
                               const HookContext&) const {
    return {};
  }

  std::set<OpId> hasObservableImpact(const OpLog<Payload>& local, const State& s, const OpLog<Payload>&,
                                     const HookContext&) const {
    const auto top = query(s);
    std::set<OpId> out;
    for (const auto& [id, env] : local) {
      if (inTop(top, env.payload.id)) out.insert(id);
    }
    return out;
  }

  std::set<OpId> mayHaveObservableImpact(const OpLog<Payload>& local, const State& s, const OpLog<Payload>&,
                                         const HookContext& ctx) const {
    const auto top = query(s);
    // An under-full top admits any id, so its minimum is taken as zero.
    const double minTop = top.size() < k_ ? 0.0 : static_cast<double>(top.back().score);
    // Local unpropagated sum per id: own operations plus copies adopted from failed sources.
    std::map<ElementId, Score> localSum;
    for (const auto& [id, env] : local) {
      if (id.source == ctx.self || ctx.isFailed(id.source)) localSum[env.payload.id] += env.payload.amount;
    }
    std::set<ElementId> hot;
    for (const auto& [elem, sum] : localSum) {
      if (inTop(top, elem)) continue;
      const auto it = s.sums.find(elem);
      const double known = static_cast<double>((it == s.sums.end() ? 0 : it->second) - sum);
      const double threshold = (minTop - known) / static_cast<double>(ctx.numReplicas);
      if (static_cast<double>(sum) >= threshold) hot.insert(elem);
    }
    std::set<OpId> out;
    for (const auto& [id, env] : local) {
      if (hot.contains(env.payload.id)) out.insert(id);
    }
    return out;
  }

  // Sums the sender's own adds per id; forwarded copies travel unchanged.
  std::vector<Envelope<Payload>> compact(ReplicaId sender, const std::vector<Envelope<Payload>>& ops) const {
    std::vector<Envelope<Payload>> out;
    std::map<ElementId, std::pair<Score, std::vector<OpId>>> grouped;
    for (const auto& env : ops) {
      if (env.id.source != sender || env.compacted()) {
        out.push_back(env);
        continue;
      }
      auto& [sum, ids] = grouped[env.payload.id];
      sum += env.payload.amount;
      ids.push_back(env.id);
    }
    for (auto& [elem, group] : grouped) {
      auto& [sum, ids] = group;
      out.push_back(Envelope<Payload>{compactedId(sender, ids), ids, Add{elem, sum}, false});
    }
    return out;
  }

  Payload residual(const Payload& p, const std::vector<Payload>& applied) const {
    Payload rest = p;
    for (const auto& a : applied) rest.amount -= a.amount;
    return rest;
  }

  Metadata sendMetadata(const State&) const { return {}; }
  void receiveMetadata(State&, const Metadata&) const {}

  std::size_t payloadBytes(const Payload&) const { return size::kId + size::kScalar; }
  std::size_t metadataBytes(const Metadata&) const { return 0; }
  std::size_t stateBytes(const State& s) const { return s.sums.size() * (size::kId + size::kScalar); }

  std::string describe(const State& s) const {
    std::ostringstream os;
    for (const auto& [id, sum] : s.sums) os << id << "=" << sum << ';';
    return os.str();
  }
  std::string describe(const Payload& p) const {
    return "add(" + std::to_string(p.id) + "," + std::to_string(p.amount) + ")";
  }
  std::string describe(const Metadata&) const { return {}; }

 private:
  static bool inTop(const Query& top, ElementId id) {
    for (const auto& e : top) {
      if (e.id == id) return true;
    }
    return false;
  }

  std::size_t k_;
};

}  // namespace nuec
