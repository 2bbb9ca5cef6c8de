#pragma once

#include <algorithm>
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

// Top-K without removals; the state never holds more than K tuples.
class TopK {
 public:
  using Payload = ScoredEntry;
  using PrepareOp = ScoredEntry;
  struct State {
    std::vector<ScoredEntry> elems;
  };
  using Metadata = NoMetadata;
  using Query = std::vector<ScoredEntry>;

  explicit TopK(std::size_t k) : k_(k) {
    if (k == 0) throw std::invalid_argument("topk: K must be positive");
  }

  std::size_t k() const { return k_; }

  State initial() const { return {}; }
  Query query(const State& s) const { return s.elems; }
  Payload prepare(const State&, ReplicaId, const PrepareOp& op) const { return op; }

  void apply(State& s, const Payload& p) const {
    auto all = s.elems;
    all.push_back(p);
    s.elems = topK(all, k_);
  }

  std::set<OpId> maskedForever(const OpLog<Payload>& local, const State&, const OpLog<Payload>& recv,
                               const HookContext&) const {
    std::map<ElementId, Score> bestReceived;
    for (const auto& [id, env] : recv) {
      auto [it, inserted] = bestReceived.try_emplace(env.payload.id, env.payload.score);
      if (!inserted) it->second = std::max(it->second, env.payload.score);
    }
    std::set<OpId> out;
    for (const auto& [id, env] : local) {
      const auto it = bestReceived.find(env.payload.id);
      if (it != bestReceived.end() && it->second > env.payload.score) out.insert(id);
    }
    return out;
  }

  std::set<OpId> hasObservableImpact(const OpLog<Payload>& local, const State& s, const OpLog<Payload>&,
                                     const HookContext&) const {
    std::set<OpId> out;
    for (const auto& [id, env] : local) {
      if (std::find(s.elems.begin(), s.elems.end(), env.payload) != s.elems.end()) out.insert(id);
    }
    return out;
  }

  std::set<OpId> mayHaveObservableImpact(const OpLog<Payload>&, const State&, const OpLog<Payload>&,
                                         const HookContext&) const {
    return {};
  }

  std::vector<Envelope<Payload>> compact(ReplicaId, const std::vector<Envelope<Payload>>& ops) const { return ops; }
  Payload residual(const Payload& p, const std::vector<Payload>&) const { return p; }

  Metadata sendMetadata(const State&) const { return {}; }
  void receiveMetadata(State&, const Metadata&) const {}

  std::size_t payloadBytes(const Payload&) const { return size::kId + size::kScalar; }
  std::size_t metadataBytes(const Metadata&) const { return 0; }
  std::size_t stateBytes(const State& s) const { return s.elems.size() * (size::kId + size::kScalar); }

  std::string describe(const State& s) const {
    std::ostringstream os;
    for (const auto& e : s.elems) os << e;
    return os.str();
  }
  std::string describe(const Payload& p) const {
    return "add(" + std::to_string(p.id) + "," + std::to_string(p.score) + ")";
  }
  std::string describe(const Metadata&) const { return {}; }

 private:
  std::size_t k_;
};

}  // namespace nuec
