#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nuec/core/data_type.hpp"
#include "nuec/size_model.hpp"
#include "nuec/types/ranking.hpp"
#include "nuec/types/vector_clock.hpp"

namespace nuec {

// Top-K with add-wins removals. Removes carry the vector clock of the source
// at prepare time and only affect adds reflected in that clock.
class TopKRmv {
 public:
  struct Tuple {
    ElementId id{0};
    Score score{0};
    Timestamp ts;
    friend constexpr auto operator<=>(const Tuple&, const Tuple&) = default;
  };

  struct Add {
    ElementId id{0};
    Score score{0};
    Timestamp ts;
    friend bool operator==(const Add&, const Add&) = default;
  };
  struct Rmv {
    ElementId id{0};
    VectorClock vc;
    friend bool operator==(const Rmv&, const Rmv&) = default;
  };
  using Payload = std::variant<Add, Rmv>;

  struct AddOp {
    ElementId id{0};
    Score score{0};
  };
  struct RmvOp {
    ElementId id{0};
  };
  using PrepareOp = std::variant<AddOp, RmvOp>;

  struct State {
    std::map<ElementId, std::vector<Tuple>> elems;
    std::map<ElementId, VectorClock> removes;
    VectorClock vc;
  };
  using Metadata = VectorClock;
  using Query = std::vector<ScoredEntry>;

  explicit TopKRmv(std::size_t k) : k_(k) {
    if (k == 0) throw std::invalid_argument("top-k-rmv: K must be positive");
  }

  std::size_t k() const { return k_; }

  // Higher score first, then smaller id, then smaller (siteId, val).
  static bool better(const Tuple& a, const Tuple& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.id != b.id) return a.id < b.id;
    return a.ts < b.ts;
  }

  State initial() const { return {}; }

  std::vector<Tuple> topTuples(const State& s, std::size_t k) const {
    std::vector<Tuple> bests;
    bests.reserve(s.elems.size());
    for (const auto& [id, tuples] : s.elems) {
      if (tuples.empty()) continue;
      bests.push_back(*std::min_element(tuples.begin(), tuples.end(), better));
    }
    const auto keep = std::min(k, bests.size());
    std::partial_sort(bests.begin(), bests.begin() + static_cast<std::ptrdiff_t>(keep), bests.end(), better);
    bests.resize(keep);
    return bests;
  }

  Query query(const State& s) const {
    Query out;
    for (const auto& t : topTuples(s, k_)) out.push_back({t.id, t.score});
    return out;
  }

  Payload prepare(const State& s, ReplicaId self, const PrepareOp& op) const {
    if (const auto* add = std::get_if<AddOp>(&op)) {
      return Add{add->id, add->score, Timestamp{self, s.vc[self] + 1}};
    }
    return Rmv{std::get<RmvOp>(op).id, s.vc};
  }

  void apply(State& s, const Payload& p) const {
    if (const auto* add = std::get_if<Add>(&p)) {
      const auto rit = s.removes.find(add->id);
      if (rit == s.removes.end() || !rit->second.covers(add->ts)) {
        auto& tuples = s.elems[add->id];
        const Tuple t{add->id, add->score, add->ts};
        if (std::find(tuples.begin(), tuples.end(), t) == tuples.end()) tuples.push_back(t);
      }
      s.vc.raise(add->ts.siteId, add->ts.val);
      return;
    }
    const auto& rmv = std::get<Rmv>(p);
    auto& removed = s.removes[rmv.id];
    removed.mergeFrom(rmv.vc);
    auto it = s.elems.find(rmv.id);
    if (it == s.elems.end()) return;
    std::erase_if(it->second, [&](const Tuple& t) { return rmv.vc.covers(t.ts); });
    if (it->second.empty()) s.elems.erase(it);
  }

  std::set<OpId> maskedForever(const OpLog<Payload>& local, const State& s, const OpLog<Payload>& recv,
                               const HookContext&) const {
    std::set<OpId> out;
    std::map<ElementId, std::vector<std::pair<OpId, const Add*>>> localAdds;
    std::map<ElementId, std::vector<std::pair<OpId, const Rmv*>>> localRmvs;
    for (const auto& [id, env] : local) {
      if (const auto* add = std::get_if<Add>(&env.payload)) {
        localAdds[add->id].emplace_back(id, add);
      } else {
        const auto& rmv = std::get<Rmv>(env.payload);
        localRmvs[rmv.id].emplace_back(id, &rmv);
      }
    }
    for (const auto& [elem, adds] : localAdds) {
      // Every applied rmv sits in one of the logs or was masked by one that does,
      // so the pointwise max of removes[elem] covers ts iff some logged rmv does.
      const auto rit = s.removes.find(elem);
      for (const auto& [opId, a1] : adds) {
        bool masked = rit != s.removes.end() && rit->second.covers(a1->ts);
        for (const auto& [other, a2] : adds) {
          if (masked) break;
          masked = a1->ts.siteId == a2->ts.siteId && a1->score < a2->score && a1->ts.val < a2->ts.val;
        }
        if (masked) out.insert(opId);
      }
    }
    if (!localRmvs.empty()) {
      std::map<ElementId, std::vector<const VectorClock*>> allRmvs;
      auto collect = [&](const OpLog<Payload>& log) {
        for (const auto& [id, env] : log) {
          if (const auto* rmv = std::get_if<Rmv>(&env.payload); rmv && localRmvs.contains(rmv->id)) {
            allRmvs[rmv->id].push_back(&rmv->vc);
          }
        }
      };
      collect(local);
      collect(recv);
      for (const auto& [elem, rmvs] : localRmvs) {
        const auto& others = allRmvs[elem];
        for (const auto& [opId, r1] : rmvs) {
          if (std::any_of(others.begin(), others.end(),
                          [&](const VectorClock* vc2) { return happenedBefore(r1->vc, *vc2); })) {
            out.insert(opId);
          }
        }
      }
    }
    return out;
  }

  std::set<OpId> hasObservableImpact(const OpLog<Payload>& local, const State& s, const OpLog<Payload>& recv,
                                     const HookContext&) const {
    std::set<OpId> out;
    const auto top = topTuples(s, k_);
    std::map<ElementId, const VectorClock*> localRmvIds;
    for (const auto& [id, env] : local) {
      if (const auto* add = std::get_if<Add>(&env.payload)) {
        const Tuple t{add->id, add->score, add->ts};
        if (std::find(top.begin(), top.end(), t) != top.end()) out.insert(id);
      } else {
        localRmvIds.emplace(std::get<Rmv>(env.payload).id, nullptr);
      }
    }
    if (localRmvIds.empty()) return out;

    std::map<ElementId, std::vector<Tuple>> knownAdds;
    auto collect = [&](const OpLog<Payload>& log) {
      for (const auto& [id, env] : log) {
        if (const auto* add = std::get_if<Add>(&env.payload); add && localRmvIds.contains(add->id)) {
          knownAdds[add->id].push_back({add->id, add->score, add->ts});
        }
      }
    };
    collect(local);
    collect(recv);
    const auto bests = topTuples(s, k_ + 1);
    for (const auto& [id, env] : local) {
      const auto* rmv = std::get_if<Rmv>(&env.payload);
      if (rmv == nullptr) continue;
      for (const auto& t : knownAdds[rmv->id]) {
        if (rmv->vc.covers(t.ts) && wouldRankInTop(s, bests, t)) {
          out.insert(id);
          break;
        }
      }
    }
    return out;
  }

  std::set<OpId> mayHaveObservableImpact(const OpLog<Payload>&, const State&, const OpLog<Payload>&,
                                         const HookContext&) const {
    return {};
  }

  std::vector<Envelope<Payload>> compact(ReplicaId, const std::vector<Envelope<Payload>>& ops) const { return ops; }
  Payload residual(const Payload& p, const std::vector<Payload>&) const { return p; }

  Metadata sendMetadata(const State& s) const { return s.vc; }
  void receiveMetadata(State& s, const Metadata& vc) const { s.vc.mergeFrom(vc); }

  std::size_t payloadBytes(const Payload& p) const {
    if (std::holds_alternative<Add>(p)) return size::kId + size::kScalar + size::kTimestamp;
    return size::kId + std::get<Rmv>(p).vc.bytes();
  }
  std::size_t metadataBytes(const Metadata& vc) const { return vc.bytes(); }
  std::size_t stateBytes(const State& s) const {
    std::size_t bytes = s.vc.bytes();
    for (const auto& [id, tuples] : s.elems) bytes += tuples.size() * (size::kId + size::kScalar + size::kTimestamp);
    for (const auto& [id, vc] : s.removes) bytes += size::kId + vc.bytes();
    return bytes;
  }

  std::string describe(const State& s) const {
    std::ostringstream os;
    os << "elems{";
    for (const auto& [id, tuples] : s.elems) {
      auto sorted = tuples;
      std::sort(sorted.begin(), sorted.end());
      for (const auto& t : sorted) os << '<' << t.id << ',' << t.score << ",r" << t.ts.siteId << ':' << t.ts.val << '>';
    }
    os << "} removes{";
    for (const auto& [id, vc] : s.removes) os << id << ':' << vc.str();
    os << "} vc" << s.vc.str();
    return os.str();
  }
  std::string describe(const Payload& p) const {
    std::ostringstream os;
    if (const auto* add = std::get_if<Add>(&p)) {
      os << "add(" << add->id << ',' << add->score << ",<r" << add->ts.siteId << ',' << add->ts.val << ">)";
    } else {
      const auto& rmv = std::get<Rmv>(p);
      os << "rmv(" << rmv.id << ',' << rmv.vc.str() << ')';
    }
    return os.str();
  }
  std::string describe(const Metadata& vc) const { return vc.str(); }

 private:
  // Whether t would be in topK(S.elems U {t}); `bests` is the top K+1 of S.elems.
  bool wouldRankInTop(const State& s, const std::vector<Tuple>& bests, const Tuple& t) const {
    if (auto it = s.elems.find(t.id); it != s.elems.end()) {
      for (const auto& other : it->second) {
        if (better(other, t)) return false;
      }
    }
    std::size_t above = 0;
    for (const auto& b : bests) {
      if (b.id == t.id) continue;
      if (!better(b, t)) break;
      if (++above >= k_) return false;
    }
    return true;
  }

  std::size_t k_;
};

}  // namespace nuec
