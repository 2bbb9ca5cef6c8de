#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "nuec/core/engine.hpp"
#include "nuec/size_model.hpp"
#include "nuec/types/histogram.hpp"
#include "nuec/types/top_sum.hpp"
#include "nuec/types/topk.hpp"
#include "nuec/types/topk_rmv.hpp"

namespace nuec {

// State-shipping comparator in the style of computational CRDTs: a replica
// broadcasts its observable state whenever that state changed since the last
// shipment. Type-specific parts live in the ship policies below.
template <class Policy>
class StateShipReplica {
 public:
  using DataType = typename Policy::DataType;
  using Payload = typename DataType::Payload;
  using PrepareOp = typename DataType::PrepareOp;
  using Query = typename DataType::Query;
  using Env = Envelope<Payload>;
  using Local = typename Policy::Local;
  using Snapshot = typename Policy::Snapshot;

  struct Message {
    ReplicaId sender{0};
    bool broadcast{true};
    ReplicaId destination{0};
    std::optional<Env> copy;
    std::optional<Snapshot> snapshot;
  };
  struct ExecOutcome {
    Env op;
    std::vector<Message> sends;
  };

  StateShipReplica(DataType type, ReplicaId self, std::size_t /*numReplicas*/,
                   std::vector<ReplicaId> durabilityPeers = {})
      : policy_(std::move(type)), self_(self), peers_(std::move(durabilityPeers)), local_(policy_.initial()),
        lastShipped_(policy_.query(local_)) {}

  ExecOutcome execOp(const PrepareOp& prep) {
    auto payload = policy_.prepare(local_, self_, prep);
    const OpId id{self_, ++seq_};
    auto env = Env::single(id, std::move(payload));
    policy_.applyOwn(local_, id, env.payload);
    seen_.insert(id);
    if (policy_.forcesShipment(env.payload)) forceShip_ = true;
    ExecOutcome out{env, {}};
    for (const auto peer : peers_) {
      if (failed_.contains(peer)) continue;
      auto copy = env;
      copy.durabilityCopy = true;
      out.sends.push_back(Message{self_, false, peer, std::move(copy), std::nullopt});
    }
    return out;
  }

  std::optional<Message> sync() {
    if (!hasPendingWork()) return std::nullopt;
    forceShip_ = false;
    lastShipped_ = policy_.query(local_);
    return Message{self_, true, 0, std::nullopt, policy_.snapshot(local_, self_, failed_)};
  }

  void onReceive(const Message& msg) {
    if (msg.copy && seen_.insert(msg.copy->id).second) {
      policy_.hold(local_, msg.copy->id, msg.copy->payload);
      if (failed_.contains(msg.copy->id.source)) {
        policy_.adopt(local_, msg.copy->id.source);
        forceShip_ = true;
      }
    }
    if (msg.snapshot) {
      policy_.merge(local_, *msg.snapshot);
      for (const auto r : failed_) policy_.adopt(local_, r);
    }
  }

  void onReplicaFailed(ReplicaId r) {
    if (r == self_ || !failed_.insert(r).second) return;
    policy_.adopt(local_, r);
    forceShip_ = true;
  }

  bool hasPendingWork() const { return forceShip_ || policy_.query(local_) != lastShipped_; }
  Query query() const { return policy_.query(local_); }
  bool holds(const OpId& id) const { return seen_.contains(id); }

  std::size_t sizeBytes() const { return policy_.localBytes(local_); }
  std::size_t messageBytes(const Message& msg) const {
    std::size_t bytes = size::kMessageHeader;
    if (msg.copy) bytes += size::kOpTag + size::kOpId + policy_.type().payloadBytes(msg.copy->payload);
    if (msg.snapshot) bytes += policy_.snapshotBytes(*msg.snapshot);
    return bytes;
  }

  const Local& local() const { return local_; }

 private:
  Policy policy_;
  ReplicaId self_;
  std::vector<ReplicaId> peers_;
  Local local_;
  Query lastShipped_;
  bool forceShip_{false};
  std::set<OpId> seen_;
  std::set<ReplicaId> failed_;
  std::uint64_t seq_{0};
};

// Ships the top-K tuples together with the whole removes map and clock.
// Every local remove forces a shipment.
class TopKRmvShip {
 public:
  using DataType = TopKRmv;
  using Local = TopKRmv::State;
  struct Snapshot {
    std::vector<TopKRmv::Tuple> top;
    std::map<ElementId, VectorClock> removes;
    VectorClock vc;
  };

  explicit TopKRmvShip(TopKRmv type) : type_(std::move(type)) {}

  const TopKRmv& type() const { return type_; }
  Local initial() const { return type_.initial(); }
  TopKRmv::Payload prepare(const Local& s, ReplicaId self, const TopKRmv::PrepareOp& op) const {
    return type_.prepare(s, self, op);
  }
  void applyOwn(Local& s, const OpId&, const TopKRmv::Payload& p) const { type_.apply(s, p); }
  void hold(Local& s, const OpId&, const TopKRmv::Payload& p) const { type_.apply(s, p); }
  void adopt(Local&, ReplicaId) const {}
  bool forcesShipment(const TopKRmv::Payload& p) const { return std::holds_alternative<TopKRmv::Rmv>(p); }

  Snapshot snapshot(const Local& s, ReplicaId, const std::set<ReplicaId>&) const {
    return Snapshot{type_.topTuples(s, type_.k()), s.removes, s.vc};
  }
  void merge(Local& s, const Snapshot& snap) const {
    for (const auto& [id, vc] : snap.removes) type_.apply(s, TopKRmv::Rmv{id, vc});
    for (const auto& t : snap.top) type_.apply(s, TopKRmv::Add{t.id, t.score, t.ts});
    s.vc.mergeFrom(snap.vc);
  }
  TopKRmv::Query query(const Local& s) const { return type_.query(s); }

  std::size_t localBytes(const Local& s) const { return type_.stateBytes(s); }
  std::size_t snapshotBytes(const Snapshot& snap) const {
    std::size_t bytes = 2 * size::kListLength + snap.vc.bytes();
    bytes += snap.top.size() * (size::kId + size::kScalar + size::kTimestamp);
    for (const auto& [id, vc] : snap.removes) bytes += size::kId + vc.bytes();
    return bytes;
  }

 private:
  TopKRmv type_;
};

// Ships the current top-K tuples.
class TopKShip {
 public:
  using DataType = TopK;
  using Local = TopK::State;
  using Snapshot = std::vector<ScoredEntry>;

  explicit TopKShip(TopK type) : type_(std::move(type)) {}

  const TopK& type() const { return type_; }
  Local initial() const { return type_.initial(); }
  TopK::Payload prepare(const Local& s, ReplicaId self, const TopK::PrepareOp& op) const {
    return type_.prepare(s, self, op);
  }
  void applyOwn(Local& s, const OpId&, const TopK::Payload& p) const { type_.apply(s, p); }
  void hold(Local& s, const OpId&, const TopK::Payload& p) const { type_.apply(s, p); }
  void adopt(Local&, ReplicaId) const {}
  bool forcesShipment(const TopK::Payload&) const { return false; }

  Snapshot snapshot(const Local& s, ReplicaId, const std::set<ReplicaId>&) const { return s.elems; }
  void merge(Local& s, const Snapshot& snap) const {
    for (const auto& e : snap) type_.apply(s, e);
  }
  TopK::Query query(const Local& s) const { return type_.query(s); }

  std::size_t localBytes(const Local& s) const { return type_.stateBytes(s); }
  std::size_t snapshotBytes(const Snapshot& snap) const {
    return size::kListLength + snap.size() * (size::kId + size::kScalar);
  }

 private:
  TopK type_;
};

// Per-replica contribution rows merged by entrywise max, for types whose
// query aggregates positive increments (Top Sum, Histogram). A replica ships
// its own row and the rows it adopted from failed replicas. Rows are prefix
// sums of their source's operations, so entrywise max keeps the longer prefix.
template <class T>
class RowShip {
 public:
  using DataType = T;
  struct Row {
    std::uint64_t coveredSeq{0};
    std::map<ElementId, Score> sums;
    friend bool operator==(const Row&, const Row&) = default;
  };
  struct Local {
    std::map<ReplicaId, Row> rows;
    std::map<OpId, typename T::Payload> held;
  };
  using Snapshot = std::map<ReplicaId, Row>;

  explicit RowShip(T type) : type_(std::move(type)) {}

  const T& type() const { return type_; }
  Local initial() const { return {}; }
  typename T::Payload prepare(const Local&, ReplicaId self, const typename T::PrepareOp& op) const {
    return type_.prepare(type_.initial(), self, op);
  }
  void applyOwn(Local& l, const OpId& id, const typename T::Payload& p) const { fold(l.rows[id.source], id, p); }
  void hold(Local& l, const OpId& id, const typename T::Payload& p) const {
    if (id.seq > l.rows[id.source].coveredSeq) l.held.emplace(id, p);
  }
  // Folds the held copies that extend the failed replica's row contiguously;
  // later copies wait for the missing ones so the row stays a prefix.
  void adopt(Local& l, ReplicaId failed) const {
    auto& row = l.rows[failed];
    for (auto it = l.held.find(OpId{failed, row.coveredSeq + 1}); it != l.held.end();
         it = l.held.find(OpId{failed, row.coveredSeq + 1})) {
      fold(row, it->first, it->second);
      l.held.erase(it);
    }
  }
  bool forcesShipment(const typename T::Payload&) const { return true; }

  Snapshot snapshot(const Local& l, ReplicaId self, const std::set<ReplicaId>& failed) const {
    Snapshot out;
    for (const auto& [r, row] : l.rows) {
      if (r == self || failed.contains(r)) out.emplace(r, row);
    }
    return out;
  }
  void merge(Local& l, const Snapshot& snap) const {
    for (const auto& [r, incoming] : snap) {
      auto& row = l.rows[r];
      row.coveredSeq = std::max(row.coveredSeq, incoming.coveredSeq);
      for (const auto& [key, v] : incoming.sums) {
        auto& mine = row.sums[key];
        mine = std::max(mine, v);
      }
      std::erase_if(l.held, [&](const auto& h) { return h.first.source == r && h.first.seq <= row.coveredSeq; });
    }
  }

  typename T::Query query(const Local& l) const {
    std::map<ElementId, Score> totals;
    for (const auto& [r, row] : l.rows) {
      for (const auto& [key, v] : row.sums) totals[key] += v;
    }
    if constexpr (std::is_same_v<T, Histogram>) {
      BinCounts out;
      for (const auto& [key, v] : totals) out[key] = static_cast<std::uint64_t>(v);
      return out;
    } else {
      std::vector<ScoredEntry> entries;
      for (const auto& [key, v] : totals) entries.push_back({key, v});
      return topK(entries, type_.k());
    }
  }

  std::size_t localBytes(const Local& l) const {
    std::size_t bytes = 0;
    for (const auto& [r, row] : l.rows) bytes += rowBytes(row);
    for (const auto& [id, p] : l.held) bytes += size::kOpTag + size::kOpId + type_.payloadBytes(p);
    return bytes;
  }
  std::size_t snapshotBytes(const Snapshot& snap) const {
    std::size_t bytes = size::kListLength;
    for (const auto& [r, row] : snap) bytes += rowBytes(row);
    return bytes;
  }

 private:
  static std::size_t rowBytes(const Row& row) {
    return size::kReplicaRef + size::kScalar + size::kListLength + row.sums.size() * (size::kId + size::kScalar);
  }

  void fold(Row& row, const OpId& id, const typename T::Payload& p) const {
    if constexpr (std::is_same_v<T, Histogram>) {
      for (const auto& [bin, n] : p.delta) row.sums[bin] += static_cast<Score>(n);
    } else {
      row.sums[p.id] += p.amount;
    }
    row.coveredSeq = std::max(row.coveredSeq, id.seq);
  }

  T type_;
};

using TopSumShip = RowShip<TopSum>;
using HistogramShip = RowShip<Histogram>;

}  // namespace nuec
