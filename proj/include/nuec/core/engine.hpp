#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nuec/core/data_type.hpp"
#include "nuec/core/types.hpp"
#include "nuec/size_model.hpp"

namespace nuec {

template <NuDataType T>
using MessageOf = SyncMessage<typename T::Payload, typename T::Metadata>;

template <NuDataType T>
std::size_t envelopeBytes(const T& type, const Envelope<typename T::Payload>& env) {
  return size::kOpTag + size::kOpId * env.constituents.size() + type.payloadBytes(env.payload);
}

// Canonical wire size of a message: header, envelopes and piggybacked metadata.
template <NuDataType T>
std::size_t meteredSize(const T& type, const MessageOf<T>& msg) {
  std::size_t bytes = size::kMessageHeader;
  for (const auto& env : msg.envelopes) bytes += envelopeBytes(type, env);
  if (msg.metadata) bytes += type.metadataBytes(*msg.metadata);
  return bytes;
}

// Per-replica state of the non-uniform replication protocol.
//
// Locally generated operations sit in logLocal until the data type's hooks
// declare them relevant; sync() then multicasts them (compacted) and moves
// them into logRecv. Every local operation is also sent point-to-point to f
// durability peers. A peer keeps such a copy aside, unapplied, until either
// the operation arrives by broadcast or its source is reported failed; in the
// latter case the copy is applied and treated as a local operation.
//
// Not thread-safe; one driver per engine at a time.
template <NuDataType T>
class ReplicaEngine {
 public:
  using DataType = T;
  using Payload = typename T::Payload;
  using Metadata = typename T::Metadata;
  using PrepareOp = typename T::PrepareOp;
  using Query = typename T::Query;
  using State = typename T::State;
  using Env = Envelope<Payload>;
  using Log = OpLog<Payload>;
  using Message = MessageOf<T>;

  struct ExecOutcome {
    Env op;
    std::vector<Message> sends;
  };

  ReplicaEngine(T type, ReplicaId self, std::size_t numReplicas, std::vector<ReplicaId> durabilityPeers = {})
      : type_(std::move(type)),
        self_(self),
        numReplicas_(numReplicas),
        peers_(std::move(durabilityPeers)),
        state_(type_.initial()) {}

  ExecOutcome execOp(const PrepareOp& prep) {
    auto payload = type_.prepare(state_, self_, prep);
    const OpId id{self_, ++seq_};
    auto env = Env::single(id, std::move(payload));
    type_.apply(state_, env.payload);
    seen_.insert(id);
    logLocal_.emplace(id, env);

    ExecOutcome out{env, {}};
    for (const auto peer : peers_) {
      if (failed_.contains(peer)) continue;
      auto copy = env;
      copy.durabilityCopy = true;
      out.sends.push_back(Message{self_, {std::move(copy)}, std::nullopt, false, peer});
    }
    return out;
  }

  // Drops forever-masked operations from logLocal and returns the ones to propagate.
  std::vector<Env> opsToPropagate() {
    for (const auto& id : type_.maskedForever(logLocal_, state_, logRecv_, context())) logLocal_.erase(id);
    return relevant(logLocal_);
  }

  // Same selection as opsToPropagate() without touching the logs.
  std::vector<Env> pendingPropagation() const {
    const auto masked = type_.maskedForever(logLocal_, state_, logRecv_, context());
    if (masked.empty()) return relevant(logLocal_);
    Log reduced = logLocal_;
    for (const auto& id : masked) reduced.erase(id);
    return relevant(reduced);
  }

  bool hasPendingWork() const { return !pendingPropagation().empty(); }

  std::optional<Message> sync() {
    pruneHeld();
    auto ops = opsToPropagate();
    if (ops.empty()) return std::nullopt;
    for (auto& op : ops) {
      logLocal_.erase(op.id);
      op.durabilityCopy = false;
      logRecv_.insert_or_assign(op.id, op);
    }
    return Message{self_, type_.compact(self_, ops), type_.sendMetadata(state_), true, 0};
  }

  void onReceive(const Message& msg) {
    for (const auto& env : msg.envelopes) {
      if (msg.broadcast) {
        receiveBroadcast(env);
      } else {
        receiveDurable(env);
      }
    }
    if (msg.metadata) type_.receiveMetadata(state_, *msg.metadata);
  }

  // Adopts the failed replica's held operations as local ones.
  void onReplicaFailed(ReplicaId r) {
    if (r == self_ || !failed_.insert(r).second) return;
    for (auto it = held_.begin(); it != held_.end();) {
      if (it->first.source != r) {
        ++it;
        continue;
      }
      auto env = std::move(it->second);
      it = held_.erase(it);
      if (!seen_.insert(env.id).second) continue;
      type_.apply(state_, env.payload);
      logLocal_.emplace(env.id, std::move(env));
    }
  }

  Query query() const { return type_.query(state_); }

  std::size_t sizeBytes() const {
    std::size_t bytes = type_.stateBytes(state_);
    for (const auto& [id, env] : logLocal_) bytes += envelopeBytes(type_, env);
    for (const auto& [id, env] : logRecv_) bytes += envelopeBytes(type_, env);
    for (const auto& [id, env] : held_) bytes += envelopeBytes(type_, env);
    return bytes;
  }

  std::size_t messageBytes(const Message& msg) const { return meteredSize(type_, msg); }

  // Applied, or kept aside as a durability copy.
  bool holds(const OpId& id) const { return seen_.contains(id) || held_.contains(id); }

  const T& type() const { return type_; }
  ReplicaId id() const { return self_; }
  const State& state() const { return state_; }
  const Log& logLocal() const { return logLocal_; }
  const Log& logRecv() const { return logRecv_; }
  const Log& held() const { return held_; }
  const std::set<OpId>& seen() const { return seen_; }
  const std::set<ReplicaId>& failed() const { return failed_; }
  const std::vector<ReplicaId>& durabilityPeers() const { return peers_; }
  std::uint64_t seqCounter() const { return seq_; }

  HookContext context() const { return HookContext{self_, numReplicas_, &failed_}; }

 private:
  // A held copy that is masked forever would never be propagated by its source,
  // nor by this replica after adopting it.
  void pruneHeld() {
    std::map<ReplicaId, Log> bySource;
    for (const auto& [id, env] : held_) bySource[id.source].emplace(id, env);
    for (const auto& [source, log] : bySource) {
      for (const auto& id : type_.maskedForever(log, state_, logRecv_, context())) held_.erase(id);
    }
  }

  std::vector<Env> relevant(const Log& local) const {
    const auto ctx = context();
    auto ids = type_.hasObservableImpact(local, state_, logRecv_, ctx);
    ids.merge(type_.mayHaveObservableImpact(local, state_, logRecv_, ctx));
    std::vector<Env> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = local.find(id);
      if (it == local.end()) throw std::logic_error("relevance hook returned an operation outside logLocal");
      out.push_back(it->second);
    }
    return out;
  }

  const Payload& individualPayload(const OpId& id) const {
    if (auto it = logLocal_.find(id); it != logLocal_.end()) return it->second.payload;
    if (auto it = logRecv_.find(id); it != logRecv_.end() && !it->second.compacted()) return it->second.payload;
    throw std::logic_error("compacted envelope overlaps an operation that is no longer logged");
  }

  void receiveBroadcast(const Env& env) {
    const bool unseen =
        std::any_of(env.constituents.begin(), env.constituents.end(), [&](const OpId& c) { return !seen_.contains(c); });
    if (unseen) {
      std::vector<Payload> applied;
      for (const auto& c : env.constituents) {
        if (seen_.contains(c)) applied.push_back(individualPayload(c));
      }
      type_.apply(state_, applied.empty() ? env.payload : type_.residual(env.payload, applied));
    }
    for (const auto& c : env.constituents) {
      seen_.insert(c);
      logLocal_.erase(c);
      held_.erase(c);
    }
    if (!logRecv_.contains(env.id)) {
      auto stored = env;
      stored.durabilityCopy = false;
      logRecv_.emplace(env.id, std::move(stored));
    }
  }

  void receiveDurable(const Env& env) {
    if (seen_.contains(env.id) || held_.contains(env.id)) return;
    auto copy = env;
    copy.durabilityCopy = true;
    if (failed_.contains(env.id.source)) {
      type_.apply(state_, copy.payload);
      seen_.insert(env.id);
      logLocal_.emplace(env.id, std::move(copy));
    } else {
      held_.emplace(env.id, std::move(copy));
    }
  }

  T type_;
  ReplicaId self_;
  std::size_t numReplicas_;
  std::vector<ReplicaId> peers_;
  State state_;
  Log logLocal_;
  Log logRecv_;
  Log held_;
  std::set<OpId> seen_;
  std::set<ReplicaId> failed_;
  std::uint64_t seq_{0};
};

// No messages in flight and nothing left to propagate anywhere.
template <class Engines>
bool isQuiescent(const Engines& engines, std::size_t messagesInFlight) {
  if (messagesInFlight != 0) return false;
  return std::all_of(std::begin(engines), std::end(engines), [](const auto& e) { return !e.hasPendingWork(); });
}

}  // namespace nuec
