#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nuec/core/engine.hpp"

namespace nuec {

// Full-replication operation-based comparator: every generated operation is
// broadcast at the next sync, compacted with the data type's compact(). It
// uses the same durability sends as the non-uniform engine so both pay the
// same fault-tolerance traffic.
template <NuDataType T>
class FullOpReplica {
 public:
  using DataType = T;
  using Payload = typename T::Payload;
  using PrepareOp = typename T::PrepareOp;
  using Query = typename T::Query;
  using State = typename T::State;
  using Env = Envelope<Payload>;
  using Message = MessageOf<T>;
  using ExecOutcome = typename ReplicaEngine<T>::ExecOutcome;

  FullOpReplica(T type, ReplicaId self, std::size_t /*numReplicas*/, std::vector<ReplicaId> durabilityPeers = {})
      : type_(std::move(type)), self_(self), peers_(std::move(durabilityPeers)), state_(type_.initial()) {}

  ExecOutcome execOp(const PrepareOp& prep) {
    auto payload = type_.prepare(state_, self_, prep);
    const OpId id{self_, ++seq_};
    auto env = Env::single(id, std::move(payload));
    type_.apply(state_, env.payload);
    seen_.insert(id);
    outbox_.push_back(env);
    ExecOutcome out{env, {}};
    for (const auto peer : peers_) {
      if (failed_.contains(peer)) continue;
      auto copy = env;
      copy.durabilityCopy = true;
      out.sends.push_back(Message{self_, {std::move(copy)}, std::nullopt, false, peer});
    }
    return out;
  }

  std::optional<Message> sync() {
    if (outbox_.empty()) return std::nullopt;
    auto envelopes = type_.compact(self_, outbox_);
    outbox_.clear();
    return Message{self_, std::move(envelopes), std::nullopt, true, 0};
  }

  void onReceive(const Message& msg) {
    for (const auto& env : msg.envelopes) {
      if (!msg.broadcast) {
        if (seen_.insert(env.id).second) {
          type_.apply(state_, env.payload);
          if (failed_.contains(env.id.source)) {
            forward(env);
          } else {
            held_.emplace(env.id, env);
          }
        }
        continue;
      }
      const bool unseen = std::any_of(env.constituents.begin(), env.constituents.end(),
                                      [&](const OpId& c) { return !seen_.contains(c); });
      if (unseen) {
        std::vector<Payload> applied;
        for (const auto& c : env.constituents) {
          if (seen_.contains(c)) applied.push_back(individualPayload(c));
        }
        type_.apply(state_, applied.empty() ? env.payload : type_.residual(env.payload, applied));
      }
      for (const auto& c : env.constituents) {
        seen_.insert(c);
        held_.erase(c);
      }
      if (!env.compacted() && env.id.source != msg.sender) forwarded_.emplace(env.id, env.payload);
    }
  }

  // Copies held for a failed source are re-broadcast on its behalf.
  void onReplicaFailed(ReplicaId r) {
    if (r == self_ || !failed_.insert(r).second) return;
    for (auto it = held_.begin(); it != held_.end();) {
      if (it->first.source == r) {
        forward(it->second);
        it = held_.erase(it);
      } else {
        ++it;
      }
    }
  }

  bool hasPendingWork() const { return !outbox_.empty(); }
  Query query() const { return type_.query(state_); }
  bool holds(const OpId& id) const { return seen_.contains(id); }

  std::size_t sizeBytes() const {
    std::size_t bytes = type_.stateBytes(state_);
    for (const auto& env : outbox_) bytes += envelopeBytes(type_, env);
    for (const auto& [id, env] : held_) bytes += envelopeBytes(type_, env);
    return bytes;
  }
  std::size_t messageBytes(const Message& msg) const { return meteredSize(type_, msg); }

  const T& type() const { return type_; }
  const State& state() const { return state_; }
  const std::vector<Env>& outbox() const { return outbox_; }

 private:
  void forward(Env env) {
    env.durabilityCopy = false;
    forwarded_.emplace(env.id, env.payload);
    outbox_.push_back(std::move(env));
  }

  const Payload& individualPayload(const OpId& id) const {
    if (auto it = held_.find(id); it != held_.end()) return it->second.payload;
    if (auto it = forwarded_.find(id); it != forwarded_.end()) return it->second;
    throw std::logic_error("compacted envelope overlaps an operation that is no longer held");
  }

  T type_;
  ReplicaId self_;
  std::vector<ReplicaId> peers_;
  State state_;
  std::vector<Env> outbox_;
  std::map<OpId, Env> held_;
  std::map<OpId, Payload> forwarded_;
  std::set<OpId> seen_;
  std::set<ReplicaId> failed_;
  std::uint64_t seq_{0};
};

}  // namespace nuec
