#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <utility>
#include <vector>

#include "nuec/oracle.hpp"
#include "nuec/sim/config.hpp"
#include "nuec/sim/metrics.hpp"
#include "nuec/sim/workload.hpp"

namespace nuec::sim {

// True iff every query result equals the first one.
template <class Query>
bool checkObservableEquivalence(const std::vector<Query>& results) {
  return std::adjacent_find(results.begin(), results.end(), std::not_equal_to<>{}) == results.end();
}

// Deterministic discrete-event simulation of one replicated object.
//
// One workload operation is generated per tick. Each replica syncs after
// every `syncEveryEvents` operations it generated. Messages are delivered
// `delay` ticks after being sent; broadcasts fan out to every live replica
// and are never lost once sent. After the workload, sync rounds run until a
// fixed point.
template <class Replica>
class Simulation {
 public:
  using DataType = typename Replica::DataType;
  using Payload = typename DataType::Payload;
  using Message = typename Replica::Message;
  using Query = typename DataType::Query;

  Simulation(SimConfig cfg, DataType type)
      : cfg_(std::move(cfg)), type_(std::move(type)), delayRng_(cfg_.seed ^ 0x9e3779b97f4a7c15ull) {
    cfg_.validate();
    for (std::size_t r = 0; r < cfg_.nReplicas; ++r) {
      const auto id = static_cast<ReplicaId>(r);
      replicas_.emplace_back(type_, id, cfg_.nReplicas, durabilityPeersOf(id, cfg_.nReplicas, cfg_.f));
    }
    alive_.assign(cfg_.nReplicas, true);
    localOps_.assign(cfg_.nReplicas, 0);
  }

  MetricsReport run() { return run(generateWorkload(cfg_)); }

  MetricsReport run(const std::vector<WorkItem>& workload) {
    report_ = MetricsReport{};
    report_.engine = cfg_.engine;
    report_.dataType = cfg_.dataType;
    report_.seed = cfg_.seed;
    report_.nOps = cfg_.nOps;
    report_.removeRatio = cfg_.removeRatio;

    auto crashes = cfg_.crashSchedule;
    std::stable_sort(crashes.begin(), crashes.end(),
                     [](const CrashSpec& a, const CrashSpec& b) { return a.atEvent < b.atEvent; });
    auto nextCrash = crashes.begin();
    const std::size_t roundLength = cfg_.syncEveryEvents * cfg_.nReplicas;

    for (std::size_t i = 0; i < workload.size(); ++i) {
      while (nextCrash != crashes.end() && nextCrash->atEvent <= i) crash((nextCrash++)->replica);
      deliverUntil(now_);
      const auto& item = workload[i];
      if (alive_[item.replica]) {
        auto& replica = replicas_[item.replica];
        auto outcome = replica.execOp(makePrepare(type_, item));
        generated_.emplace_back(outcome.op.id, outcome.op.payload);
        for (auto& msg : outcome.sends) send(item.replica, std::move(msg));
        if (++localOps_[item.replica] % cfg_.syncEveryEvents == 0) syncReplica(item.replica);
      }
      ++now_;
      if ((i + 1) % roundLength == 0) sample(i + 1);
    }
    while (nextCrash != crashes.end()) crash((nextCrash++)->replica);

    const std::size_t bound = std::max<std::size_t>(1, workload.size()) * cfg_.nReplicas;
    for (std::size_t round = 0; round < bound; ++round) {
      deliverAll();
      bool emitted = false;
      for (std::size_t r = 0; r < replicas_.size(); ++r) {
        if (alive_[r]) emitted |= syncReplica(static_cast<ReplicaId>(r));
      }
      if (!emitted && inFlight_.empty()) break;
    }
    sample(workload.size());
    finish();
    return report_;
  }

  const std::vector<Replica>& replicas() const { return replicas_; }
  const std::vector<bool>& alive() const { return alive_; }
  const std::vector<std::pair<OpId, Payload>>& generated() const { return generated_; }
  // Every broadcast emitted so far, in send order; empty unless recording was enabled.
  const std::vector<Message>& broadcasts() const { return broadcasts_; }
  void recordBroadcasts(bool on) { recordBroadcasts_ = on; }

 private:
  struct InFlight {
    ReplicaId destination;
    Message message;
  };

  void send(ReplicaId from, Message msg) {
    const std::size_t bytes = replicas_[from].messageBytes(msg);
    if (msg.broadcast) {
      for (std::size_t d = 0; d < replicas_.size(); ++d) {
        if (d == from || !alive_[d]) continue;
        enqueue(static_cast<ReplicaId>(d), msg, bytes, false);
      }
      if (recordBroadcasts_) broadcasts_.push_back(std::move(msg));
    } else if (alive_[msg.destination]) {
      const auto dest = msg.destination;
      enqueue(dest, std::move(msg), bytes, true);
    }
  }

  void enqueue(ReplicaId dest, Message msg, std::size_t bytes, bool durability) {
    std::uint64_t delay = 1;
    if (cfg_.maxDelay > 1) delay = std::uniform_int_distribution<std::uint64_t>(1, cfg_.maxDelay)(delayRng_);
    inFlight_.emplace(std::make_pair(now_ + delay, nextSeq_++), InFlight{dest, std::move(msg)});
    report_.totalPayloadBytes += bytes;
    if (durability) report_.durabilityPayloadBytes += bytes;
    ++report_.messageCount;
  }

  bool syncReplica(ReplicaId r) {
    auto msg = replicas_[r].sync();
    if (!msg) return false;
    send(r, std::move(*msg));
    return true;
  }

  void deliverUntil(std::uint64_t time) {
    while (!inFlight_.empty() && inFlight_.begin()->first.first <= time) {
      auto node = inFlight_.extract(inFlight_.begin());
      auto& [dest, msg] = node.mapped();
      if (alive_[dest]) replicas_[dest].onReceive(msg);
    }
  }

  void deliverAll() {
    if (inFlight_.empty()) return;
    now_ = std::max(now_, std::prev(inFlight_.end())->first.first);
    deliverUntil(now_);
  }

  void crash(ReplicaId r) {
    if (!alive_[r]) return;
    alive_[r] = false;
    for (std::size_t d = 0; d < replicas_.size(); ++d) {
      if (alive_[d]) replicas_[d].onReplicaFailed(r);
    }
  }

  void sample(std::size_t opsExecuted) {
    double total = 0;
    std::size_t live = 0;
    for (std::size_t r = 0; r < replicas_.size(); ++r) {
      if (!alive_[r]) continue;
      total += static_cast<double>(replicas_[r].sizeBytes());
      ++live;
    }
    report_.samples.push_back(
        Sample{report_.samples.size() + 1, opsExecuted, report_.totalPayloadBytes, live ? total / live : 0.0});
  }

  void finish() {
    report_.quiescent = inFlight_.empty();
    std::vector<Query> results;
    for (std::size_t r = 0; r < replicas_.size(); ++r) {
      report_.finalReplicaBytes.push_back(alive_[r] ? replicas_[r].sizeBytes() : 0);
      if (!alive_[r]) continue;
      report_.quiescent = report_.quiescent && !replicas_[r].hasPendingWork();
      results.push_back(replicas_[r].query());
    }
    report_.observablyEquivalent = checkObservableEquivalence(results);

    // Operations of crashed sources count only if some survivor still holds them.
    std::vector<Payload> durable;
    for (const auto& [id, payload] : generated_) {
      bool kept = alive_[id.source];
      for (std::size_t r = 0; !kept && r < replicas_.size(); ++r) kept = alive_[r] && replicas_[r].holds(id);
      if (kept) durable.push_back(payload);
    }
    report_.opsGenerated = generated_.size();
    report_.opsInOracle = durable.size();
    const auto expected = oracle::evaluate(type_, durable);
    report_.oracleMatch = std::all_of(results.begin(), results.end(), [&](const Query& q) { return q == expected; });

    double sum = 0;
    for (const auto& s : report_.samples) sum += s.avgReplicaBytes;
    report_.avgReplicaBytes = report_.samples.empty() ? 0.0 : sum / static_cast<double>(report_.samples.size());
  }

  SimConfig cfg_;
  DataType type_;
  std::vector<Replica> replicas_;
  std::vector<bool> alive_;
  std::vector<std::size_t> localOps_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, InFlight> inFlight_;
  std::vector<std::pair<OpId, Payload>> generated_;
  std::vector<Message> broadcasts_;
  bool recordBroadcasts_{false};
  std::mt19937_64 delayRng_;
  std::uint64_t now_{0};
  std::uint64_t nextSeq_{0};
  MetricsReport report_;
};

}  // namespace nuec::sim
