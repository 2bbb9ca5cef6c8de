#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nuec/core/engine.hpp"
#include "nuec/oracle.hpp"
#include "nuec/sim/run.hpp"
#include "nuec/verify/report.hpp"

namespace nuec::verify {

// Random schedules over a few engines with durability copies; every delivered
// message is handed to its destination a second time, which must change
// nothing. Each run ends in quiescence and is compared with the oracle.
template <NuDataType T>
CheckResult checkRedelivery(const T& type, const std::vector<typename T::PrepareOp>& ops, std::uint64_t seed,
                            std::size_t runs, std::size_t opsPerRun) {
  using Engine = ReplicaEngine<T>;
  using Message = typename Engine::Message;
  CheckResult result{"redelivery idempotence", 0, {}};
  std::mt19937_64 rng(seed);
  constexpr std::size_t kReplicas = 3;

  for (std::size_t run = 0; run < runs && result.ok(); ++run) {
    std::vector<Engine> engines;
    for (std::size_t r = 0; r < kReplicas; ++r) {
      const auto id = static_cast<ReplicaId>(r);
      engines.emplace_back(type, id, kReplicas, durabilityPeersOf(id, kReplicas, 1));
    }
    std::vector<std::pair<ReplicaId, Message>> inFlight;
    std::vector<typename T::Payload> generated;
    std::vector<std::string> trace;
    const auto post = [&](ReplicaId from, Message msg) {
      if (!msg.broadcast) {
        inFlight.emplace_back(msg.destination, std::move(msg));
        return;
      }
      for (std::size_t d = 0; d < kReplicas; ++d) {
        if (d != from) inFlight.emplace_back(static_cast<ReplicaId>(d), msg);
      }
    };
    const auto deliver = [&](std::size_t i) {
      auto [dest, msg] = std::move(inFlight[i]);
      inFlight.erase(inFlight.begin() + static_cast<std::ptrdiff_t>(i));
      auto& e = engines[dest];
      e.onReceive(msg);
      const auto before = type.describe(e.state());
      const auto local = e.logLocal().size();
      const auto recv = e.logRecv().size();
      e.onReceive(msg);
      trace.push_back("r" + std::to_string(dest) + " receives twice from r" + std::to_string(msg.sender));
      if (type.describe(e.state()) != before || e.logLocal().size() != local || e.logRecv().size() != recv) {
        Counterexample cx{"second delivery changed r" + std::to_string(dest) + " to " + type.describe(e.state()),
                          {}, trace};
        for (const auto& p : generated) cx.ops.push_back(type.describe(p));
        result.failures.push_back(std::move(cx));
      }
    };

    std::uniform_int_distribution<std::size_t> pickReplica(0, kReplicas - 1);
    std::uniform_int_distribution<std::size_t> pickOp(0, ops.size() - 1);
    std::uniform_int_distribution<int> pickAction(0, 2);
    while (generated.size() < opsPerRun && result.ok()) {
      const auto r = pickReplica(rng);
      switch (pickAction(rng)) {
        case 0: {
          auto outcome = engines[r].execOp(ops[pickOp(rng)]);
          trace.push_back("r" + std::to_string(r) + " executes " + type.describe(outcome.op.payload));
          generated.push_back(outcome.op.payload);
          for (auto& m : outcome.sends) post(static_cast<ReplicaId>(r), std::move(m));
          break;
        }
        case 1:
          if (auto msg = engines[r].sync()) {
            trace.push_back("r" + std::to_string(r) + " syncs");
            post(static_cast<ReplicaId>(r), std::move(*msg));
          }
          break;
        default:
          if (!inFlight.empty()) deliver(std::uniform_int_distribution<std::size_t>(0, inFlight.size() - 1)(rng));
      }
    }
    while (result.ok() && !isQuiescent(engines, inFlight.size())) {
      for (std::size_t r = 0; r < kReplicas; ++r) {
        if (auto msg = engines[r].sync()) post(static_cast<ReplicaId>(r), std::move(*msg));
      }
      while (!inFlight.empty() && result.ok()) deliver(0);
    }
    if (!result.ok()) break;
    ++result.cases;
    const auto expected = oracle::evaluate(type, generated);
    for (const auto& e : engines) {
      if (e.query() == expected) continue;
      Counterexample cx{"r" + std::to_string(e.id()) + " differs from the oracle at quiescence", {}, trace};
      for (const auto& p : generated) cx.ops.push_back(type.describe(p));
      result.failures.push_back(std::move(cx));
      break;
    }
  }
  return result;
}

// Draws `crashes` distinct replicas crashing at events in [0, nOps).
inline std::vector<sim::CrashSpec> randomCrashes(std::size_t nReplicas, std::size_t nOps, std::size_t crashes,
                                                 std::mt19937_64& rng) {
  std::vector<ReplicaId> ids(nReplicas);
  for (std::size_t r = 0; r < nReplicas; ++r) ids[r] = static_cast<ReplicaId>(r);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uniform_int_distribution<std::size_t> event(0, nOps - 1);
  std::vector<sim::CrashSpec> out;
  for (std::size_t i = 0; i < crashes; ++i) out.push_back({ids[i], event(rng)});
  return out;
}

// Seeded simulations with `crashes` replicas failing at random events; the
// survivors must be quiescent, agree, and match the adjusted oracle.
inline CheckResult checkCrashes(sim::SimConfig base, std::size_t runs, std::size_t crashes) {
  CheckResult result{"crash recovery (" + std::to_string(crashes) + " crashes)", 0, {}};
  std::mt19937_64 rng(base.seed);
  for (std::size_t i = 0; i < runs; ++i) {
    auto cfg = base;
    cfg.seed = base.seed + i;
    cfg.crashSchedule = randomCrashes(cfg.nReplicas, cfg.nOps, crashes, rng);
    const auto report = sim::runSimulation(cfg);
    ++result.cases;
    if (report.ok()) continue;
    Counterexample cx;
    cx.detail = "seed " + std::to_string(cfg.seed) + ": quiescent=" + std::to_string(report.quiescent) +
                " equivalent=" + std::to_string(report.observablyEquivalent) +
                " oracleMatch=" + std::to_string(report.oracleMatch);
    for (const auto& c : cfg.crashSchedule) {
      cx.trace.push_back("crash r" + std::to_string(c.replica) + " at event " + std::to_string(c.atEvent));
    }
    result.failures.push_back(std::move(cx));
  }
  return result;
}

}  // namespace nuec::verify
