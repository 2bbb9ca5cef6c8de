#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nuec/core/engine.hpp"
#include "nuec/oracle.hpp"
#include "nuec/verify/report.hpp"

namespace nuec::verify {

// Explores every interleaving of operation generation, syncs and message
// deliveries for up to `maxOps` operations over `replicas` engines. Whenever
// the system is quiescent, every replica must answer what the oracle gives for
// all generated operations, including the ones that were never propagated.
//
// States are memoized by a fingerprint built from the types' describe(). The
// first operation always runs on replica 0; replica ids are interchangeable.
template <NuDataType T>
class SoundnessCheck {
 public:
  using Engine = ReplicaEngine<T>;
  using Message = typename Engine::Message;
  using Payload = typename T::Payload;
  using PrepareOp = typename T::PrepareOp;

  SoundnessCheck(T type, std::vector<PrepareOp> ops, std::size_t maxOps, std::size_t replicas)
      : type_(std::move(type)), ops_(std::move(ops)), maxOps_(maxOps), replicas_(replicas) {}

  CheckResult run() {
    result_ = CheckResult{"hook soundness (" + std::to_string(replicas_) + " replicas)", 0, {}};
    visited_.clear();
    quiescent_.clear();
    Node root;
    for (std::size_t r = 0; r < replicas_; ++r) root.engines.emplace_back(type_, static_cast<ReplicaId>(r), replicas_);
    root.pending.assign(replicas_, false);
    root.stateHash.assign(replicas_, std::hash<std::string>{}(type_.describe(type_.initial())));
    explore(root);
    return result_;
  }

  std::size_t statesVisited() const { return visited_.size(); }

 private:
  enum class Step { None, Exec, Sync, Deliver };

  struct Flight {
    ReplicaId destination;
    Message message;
    // Sent by the step that produced this node.
    bool fresh;
  };

  struct TraceStep {
    std::string text;
    std::shared_ptr<const TraceStep> previous;
  };

  struct Node {
    std::vector<Engine> engines;
    std::vector<Flight> inFlight;
    std::vector<Payload> generated;
    // Generated payloads by operation id, for order-independent fingerprints.
    std::map<OpId, std::string> generatedById;
    // Steps so far, newest first; shared between siblings.
    std::shared_ptr<const TraceStep> trace;
    std::vector<bool> pending;
    // Hash of each replica's described state, refreshed when the replica acts.
    std::vector<std::size_t> stateHash;
    Step last{Step::None};
    std::size_t lastReplica{0};
  };

  static void record(Node& n, std::string text) {
    n.trace = std::make_shared<const TraceStep>(TraceStep{std::move(text), std::move(n.trace)});
  }

  static std::vector<std::string> steps(const Node& n) {
    std::vector<std::string> out;
    for (auto* s = n.trace.get(); s != nullptr; s = s->previous.get()) out.push_back(s->text);
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Steps at different replicas commute unless both generate (they share the
  // operation budget) or the second delivers what the first sent. Only
  // sequences where each such commuting pair appears in replica order are
  // followed; every interleaving is equivalent to one of them.
  bool allowed(const Node& n, std::size_t replica, Step step, bool fresh = false) const {
    if (n.last == Step::None || replica >= n.lastReplica) return true;
    if (step == Step::Exec) return n.last == Step::Exec;
    return step == Step::Deliver && fresh;
  }

  Node successor(const Node& n, std::size_t replica, Step step) const {
    Node next = n;
    for (auto& f : next.inFlight) f.fresh = false;
    next.last = step;
    next.lastReplica = replica;
    return next;
  }

  void explore(const Node& n) {
    if (result_.failures.size() >= kMaxReported) return;
    const auto fp = fingerprint(n);
    auto key = fp;
    mix(key, static_cast<std::size_t>(n.last) * 64 + n.lastReplica);
    if (!visited_.insert(key).second) return;

    const auto& pending = n.pending;
    const bool anyPending = std::find(pending.begin(), pending.end(), true) != pending.end();
    if (!anyPending && n.inFlight.empty() && quiescent_.insert(fp).second) {
      checkQuiescent(n);
    }

    if (n.generated.size() < maxOps_) {
      const std::size_t lastReplica = n.generated.empty() ? 1 : replicas_;
      for (std::size_t r = 0; r < lastReplica; ++r) {
        if (!allowed(n, r, Step::Exec)) continue;
        for (const auto& op : ops_) {
          Node next = successor(n, r, Step::Exec);
          auto outcome = next.engines[r].execOp(op);
          refresh(next, r);
          record(next, "r" + std::to_string(r) + " executes " + describeEnv(outcome.op));
          next.generated.push_back(outcome.op.payload);
          next.generatedById.emplace(outcome.op.id, type_.describe(outcome.op.payload));
          explore(next);
        }
      }
    }
    for (std::size_t r = 0; r < replicas_; ++r) {
      if (!pending[r] || !allowed(n, r, Step::Sync)) continue;
      Node next = successor(n, r, Step::Sync);
      auto msg = next.engines[r].sync();
      refresh(next, r);
      record(next, "r" + std::to_string(r) + " syncs " + describeMessage(*msg));
      for (std::size_t d = 0; d < replicas_; ++d) {
        if (d != r) next.inFlight.push_back(Flight{static_cast<ReplicaId>(d), *msg, true});
      }
      explore(next);
    }
    for (std::size_t i = 0; i < n.inFlight.size(); ++i) {
      const auto dest = n.inFlight[i].destination;
      if (!allowed(n, dest, Step::Deliver, n.inFlight[i].fresh)) continue;
      Node next = successor(n, dest, Step::Deliver);
      auto msg = std::move(next.inFlight[i].message);
      next.inFlight.erase(next.inFlight.begin() + static_cast<std::ptrdiff_t>(i));
      next.engines[dest].onReceive(msg);
      refresh(next, dest);
      record(next, "r" + std::to_string(dest) + " receives from r" + std::to_string(msg.sender));
      explore(next);
    }
  }

  void checkQuiescent(const Node& n) {
    ++result_.cases;
    const auto expected = oracle::evaluate(type_, n.generated);
    for (const auto& e : n.engines) {
      if (e.query() == expected) continue;
      Counterexample cx;
      cx.detail = "quiescent replica r" + std::to_string(e.id()) + " holds " + type_.describe(e.state()) +
                  " but the oracle over all generated operations differs";
      for (const auto& p : n.generated) cx.ops.push_back(type_.describe(p));
      cx.trace = steps(n);
      result_.failures.push_back(std::move(cx));
      return;
    }
  }

  std::string describeEnv(const Envelope<Payload>& env) const {
    return "#" + std::to_string(env.id.source) + "." + std::to_string(env.id.seq) + " " + type_.describe(env.payload);
  }

  std::string describeMessage(const Message& msg) const {
    std::string out = "{";
    for (const auto& env : msg.envelopes) out += describeEnv(env) + ";";
    return out + "}";
  }

  void refresh(Node& n, std::size_t r) const {
    n.pending[r] = n.engines[r].hasPendingWork();
    n.stateHash[r] = std::hash<std::string>{}(type_.describe(n.engines[r].state()));
  }

  static void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); }

  // Operation ids fix their payloads within one history, so logs and messages
  // are fingerprinted by id once the generated payloads are included.
  std::size_t fingerprint(const Node& n) const {
    const std::hash<std::string> text;
    std::size_t h = 0;
    for (const auto& [id, payload] : n.generatedById) mix(h, text(payload));
    const auto ids = [&h](const auto& log) {
      mix(h, log.size());
      for (const auto& [id, env] : log) mix(h, (std::size_t{id.source} << 48) ^ id.seq);
    };
    for (std::size_t r = 0; r < replicas_; ++r) {
      const auto& e = n.engines[r];
      mix(h, n.stateHash[r]);
      ids(e.logLocal());
      ids(e.logRecv());
      mix(h, e.seen().size());
    }
    std::vector<std::size_t> flight;
    for (const auto& [dest, msg, fresh] : n.inFlight) {
      std::size_t m = dest * 2 + (fresh ? 1 : 0);
      mix(m, msg.sender);
      for (const auto& env : msg.envelopes) mix(m, (std::size_t{env.id.source} << 48) ^ env.id.seq);
      if (msg.metadata) mix(m, text(type_.describe(*msg.metadata)));
      flight.push_back(m);
    }
    std::sort(flight.begin(), flight.end());
    for (const auto f : flight) mix(h, f);
    return h;
  }

  static constexpr std::size_t kMaxReported = 1;

  T type_;
  std::vector<PrepareOp> ops_;
  std::size_t maxOps_;
  std::size_t replicas_;
  std::unordered_set<std::size_t> visited_;
  std::unordered_set<std::size_t> quiescent_;
  CheckResult result_;
};

template <NuDataType T>
CheckResult checkHookSoundness(const T& type, std::vector<typename T::PrepareOp> ops, std::size_t maxOps,
                               std::size_t replicas) {
  return SoundnessCheck<T>(type, std::move(ops), maxOps, replicas).run();
}

}  // namespace nuec::verify
