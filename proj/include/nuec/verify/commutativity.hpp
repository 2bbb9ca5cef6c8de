#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "nuec/core/data_type.hpp"
#include "nuec/oracle.hpp"
#include "nuec/verify/report.hpp"

namespace nuec::verify {

// Enumerates every script of up to `maxOps` operations drawn from `ops` and
// spread over `replicas` replicas. Before generating an operation, a replica
// may first learn any longer prefix of each other replica's operations, so
// effect payloads can depend on earlier remote ones. For each distinct payload
// multiset, every application order is checked against the oracle.
//
// Two reductions keep this exhaustive but cheap. Adjacent operations of
// different replicas where the later one does not learn the earlier one are
// generated in replica order only. Orders that reach an identical state after
// applying the same subset share every continuation, so only the first of them
// is followed.
template <NuDataType T>
class CommutativityCheck {
 public:
  using Payload = typename T::Payload;
  using PrepareOp = typename T::PrepareOp;
  using State = typename T::State;
  using Metadata = typename T::Metadata;

  CommutativityCheck(T type, std::vector<PrepareOp> ops, std::size_t maxOps, std::size_t replicas = 2)
      : type_(std::move(type)), ops_(std::move(ops)), maxOps_(maxOps), replicas_(replicas) {}

  CheckResult run() {
    result_ = CheckResult{"commutativity", 0, {}};
    checked_.clear();
    Script root;
    root.states.assign(replicas_, type_.initial());
    root.produced.assign(replicas_, {});
    root.sentMeta.assign(replicas_, {});
    root.learned.assign(replicas_, std::vector<std::size_t>(replicas_, 0));
    explore(root);
    return result_;
  }

 private:
  struct Script {
    std::vector<State> states;
    std::vector<std::vector<Payload>> produced;
    // Metadata the replica would attach right after each of its operations.
    std::vector<std::vector<Metadata>> sentMeta;
    std::vector<std::vector<std::size_t>> learned;
    std::vector<std::string> trace;
    std::size_t count{0};
    std::size_t lastReplica{0};
  };

  void explore(const Script& s) {
    if (s.count > 0) checkOrders(s);
    if (s.count == maxOps_) return;
    for (std::size_t r = 0; r < replicas_; ++r) {
      std::vector<std::size_t> upTo = s.learned[r];
      learnChoices(s, r, 0, upTo);
    }
  }

  // Picks, for every other replica, how far `r` has learned before acting.
  void learnChoices(const Script& s, std::size_t r, std::size_t other, std::vector<std::size_t>& upTo) {
    if (other == replicas_) {
      act(s, r, upTo);
      return;
    }
    if (other == r) {
      learnChoices(s, r, other + 1, upTo);
      return;
    }
    for (std::size_t j = s.learned[r][other]; j <= s.produced[other].size(); ++j) {
      upTo[other] = j;
      learnChoices(s, r, other + 1, upTo);
    }
    upTo[other] = s.learned[r][other];
  }

  void act(const Script& s, std::size_t r, const std::vector<std::size_t>& upTo) {
    const std::size_t prev = s.lastReplica;
    if (s.count > 0 && r < prev && upTo[prev] < s.produced[prev].size()) return;
    Script base = s;
    std::string learnt;
    for (std::size_t o = 0; o < replicas_; ++o) {
      if (o == r || upTo[o] == s.learned[r][o]) continue;
      for (std::size_t j = s.learned[r][o]; j < upTo[o]; ++j) type_.apply(base.states[r], s.produced[o][j]);
      type_.receiveMetadata(base.states[r], s.sentMeta[o][upTo[o] - 1]);
      base.learned[r][o] = upTo[o];
      learnt += " r" + std::to_string(o) + "#" + std::to_string(upTo[o]);
    }
    if (!learnt.empty()) base.trace.push_back("r" + std::to_string(r) + " learns" + learnt);
    for (const auto& op : ops_) {
      Script next = base;
      auto payload = type_.prepare(next.states[r], static_cast<ReplicaId>(r), op);
      type_.apply(next.states[r], payload);
      next.trace.push_back("r" + std::to_string(r) + " generates " + type_.describe(payload));
      next.produced[r].push_back(std::move(payload));
      next.sentMeta[r].push_back(type_.sendMetadata(next.states[r]));
      ++next.count;
      next.lastReplica = r;
      explore(next);
    }
  }

  void checkOrders(const Script& s) {
    std::vector<Payload> all;
    for (const auto& p : s.produced) all.insert(all.end(), p.begin(), p.end());
    std::vector<std::string> names;
    for (const auto& p : all) names.push_back(type_.describe(p));
    std::sort(names.begin(), names.end());
    std::string key;
    for (const auto& n : names) key += n + '|';
    if (!checked_.insert(key).second) return;
    ++result_.cases;

    const auto expected = oracle::evaluate(type_, all);
    std::vector<std::size_t> order;
    reached_.assign(std::size_t{1} << all.size(), {});
    permute(s, all, expected, type_.initial(), order, 0);
  }

  template <class Query>
  void permute(const Script& s, const std::vector<Payload>& all, const Query& expected, const State& state,
               std::vector<std::size_t>& order, unsigned used) {
    if (order.size() == all.size()) {
      if (type_.query(state) == expected || result_.failures.size() >= kMaxReported) return;
      Counterexample cx;
      cx.detail = "application order yields " + type_.describe(state) + ", which differs from the oracle";
      cx.ops = names(all);
      cx.trace = s.trace;
      std::string applied = "apply order:";
      for (auto i : order) applied += ' ' + std::to_string(i);
      cx.trace.push_back(applied);
      result_.failures.push_back(std::move(cx));
      return;
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (used & (1u << i)) continue;
      State next = state;
      type_.apply(next, all[i]);
      if (!reached_[used | (1u << i)].insert(type_.describe(next)).second) continue;
      order.push_back(i);
      permute(s, all, expected, next, order, used | (1u << i));
      order.pop_back();
    }
  }

  std::vector<std::string> names(const std::vector<Payload>& all) const {
    std::vector<std::string> out;
    for (const auto& p : all) out.push_back(type_.describe(p));
    return out;
  }

  static constexpr std::size_t kMaxReported = 5;

  T type_;
  std::vector<PrepareOp> ops_;
  std::size_t maxOps_;
  std::size_t replicas_;
  std::set<std::string> checked_;
  std::vector<std::set<std::string>> reached_;
  CheckResult result_;
};

template <NuDataType T>
CheckResult checkCommutativity(const T& type, std::vector<typename T::PrepareOp> ops, std::size_t maxOps,
                               std::size_t replicas = 2) {
  return CommutativityCheck<T>(type, std::move(ops), maxOps, replicas).run();
}

}  // namespace nuec::verify
