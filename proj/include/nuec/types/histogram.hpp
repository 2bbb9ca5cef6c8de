#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nuec/core/data_type.hpp"
#include "nuec/size_model.hpp"

namespace nuec {

using Bin = std::uint64_t;
using BinCounts = std::map<Bin, std::uint64_t>;

inline BinCounts pointwiseSum(BinCounts a, const BinCounts& b) {
  for (const auto& [bin, n] : b) a[bin] += n;
  return a;
}

// Histogram where every operation is core.
class Histogram {
 public:
  struct Merge {
    BinCounts delta;
    friend bool operator==(const Merge&, const Merge&) = default;
  };
  using Payload = Merge;
  struct AddOp {
    Bin bin{0};
  };
  struct MergeOp {
    BinCounts histogram;
  };
  using PrepareOp = std::variant<AddOp, MergeOp>;
  struct State {
    BinCounts histogram;
  };
  using Metadata = NoMetadata;
  using Query = BinCounts;

  State initial() const { return {}; }
  Query query(const State& s) const { return s.histogram; }

  Payload prepare(const State&, ReplicaId, const PrepareOp& op) const {
    if (const auto* add = std::get_if<AddOp>(&op)) return Merge{{{add->bin, 1}}};
    const auto& merge = std::get<MergeOp>(op);
    for (const auto& [bin, n] : merge.histogram) {
      if (n == 0) throw std::invalid_argument("histogram: merge counts must be positive");
    }
    return Merge{merge.histogram};
  }

  void apply(State& s, const Payload& p) const {
    for (const auto& [bin, n] : p.delta) s.histogram[bin] += n;
  }

  std::set<OpId> maskedForever(const OpLog<Payload>&, const State&, const OpLog<Payload>&,
                               const HookContext&) const {
    return {};
  }
  std::set<OpId> hasObservableImpact(const OpLog<Payload>& local, const State&, const OpLog<Payload>&,
                                     const HookContext&) const {
    std::set<OpId> out;
    for (const auto& [id, env] : local) out.insert(id);
    return out;
  }
  std::set<OpId> mayHaveObservableImpact(const OpLog<Payload>&, const State&, const OpLog<Payload>&,
                                         const HookContext&) const {
    return {};
  }

  // All of the sender's own merges collapse into one; forwarded copies travel unchanged.
  std::vector<Envelope<Payload>> compact(ReplicaId sender, const std::vector<Envelope<Payload>>& ops) const {
    std::vector<Envelope<Payload>> out;
    std::vector<OpId> ids;
    BinCounts sum;
    for (const auto& env : ops) {
      if (env.id.source != sender || env.compacted()) {
        out.push_back(env);
        continue;
      }
      sum = pointwiseSum(std::move(sum), env.payload.delta);
      ids.push_back(env.id);
    }
    if (!ids.empty()) out.push_back(Envelope<Payload>{compactedId(sender, ids), ids, Merge{std::move(sum)}, false});
    return out;
  }

  Payload residual(const Payload& p, const std::vector<Payload>& applied) const {
    Payload rest = p;
    for (const auto& a : applied) {
      for (const auto& [bin, n] : a.delta) {
        auto it = rest.delta.find(bin);
        if (it == rest.delta.end() || it->second < n) throw std::logic_error("histogram: residual underflow");
        it->second -= n;
        if (it->second == 0) rest.delta.erase(it);
      }
    }
    return rest;
  }

  Metadata sendMetadata(const State&) const { return {}; }
  void receiveMetadata(State&, const Metadata&) const {}

  std::size_t payloadBytes(const Payload& p) const { return p.delta.size() * (size::kId + size::kScalar); }
  std::size_t metadataBytes(const Metadata&) const { return 0; }
  std::size_t stateBytes(const State& s) const { return s.histogram.size() * (size::kId + size::kScalar); }

  std::string describe(const State& s) const { return describeCounts(s.histogram); }
  std::string describe(const Payload& p) const { return "merge(" + describeCounts(p.delta) + ")"; }
  std::string describe(const Metadata&) const { return {}; }

 private:
  static std::string describeCounts(const BinCounts& counts) {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (const auto& [bin, n] : counts) {
      os << (first ? "" : ",") << bin << "->" << n;
      first = false;
    }
    os << ']';
    return os.str();
  }
};

}  // namespace nuec
