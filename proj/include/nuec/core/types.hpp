#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace nuec {

using ReplicaId = std::uint32_t;
using ElementId = std::uint64_t;

// Globally unique identity of a generated effect operation.
struct OpId {
  ReplicaId source{0};
  std::uint64_t seq{0};

  friend constexpr auto operator<=>(const OpId&, const OpId&) = default;
};

// Identifiers of compacted envelopes live in the upper half of the sequence space.
inline constexpr std::uint64_t kCompactedBit = std::uint64_t{1} << 63;

// Deterministic identity for an envelope that merges several operations.
inline OpId compactedId(ReplicaId sender, std::span<const OpId> constituents) {
  if (constituents.size() == 1) return constituents.front();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const auto& c : constituents) {
    mix(c.source);
    mix(c.seq);
  }
  return OpId{sender, kCompactedBit | (h & ~kCompactedBit)};
}

template <class Payload>
struct Envelope {
  OpId id;
  // Operations whose effects this envelope carries; {id} unless compacted.
  std::vector<OpId> constituents;
  Payload payload;
  bool durabilityCopy{false};

  static Envelope single(OpId id, Payload payload, bool durability = false) {
    return Envelope{id, {id}, std::move(payload), durability};
  }
  bool compacted() const { return constituents.size() > 1; }
};

template <class Payload, class Metadata>
struct SyncMessage {
  ReplicaId sender{0};
  std::vector<Envelope<Payload>> envelopes;
  std::optional<Metadata> metadata;
  bool broadcast{true};
  // Only meaningful for point-to-point sends.
  ReplicaId destination{0};
};

// Read-only information the relevance hooks may consult besides the logs.
struct HookContext {
  ReplicaId self{0};
  std::size_t numReplicas{1};
  const std::set<ReplicaId>* failed{nullptr};

  bool isFailed(ReplicaId r) const { return failed != nullptr && failed->contains(r); }
};

// f replicas following `self` modulo n.
inline std::vector<ReplicaId> durabilityPeersOf(ReplicaId self, std::size_t n, std::size_t f) {
  std::vector<ReplicaId> peers;
  for (std::size_t k = 1; k <= f && k < n; ++k) {
    peers.push_back(static_cast<ReplicaId>((self + k) % n));
  }
  return peers;
}

}  // namespace nuec
