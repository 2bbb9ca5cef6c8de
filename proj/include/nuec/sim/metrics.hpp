#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nuec/sim/config.hpp"

namespace nuec::sim {

struct Sample {
  std::size_t round{0};
  std::size_t opsExecuted{0};
  std::uint64_t cumulativePayloadBytes{0};
  double avgReplicaBytes{0};
  friend bool operator==(const Sample&, const Sample&) = default;
};

struct MetricsReport {
  EngineKind engine{EngineKind::Nuec};
  DataTypeKind dataType{DataTypeKind::TopKRmv};
  std::uint64_t seed{0};
  std::size_t nOps{0};
  double removeRatio{0};
  // Every message is counted once per destination; durability sends are also reported separately.
  std::uint64_t totalPayloadBytes{0};
  std::uint64_t durabilityPayloadBytes{0};
  std::uint64_t messageCount{0};
  // Mean over sync-round samples of the mean live-replica size.
  double avgReplicaBytes{0};
  std::vector<std::uint64_t> finalReplicaBytes;
  bool quiescent{false};
  bool observablyEquivalent{false};
  bool oracleMatch{false};
  std::size_t opsGenerated{0};
  std::size_t opsInOracle{0};
  std::vector<Sample> samples;

  bool ok() const { return quiescent && observablyEquivalent && oracleMatch; }
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

}  // namespace nuec::sim
