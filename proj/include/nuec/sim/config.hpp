#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nuec/core/types.hpp"
#include "nuec/types/ranking.hpp"

namespace nuec::sim {

enum class DataTypeKind { TopKRmv, TopSum, TopK, Histogram };
enum class EngineKind { Nuec, FullOp, StateShip };

inline std::string_view name(DataTypeKind k) {
  switch (k) {
    case DataTypeKind::TopKRmv: return "topk-rmv";
    case DataTypeKind::TopSum: return "top-sum";
    case DataTypeKind::TopK: return "topk";
    case DataTypeKind::Histogram: return "histogram";
  }
  return "?";
}

inline std::string_view name(EngineKind k) {
  switch (k) {
    case EngineKind::Nuec: return "nuec";
    case EngineKind::FullOp: return "fullop";
    case EngineKind::StateShip: return "stateship";
  }
  return "?";
}

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message, std::size_t line = 0)
      : std::runtime_error(format(field, message, line)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& field, const std::string& message, std::size_t line) {
    std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string{};
    return out + field + ": " + message;
  }
  std::string field_;
  std::size_t line_;
};

inline DataTypeKind parseDataType(std::string_view s) {
  for (auto k : {DataTypeKind::TopKRmv, DataTypeKind::TopSum, DataTypeKind::TopK, DataTypeKind::Histogram}) {
    if (s == name(k)) return k;
  }
  throw ConfigError("dataType", "unknown data type '" + std::string(s) + "'");
}

inline EngineKind parseEngine(std::string_view s) {
  for (auto k : {EngineKind::Nuec, EngineKind::FullOp, EngineKind::StateShip}) {
    if (s == name(k)) return k;
  }
  throw ConfigError("engine", "unknown engine '" + std::string(s) + "'");
}

struct CrashSpec {
  ReplicaId replica{0};
  std::uint64_t atEvent{0};
  friend bool operator==(const CrashSpec&, const CrashSpec&) = default;
};

struct SimConfig {
  std::size_t nReplicas{5};
  std::size_t f{2};
  DataTypeKind dataType{DataTypeKind::TopKRmv};
  EngineKind engine{EngineKind::Nuec};
  std::size_t k{100};
  std::size_t nOps{50000};
  std::size_t nIds{1000};
  Score maxScore{250000};
  double removeRatio{0.05};
  std::size_t syncEveryEvents{100};
  std::uint64_t seed{1};
  std::vector<CrashSpec> crashSchedule;
  // 1 delivers every message one tick after it is sent; larger values draw a
  // uniform delay in [1, maxDelay] per destination, reordering messages.
  std::size_t maxDelay{1};

  void validate() const {
    if (nReplicas == 0) throw ConfigError("nReplicas", "must be positive");
    if (f >= nReplicas) throw ConfigError("f", "must be smaller than nReplicas");
    if (k == 0) throw ConfigError("K", "must be positive");
    if (nIds == 0) throw ConfigError("nIds", "must be positive");
    if (maxScore <= 0) throw ConfigError("maxScore", "must be positive");
    if (!(removeRatio >= 0.0 && removeRatio <= 1.0)) throw ConfigError("removeRatio", "must lie in [0,1]");
    if (syncEveryEvents == 0) throw ConfigError("syncEveryEvents", "must be positive");
    if (maxDelay == 0) throw ConfigError("maxDelay", "must be positive");
    if (crashSchedule.size() > f) throw ConfigError("crashSchedule", "more crashes than f");
    std::set<ReplicaId> crashed;
    for (const auto& c : crashSchedule) {
      if (c.replica >= nReplicas) throw ConfigError("crashSchedule", "replica id out of range");
      if (!crashed.insert(c.replica).second) throw ConfigError("crashSchedule", "replica crashes twice");
    }
  }
};

}  // namespace nuec::sim
