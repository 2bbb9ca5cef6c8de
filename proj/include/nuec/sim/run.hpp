#pragma once

#include "nuec/baselines/fullop.hpp"
#include "nuec/baselines/stateship.hpp"
#include "nuec/core/engine.hpp"
#include "nuec/sim/simulator.hpp"

namespace nuec::sim {

template <class T, class Ship>
MetricsReport runWith(const SimConfig& cfg, T type) {
  switch (cfg.engine) {
    case EngineKind::Nuec: return Simulation<ReplicaEngine<T>>(cfg, std::move(type)).run();
    case EngineKind::FullOp: return Simulation<FullOpReplica<T>>(cfg, std::move(type)).run();
    case EngineKind::StateShip: return Simulation<StateShipReplica<Ship>>(cfg, std::move(type)).run();
  }
  throw ConfigError("engine", "unsupported engine");
}

// Runs one configuration end to end.
inline MetricsReport runSimulation(const SimConfig& cfg) {
  cfg.validate();
  switch (cfg.dataType) {
    case DataTypeKind::TopKRmv: return runWith<TopKRmv, TopKRmvShip>(cfg, TopKRmv{cfg.k});
    case DataTypeKind::TopSum: return runWith<TopSum, TopSumShip>(cfg, TopSum{cfg.k});
    case DataTypeKind::TopK: return runWith<TopK, TopKShip>(cfg, TopK{cfg.k});
    case DataTypeKind::Histogram: return runWith<Histogram, HistogramShip>(cfg, Histogram{});
  }
  throw ConfigError("dataType", "unsupported data type");
}

}  // namespace nuec::sim
