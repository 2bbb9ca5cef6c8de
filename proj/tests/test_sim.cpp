#include <gtest/gtest.h>

#include <cmath>

#include "nuec/sim/run.hpp"

namespace nuec::sim {
namespace {

TEST(Workload, SameSeedSameSequence) {
  SimConfig cfg;
  cfg.nOps = 2000;
  EXPECT_EQ(generateWorkload(cfg), generateWorkload(cfg));
  auto other = cfg;
  other.seed = 2;
  EXPECT_NE(generateWorkload(cfg), generateWorkload(other));
}

TEST(Workload, NoRemovesAtRatioZero) {
  SimConfig cfg;
  cfg.nOps = 5000;
  cfg.removeRatio = 0;
  for (const auto& w : generateWorkload(cfg)) EXPECT_FALSE(w.remove);
}

TEST(Workload, TypesWithoutRemovesIgnoreTheRatio) {
  SimConfig cfg;
  cfg.nOps = 5000;
  cfg.removeRatio = 0.5;
  cfg.dataType = DataTypeKind::TopSum;
  for (const auto& w : generateWorkload(cfg)) EXPECT_FALSE(w.remove);
}

TEST(Workload, RemoveCountWithinThreeSigma) {
  SimConfig cfg;
  cfg.nOps = 500000;
  cfg.removeRatio = 0.05;
  std::size_t removes = 0;
  for (const auto& w : generateWorkload(cfg)) removes += w.remove ? 1 : 0;
  const double sigma = std::sqrt(500000 * 0.05 * 0.95);
  EXPECT_LT(std::abs(static_cast<double>(removes) - 25000.0), 3 * sigma);
}

TEST(Workload, ValuesStayInRange) {
  SimConfig cfg;
  cfg.nOps = 3000;
  cfg.nIds = 17;
  cfg.maxScore = 40;
  std::set<ElementId> added;
  for (const auto& w : generateWorkload(cfg)) {
    EXPECT_LT(w.replica, cfg.nReplicas);
    EXPECT_GE(w.id, 1u);
    EXPECT_LE(w.id, 17u);
    if (w.remove) {
      EXPECT_TRUE(added.contains(w.id));
    } else {
      EXPECT_GE(w.value, 1);
      EXPECT_LE(w.value, 40);
      added.insert(w.id);
    }
  }
}

TEST(Config, DefaultsAreTheDeskSetting) {
  const SimConfig cfg;
  EXPECT_EQ(cfg.nReplicas, 5u);
  EXPECT_EQ(cfg.f, 2u);
  EXPECT_EQ(cfg.k, 100u);
  EXPECT_EQ(cfg.syncEveryEvents, 100u);
  EXPECT_NO_THROW(cfg.validate());
}

void expectRejected(SimConfig cfg, const std::string& field) {
  try {
    cfg.validate();
    ADD_FAILURE() << "accepted invalid " << field;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), field);
  }
}

TEST(Config, RejectsInvalidValues) {
  SimConfig cfg;
  cfg.removeRatio = 1.5;
  expectRejected(cfg, "removeRatio");
  cfg = {};
  cfg.f = 5;
  expectRejected(cfg, "f");
  cfg = {};
  cfg.k = 0;
  expectRejected(cfg, "K");
  cfg = {};
  cfg.syncEveryEvents = 0;
  expectRejected(cfg, "syncEveryEvents");
  cfg = {};
  cfg.crashSchedule = {{1, 10}, {1, 20}};
  expectRejected(cfg, "crashSchedule");
  cfg = {};
  cfg.crashSchedule = {{9, 10}};
  expectRejected(cfg, "crashSchedule");
  cfg = {};
  cfg.f = 1;
  cfg.crashSchedule = {{1, 10}, {2, 20}};
  expectRejected(cfg, "crashSchedule");
}

TEST(Config, NamesRoundTrip) {
  for (auto k : {DataTypeKind::TopKRmv, DataTypeKind::TopSum, DataTypeKind::TopK, DataTypeKind::Histogram}) {
    EXPECT_EQ(parseDataType(name(k)), k);
  }
  for (auto k : {EngineKind::Nuec, EngineKind::FullOp, EngineKind::StateShip}) EXPECT_EQ(parseEngine(name(k)), k);
  EXPECT_THROW(parseEngine("delta"), ConfigError);
}

TEST(Equivalence, Helper) {
  EXPECT_TRUE(checkObservableEquivalence(std::vector<int>{}));
  EXPECT_TRUE(checkObservableEquivalence(std::vector<int>{4}));
  EXPECT_TRUE(checkObservableEquivalence(std::vector<int>{4, 4, 4}));
  EXPECT_FALSE(checkObservableEquivalence(std::vector<int>{4, 4, 5}));
}

TEST(Simulator, TopOneScenarioOnTwoReplicas) {
  SimConfig cfg;
  cfg.nReplicas = 2;
  cfg.f = 1;
  cfg.k = 1;
  cfg.syncEveryEvents = 1;
  const std::vector<WorkItem> work{{0, false, 1, 100}, {1, false, 2, 110}, {0, false, 3, 105}, {1, true, 2, 0}};
  Simulation<ReplicaEngine<TopKRmv>> s(cfg, TopKRmv{1});
  s.recordBroadcasts(true);
  const auto r = s.run(work);
  EXPECT_TRUE(r.quiescent);
  EXPECT_TRUE(r.oracleMatch);
  EXPECT_EQ(s.replicas()[0].query(), (std::vector<ScoredEntry>{{3, 105}}));

  // add(c,105) only travels once rmv(b) has made it the top.
  const auto cId = s.generated()[2].first;
  const auto rmvId = s.generated()[3].first;
  std::optional<std::size_t> cAt, rmvAt;
  for (std::size_t i = 0; i < s.broadcasts().size(); ++i) {
    for (const auto& env : s.broadcasts()[i].envelopes) {
      if (env.id == cId && !cAt) cAt = i;
      if (env.id == rmvId && !rmvAt) rmvAt = i;
    }
  }
  ASSERT_TRUE(rmvAt.has_value());
  ASSERT_TRUE(cAt.has_value());
  EXPECT_GT(*cAt, *rmvAt);
}

TEST(Simulator, ZeroOps) {
  SimConfig cfg;
  cfg.nOps = 0;
  const auto r = runSimulation(cfg);
  EXPECT_EQ(r.totalPayloadBytes, 0u);
  EXPECT_EQ(r.messageCount, 0u);
  EXPECT_TRUE(r.ok());
}

TEST(Simulator, Deterministic) {
  SimConfig cfg;
  cfg.nOps = 3000;
  cfg.maxDelay = 7;
  cfg.crashSchedule = {{2, 1000}};
  EXPECT_EQ(runSimulation(cfg), runSimulation(cfg));
}

TEST(Simulator, NuecUsesLessBandwidthThanFullOp) {
  SimConfig cfg;
  cfg.nOps = 20000;
  auto full = cfg;
  full.engine = EngineKind::FullOp;
  EXPECT_LT(runSimulation(cfg).totalPayloadBytes, runSimulation(full).totalPayloadBytes);
}

TEST(Simulator, SamplesOncePerRoundPlusTheEnd) {
  SimConfig cfg;
  cfg.nOps = 1050;
  cfg.syncEveryEvents = 10;
  const auto r = runSimulation(cfg);
  ASSERT_EQ(r.samples.size(), 1050u / 50 + 1);
  EXPECT_EQ(r.samples.front().opsExecuted, 50u);
  EXPECT_EQ(r.samples.back().opsExecuted, 1050u);
  for (std::size_t i = 1; i < r.samples.size(); ++i) {
    EXPECT_GE(r.samples[i].cumulativePayloadBytes, r.samples[i - 1].cumulativePayloadBytes);
  }
}

TEST(Simulator, DurabilityTrafficIsPartOfTheTotal) {
  SimConfig cfg;
  cfg.nOps = 1000;
  const auto r = runSimulation(cfg);
  EXPECT_GT(r.durabilityPayloadBytes, 0u);
  EXPECT_LT(r.durabilityPayloadBytes, r.totalPayloadBytes);
  auto none = cfg;
  none.f = 0;
  EXPECT_EQ(runSimulation(none).durabilityPayloadBytes, 0u);
}

TEST(Simulator, CrashRightAfterExecKeepsTheOp) {
  SimConfig cfg;
  cfg.nReplicas = 3;
  cfg.f = 1;
  cfg.k = 1;
  cfg.syncEveryEvents = 100;
  cfg.crashSchedule = {{0, 2}};
  const std::vector<WorkItem> work{{0, false, 7, 500}, {1, false, 1, 3}, {2, false, 2, 4}};
  Simulation<ReplicaEngine<TopKRmv>> s(cfg, TopKRmv{1});
  const auto r = s.run(work);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(s.replicas()[1].query(), (std::vector<ScoredEntry>{{7, 500}}));
  EXPECT_EQ(r.opsInOracle, 3u);
}

TEST(Simulator, CopyInFlightAtCrashIsStillAdopted) {
  SimConfig cfg;
  cfg.nReplicas = 3;
  cfg.f = 1;
  cfg.k = 1;
  cfg.crashSchedule = {{0, 1}};
  // The copy of op 0 is still in flight when r0 crashes at event 1.
  const std::vector<WorkItem> work{{0, false, 7, 500}, {1, false, 1, 3}};
  Simulation<ReplicaEngine<TopKRmv>> s(cfg, TopKRmv{1});
  const auto r = s.run(work);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.opsGenerated, 2u);
  EXPECT_EQ(r.opsInOracle, 2u);
  EXPECT_EQ(s.replicas()[2].query(), (std::vector<ScoredEntry>{{7, 500}}));
}

TEST(Simulator, RandomCrashesAllTypes) {
  for (auto kind : {DataTypeKind::TopKRmv, DataTypeKind::TopSum, DataTypeKind::TopK, DataTypeKind::Histogram}) {
    SimConfig cfg;
    cfg.dataType = kind;
    cfg.nOps = 1000;
    cfg.nIds = 40;
    cfg.k = 5;
    cfg.syncEveryEvents = 10;
    cfg.maxDelay = 3;
    cfg.crashSchedule = {{1, 150}, {4, 640}};
    const auto r = runSimulation(cfg);
    EXPECT_TRUE(r.ok()) << name(kind);
    EXPECT_EQ(r.finalReplicaBytes[1], 0u);
  }
}

}  // namespace
}  // namespace nuec::sim
