#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nuec/oracle.hpp"

namespace nuec {
namespace {

TEST(Oracle, TopOneScenarioAfterRemove) {
  const TopKRmv type(1);
  const std::vector<TopKRmv::Payload> log{TopKRmv::Add{1, 100, {0, 1}}, TopKRmv::Add{2, 110, {1, 1}},
                                          TopKRmv::Add{3, 105, {2, 1}}, TopKRmv::Rmv{2, VectorClock{{1, 1}}}};
  EXPECT_EQ(oracle::evaluate(type, log), (std::vector<ScoredEntry>{{3, 105}}));
}

TEST(Oracle, EmptyLogGivesTheInitialQuery) {
  EXPECT_EQ(oracle::evaluate(TopKRmv{2}, {}), TopKRmv{2}.query(TopKRmv{2}.initial()));
  EXPECT_EQ(oracle::evaluate(TopSum{2}, {}), TopSum{2}.query(TopSum{2}.initial()));
  EXPECT_EQ(oracle::evaluate(TopK{2}, {}), TopK{2}.query(TopK{2}.initial()));
  EXPECT_EQ(oracle::evaluate(Histogram{}, {}), Histogram{}.query(Histogram{}.initial()));
}

TEST(Oracle, ConcurrentAddSurvivesRemove) {
  const std::vector<TopKRmv::Payload> log{TopKRmv::Add{1, 7, {0, 1}}, TopKRmv::Add{1, 3, {1, 1}},
                                          TopKRmv::Rmv{1, VectorClock{{0, 1}}}};
  EXPECT_EQ(oracle::evaluate(TopKRmv{1}, log), (std::vector<ScoredEntry>{{1, 3}}));
}

TEST(Oracle, TopSumMatchesBruteForceSummation) {
  std::mt19937_64 rng(11);
  const TopSum type(5);
  std::vector<TopSum::Payload> log;
  std::map<ElementId, Score> totals;
  for (int i = 0; i < 200; ++i) {
    const TopSum::Add add{rng() % 20, static_cast<Score>(rng() % 50 + 1)};
    log.push_back(add);
    totals[add.id] += add.amount;
  }
  std::vector<ScoredEntry> expected;
  for (const auto& [id, sum] : totals) expected.push_back({id, sum});
  std::stable_sort(expected.begin(), expected.end(),
                   [](const ScoredEntry& a, const ScoredEntry& b) { return a.score > b.score; });
  expected.resize(5);
  EXPECT_EQ(oracle::evaluate(type, log), expected);
}

TEST(Oracle, OrderIndependent) {
  std::mt19937_64 rng(5);
  const TopKRmv type(3);
  std::vector<TopKRmv::Payload> log;
  for (std::uint64_t i = 1; i <= 30; ++i) {
    const auto site = static_cast<ReplicaId>(rng() % 3);
    if (i % 5 == 0) {
      log.push_back(TopKRmv::Rmv{rng() % 6, VectorClock{{site, i / 2}}});
    } else {
      log.push_back(TopKRmv::Add{rng() % 6, static_cast<Score>(rng() % 40), {site, i}});
    }
  }
  const auto expected = oracle::evaluate(type, log);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(log.begin(), log.end(), rng);
    EXPECT_EQ(oracle::evaluate(type, log), expected);
  }
}

// The oracle agrees with sequential application through the data type itself.
TEST(Oracle, AgreesWithSequentialApplication) {
  std::mt19937_64 rng(8);
  const TopK topk(4);
  const Histogram hist;
  auto s = topk.initial();
  auto h = hist.initial();
  std::vector<TopK::Payload> adds;
  std::vector<Histogram::Payload> merges;
  for (int i = 0; i < 100; ++i) {
    adds.push_back({rng() % 10, static_cast<Score>(rng() % 100)});
    topk.apply(s, adds.back());
    merges.push_back({{{rng() % 5, 1}}});
    hist.apply(h, merges.back());
  }
  EXPECT_EQ(oracle::evaluate(topk, adds), topk.query(s));
  EXPECT_EQ(oracle::evaluate(hist, merges), hist.query(h));
}

}  // namespace
}  // namespace nuec
