#include <gtest/gtest.h>

#include "nuec/types/ranking.hpp"
#include "nuec/types/vector_clock.hpp"

namespace nuec {
namespace {

TEST(VectorClock, AbsentEntriesReadAsZero) {
  VectorClock vc{{1, 3}};
  EXPECT_EQ(vc[1], 3u);
  EXPECT_EQ(vc[7], 0u);
  EXPECT_EQ(vc.entries().size(), 1u);
}

TEST(VectorClock, ZeroEntriesAreNotStored) {
  VectorClock vc{{1, 0}, {2, 4}};
  EXPECT_EQ(vc.entries().size(), 1u);
  vc.set(2, 0);
  EXPECT_EQ(vc, VectorClock{});
}

TEST(VectorClock, RaiseNeverLowers) {
  VectorClock vc{{0, 5}};
  vc.raise(0, 2);
  EXPECT_EQ(vc[0], 5u);
  vc.raise(0, 9);
  EXPECT_EQ(vc[0], 9u);
}

TEST(VectorClock, MergeIsPointwiseMax) {
  const VectorClock a{{0, 2}, {1, 5}};
  const VectorClock b{{1, 3}, {2, 1}};
  EXPECT_EQ(pointwiseMax(a, b), (VectorClock{{0, 2}, {1, 5}, {2, 1}}));
  EXPECT_EQ(pointwiseMax(a, b), pointwiseMax(b, a));
}

TEST(VectorClock, CoversTimestampsAtOrBelowItsEntry) {
  const VectorClock vc{{1, 3}};
  EXPECT_TRUE(vc.covers(Timestamp{1, 2}));
  EXPECT_TRUE(vc.covers(Timestamp{1, 3}));
  EXPECT_FALSE(vc.covers(Timestamp{1, 4}));
  EXPECT_FALSE(vc.covers(Timestamp{2, 1}));
}

TEST(VectorClock, HappenedBeforeIsStrict) {
  const VectorClock a{{1, 1}};
  const VectorClock b{{1, 2}};
  const VectorClock c{{2, 1}};
  EXPECT_TRUE(happenedBefore(a, b));
  EXPECT_FALSE(happenedBefore(b, a));
  EXPECT_FALSE(happenedBefore(a, a));
  EXPECT_FALSE(happenedBefore(a, c));
  EXPECT_FALSE(happenedBefore(c, a));
  EXPECT_TRUE(happenedBefore(VectorClock{}, a));
}

TEST(VectorClock, BytesFollowTheSizeModel) {
  EXPECT_EQ(VectorClock{}.bytes(), 4u);
  EXPECT_EQ((VectorClock{{0, 1}, {3, 9}}).bytes(), 4u + 2 * 12u);
}

TEST(Ranking, TopOneOfThree) {
  const std::vector<ScoredEntry> entries{{1, 100}, {2, 110}, {3, 105}};
  EXPECT_EQ(topK(entries, 1), (std::vector<ScoredEntry>{{2, 110}}));
}

TEST(Ranking, TiesGoToTheSmallerId) {
  const std::vector<ScoredEntry> entries{{2, 100}, {1, 100}};
  EXPECT_EQ(topK(entries, 1), (std::vector<ScoredEntry>{{1, 100}}));
}

TEST(Ranking, EmptyInput) { EXPECT_TRUE(topK({}, 3).empty()); }

TEST(Ranking, KeepsTheBestScorePerId) {
  const std::vector<ScoredEntry> entries{{1, 5}, {1, 9}, {2, 7}};
  EXPECT_EQ(topK(entries, 3), (std::vector<ScoredEntry>{{1, 9}, {2, 7}}));
}

TEST(Ranking, OrderIsHighestScoreFirst) {
  EXPECT_TRUE(ranksAbove(10, 5, 9, 1));
  EXPECT_TRUE(ranksAbove(10, 1, 10, 2));
  EXPECT_FALSE(ranksAbove(10, 2, 10, 1));
}

}  // namespace
}  // namespace nuec
