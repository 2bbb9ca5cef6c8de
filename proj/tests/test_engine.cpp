#include <gtest/gtest.h>

#include <algorithm>

#include "cluster.hpp"
#include "nuec/core/engine.hpp"
#include "nuec/types/histogram.hpp"
#include "nuec/types/top_sum.hpp"
#include "nuec/types/topk_rmv.hpp"

namespace nuec {
namespace {

using Engine = ReplicaEngine<TopKRmv>;
using TopCluster = testing::Cluster<Engine>;
constexpr ElementId a = 1, b = 2, c = 3;

bool broadcastCarries(const std::vector<Engine::Message>& msgs, const OpId& id) {
  return std::any_of(msgs.begin(), msgs.end(), [&](const Engine::Message& m) {
    return std::any_of(m.envelopes.begin(), m.envelopes.end(), [&](const auto& env) {
      return std::find(env.constituents.begin(), env.constituents.end(), id) != env.constituents.end();
    });
  });
}

TEST(Engine, ExecAppliesAtTheSource) {
  Engine e(TopKRmv{1}, 0, 1);
  e.execOp(TopKRmv::AddOp{a, 100});
  EXPECT_EQ(e.query(), (std::vector<ScoredEntry>{{a, 100}}));
}

TEST(Engine, ExecLogsLocally) {
  Engine e(TopKRmv{1}, 0, 1);
  EXPECT_TRUE(e.logLocal().empty());
  e.execOp(TopKRmv::AddOp{a, 100});
  EXPECT_EQ(e.logLocal().size(), 1u);
}

TEST(Engine, SequenceNumbersIncrease) {
  Engine e(TopKRmv{1}, 1, 2);
  EXPECT_EQ(e.execOp(TopKRmv::AddOp{a, 1}).op.id, (OpId{1, 1}));
  EXPECT_EQ(e.execOp(TopKRmv::AddOp{a, 2}).op.id, (OpId{1, 2}));
  EXPECT_EQ(e.seqCounter(), 2u);
}

TEST(Engine, ExecSendsCopiesToDurabilityPeers) {
  Engine e(TopKRmv{1}, 3, 5, durabilityPeersOf(3, 5, 2));
  const auto out = e.execOp(TopKRmv::AddOp{a, 1});
  ASSERT_EQ(out.sends.size(), 2u);
  EXPECT_EQ(out.sends[0].destination, 4u);
  EXPECT_EQ(out.sends[1].destination, 0u);
  for (const auto& m : out.sends) {
    EXPECT_FALSE(m.broadcast);
    EXPECT_TRUE(m.envelopes.at(0).durabilityCopy);
  }
}

TEST(Engine, NothingToPropagateWhenEmpty) {
  Engine e(TopKRmv{1}, 0, 1);
  EXPECT_TRUE(e.opsToPropagate().empty());
  EXPECT_FALSE(e.sync().has_value());
}

TEST(Engine, AddBelowTheTopStaysLocal) {
  TopCluster cl(TopKRmv{1}, 2);
  cl.exec(0, TopKRmv::AddOp{b, 110});
  cl.settle();
  cl.exec(1, TopKRmv::AddOp{c, 105});
  EXPECT_TRUE(cl[1].opsToPropagate().empty());
  EXPECT_EQ(cl[1].logLocal().size(), 1u);
}

TEST(Engine, MaskedAddIsDroppedAndTheSurvivorPropagates) {
  Engine e(TopKRmv{1}, 1, 2);
  e.execOp(TopKRmv::AddOp{a, 1});
  e.execOp(TopKRmv::AddOp{a, 5});
  const auto ops = e.opsToPropagate();
  ASSERT_EQ(ops.size(), 1u);
  EXPECT_EQ(ops[0].id, (OpId{1, 2}));
  EXPECT_FALSE(e.logLocal().contains(OpId{1, 1}));
}

TEST(Engine, SyncMovesSentOpsToTheReceivedLog) {
  Engine e(TopKRmv{1}, 0, 2);
  e.execOp(TopKRmv::AddOp{b, 110});
  const auto msg = e.sync();
  ASSERT_TRUE(msg.has_value());
  EXPECT_TRUE(msg->broadcast);
  ASSERT_EQ(msg->envelopes.size(), 1u);
  EXPECT_FALSE(msg->envelopes[0].durabilityCopy);
  EXPECT_TRUE(e.logLocal().empty());
  EXPECT_TRUE(e.logRecv().contains(OpId{0, 1}));
  ASSERT_TRUE(msg->metadata.has_value());
  EXPECT_EQ(*msg->metadata, (VectorClock{{0, 1}}));
}

TEST(Engine, HistogramSyncSendsOneMerge) {
  ReplicaEngine<Histogram> e(Histogram{}, 0, 2);
  e.execOp(Histogram::AddOp{1});
  e.execOp(Histogram::MergeOp{{{1, 2}}});
  const auto msg = e.sync();
  ASSERT_TRUE(msg.has_value());
  ASSERT_EQ(msg->envelopes.size(), 1u);
  EXPECT_EQ(msg->envelopes[0].payload.delta, (BinCounts{{1, 3}}));
}

TEST(Engine, DuplicateBroadcastIsIgnored) {
  Engine src(TopKRmv{2}, 0, 2), dst(TopKRmv{2}, 1, 2);
  src.execOp(TopKRmv::AddOp{a, 5});
  const auto msg = *src.sync();
  dst.onReceive(msg);
  const auto state = dst.type().describe(dst.state());
  dst.onReceive(msg);
  EXPECT_EQ(dst.type().describe(dst.state()), state);
  EXPECT_EQ(dst.logRecv().size(), 1u);
}

TEST(Engine, DuplicateCompactedBroadcastIsIgnored) {
  ReplicaEngine<TopSum> src(TopSum{1}, 0, 2), dst(TopSum{1}, 1, 2);
  src.execOp(TopSum::AddOp{a, 2});
  src.execOp(TopSum::AddOp{a, 3});
  const auto msg = *src.sync();
  ASSERT_EQ(msg.envelopes.size(), 1u);
  dst.onReceive(msg);
  dst.onReceive(msg);
  EXPECT_EQ(dst.state().sums.at(a), 5);
}

TEST(Engine, CompactedEnvelopeAppliesOnlyTheUnseenPart) {
  // r1 holds a copy of r0's first add when r0 fails and adopts it; r0's
  // compacted broadcast of both adds then arrives.
  ReplicaEngine<TopSum> src(TopSum{1}, 0, 2, {1}), dst(TopSum{1}, 1, 2);
  const auto first = src.execOp(TopSum::AddOp{a, 2});
  src.execOp(TopSum::AddOp{a, 3});
  const auto msg = *src.sync();
  dst.onReceive(first.sends.at(0));
  dst.onReplicaFailed(0);
  EXPECT_EQ(dst.state().sums.at(a), 2);
  dst.onReceive(msg);
  EXPECT_EQ(dst.state().sums.at(a), 5);
  EXPECT_TRUE(dst.logLocal().empty());
}

TEST(Engine, RemoveOfTheTopElementReachesEveryone) {
  TopCluster cl(TopKRmv{1}, 2);
  cl.exec(0, TopKRmv::AddOp{b, 110});
  cl.settle();
  EXPECT_EQ(cl[1].query(), (std::vector<ScoredEntry>{{b, 110}}));
  cl.exec(0, TopKRmv::RmvOp{b});
  cl.settle();
  EXPECT_TRUE(cl[1].query().empty());
}

TEST(Engine, DurabilityCopyIsHeldAsideUntilNeeded) {
  TopCluster cl(TopKRmv{1}, 3, 1);
  cl.exec(1, TopKRmv::AddOp{b, 110});
  cl.settle();
  const auto cId = cl.exec(2, TopKRmv::AddOp{c, 105});
  cl.settle();
  // Peer of r2 is r0: it keeps the copy without applying it.
  EXPECT_TRUE(cl[0].held().contains(cId));
  EXPECT_TRUE(cl[0].holds(cId));
  EXPECT_FALSE(cl[0].seen().contains(cId));
  EXPECT_FALSE(broadcastCarries(cl.broadcasts(), cId));
  EXPECT_EQ(cl[0].query(), (std::vector<ScoredEntry>{{b, 110}}));
}

TEST(Engine, HeldCopyIsDroppedWhenItsBroadcastArrives) {
  TopCluster cl(TopKRmv{1}, 3, 1);
  const auto id = cl.exec(0, TopKRmv::AddOp{a, 1});
  cl.deliverAll();
  EXPECT_TRUE(cl[1].held().contains(id));
  cl.settle();
  EXPECT_FALSE(cl[1].held().contains(id));
  EXPECT_TRUE(cl[1].seen().contains(id));
}

TEST(Engine, HeldCopyMaskedForeverIsPruned) {
  TopCluster cl(TopKRmv{1}, 2, 1);
  const auto low = cl.exec(0, TopKRmv::AddOp{a, 1});
  cl.exec(0, TopKRmv::AddOp{a, 5});
  cl.deliverAll();
  EXPECT_EQ(cl[1].held().size(), 2u);
  cl.sync(1);
  EXPECT_FALSE(cl[1].held().contains(low));
  EXPECT_EQ(cl[1].held().size(), 1u);
}

TEST(Engine, CrashedSourceOpsSurviveThroughPeers) {
  TopCluster cl(TopKRmv{1}, 3, 1);
  cl.exec(1, TopKRmv::AddOp{b, 110});
  cl.settle();
  cl.exec(2, TopKRmv::AddOp{c, 105});
  cl.exec(2, TopKRmv::RmvOp{b});
  cl.deliverAll();
  cl.crash(2);
  cl.settle();
  for (const auto& q : cl.liveQueries()) EXPECT_EQ(q, (std::vector<ScoredEntry>{{c, 105}}));
}

TEST(Engine, CrashWithNothingPendingChangesNothing) {
  TopCluster cl(TopKRmv{2}, 3, 1);
  cl.exec(0, TopKRmv::AddOp{a, 3});
  cl.exec(1, TopKRmv::AddOp{b, 4});
  cl.settle();
  const auto before = cl[0].query();
  cl.crash(2);
  cl.settle();
  EXPECT_EQ(cl[0].query(), before);
  EXPECT_EQ(cl[1].query(), before);
}

TEST(Engine, CopyArrivingAfterTheFailureIsAdoptedDirectly) {
  Engine src(TopKRmv{1}, 0, 2, {1}), peer(TopKRmv{1}, 1, 2);
  const auto out = src.execOp(TopKRmv::AddOp{a, 9});
  peer.onReplicaFailed(0);
  peer.onReceive(out.sends.at(0));
  EXPECT_TRUE(peer.logLocal().contains(out.op.id));
  EXPECT_EQ(peer.query(), (std::vector<ScoredEntry>{{a, 9}}));
}

TEST(Quiescence, FreshSystem) {
  TopCluster cl(TopKRmv{1}, 3);
  EXPECT_TRUE(isQuiescent(cl.replicas(), 0));
}

TEST(Quiescence, UnpropagatedCoreOp) {
  TopCluster cl(TopKRmv{1}, 3);
  cl.exec(1, TopKRmv::AddOp{a, 1});
  EXPECT_FALSE(isQuiescent(cl.replicas(), 0));
  cl.settle();
  EXPECT_TRUE(isQuiescent(cl.replicas(), cl.inFlight()));
}

TEST(Quiescence, MessagesInFlight) {
  TopCluster cl(TopKRmv{1}, 2);
  EXPECT_FALSE(isQuiescent(cl.replicas(), 1));
}

TEST(Quiescence, LocalOnlyNonCoreOpIsFine) {
  TopCluster cl(TopKRmv{1}, 3);
  cl.exec(0, TopKRmv::AddOp{a, 100});
  cl.settle();
  cl.exec(1, TopKRmv::AddOp{b, 110});
  cl.settle();
  cl.exec(2, TopKRmv::AddOp{c, 105});
  cl.settle();
  EXPECT_TRUE(isQuiescent(cl.replicas(), cl.inFlight()));
  EXPECT_FALSE(cl[2].logLocal().empty());
  for (const auto& q : cl.liveQueries()) EXPECT_EQ(q, (std::vector<ScoredEntry>{{b, 110}}));
}

TEST(SizeModel, HistogramMergeOfOneBin) {
  const Histogram type;
  const MessageOf<Histogram> msg{0, {Envelope<Histogram::Payload>::single({0, 1}, {{{1, 1}}})}, NoMetadata{}, true,
                                 0};
  EXPECT_EQ(meteredSize(type, msg), 45u);
}

TEST(SizeModel, MessagesAreAdditiveOverEnvelopes) {
  const TopSum type(1);
  const auto e1 = Envelope<TopSum::Payload>::single({0, 1}, {1, 1});
  const auto e2 = Envelope<TopSum::Payload>::single({0, 2}, {2, 1});
  const MessageOf<TopSum> one{0, {e1}, NoMetadata{}, true, 0};
  const MessageOf<TopSum> two{0, {e1, e2}, NoMetadata{}, true, 0};
  EXPECT_EQ(meteredSize(type, two) - meteredSize(type, one), envelopeBytes(type, e2));
}

TEST(SizeModel, CompactedEnvelopesPayPerConstituent) {
  const TopSum type(1);
  const std::vector<OpId> ids{{0, 1}, {0, 2}, {0, 3}};
  const Envelope<TopSum::Payload> env{compactedId(0, ids), ids, {1, 6}, false};
  EXPECT_EQ(envelopeBytes(type, env), 1u + 3 * 12u + 16u);
}

TEST(SizeModel, ReplicaSizeCountsStateAndLogs) {
  ReplicaEngine<TopSum> e(TopSum{1}, 0, 1);
  EXPECT_EQ(e.sizeBytes(), 0u);
  e.execOp(TopSum::AddOp{a, 1});
  EXPECT_EQ(e.sizeBytes(), 16u + (1u + 12u + 16u));
}

TEST(CompactedId, DistinctFromPlainIdsAndStable) {
  const std::vector<OpId> ids{{0, 1}, {0, 2}};
  const auto id = compactedId(0, ids);
  EXPECT_NE(id.seq & kCompactedBit, 0u);
  EXPECT_EQ(id, compactedId(0, ids));
  const std::vector<OpId> single{{0, 7}};
  EXPECT_EQ(compactedId(0, single), (OpId{0, 7}));
}

}  // namespace
}  // namespace nuec
