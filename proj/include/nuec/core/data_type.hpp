#pragma once

#include <concepts>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nuec/core/types.hpp"

namespace nuec {

template <class Payload>
using OpLog = std::map<OpId, Envelope<Payload>>;

// A non-uniform replicated data type pluggable into ReplicaEngine.
//
// The three relevance hooks receive (logLocal, S, logRecv) and return opIds
// drawn from logLocal. `compact` must only merge envelopes sharing a source
// replica, and `residual` must undo the contribution of already-applied
// constituents from a compacted payload.
template <class T>
concept NuDataType = requires(const T& type, typename T::State& state, const typename T::State& cstate,
                              const typename T::Payload& payload, const typename T::PrepareOp& prep,
                              const typename T::Metadata& meta, const OpLog<typename T::Payload>& log,
                              const HookContext& ctx,
                              const std::vector<Envelope<typename T::Payload>>& envelopes,
                              const std::vector<typename T::Payload>& applied) {
  typename T::State;
  typename T::Payload;
  typename T::PrepareOp;
  typename T::Metadata;
  typename T::Query;
  { type.initial() } -> std::same_as<typename T::State>;
  { type.query(cstate) } -> std::same_as<typename T::Query>;
  { type.prepare(cstate, ReplicaId{}, prep) } -> std::same_as<typename T::Payload>;
  { type.apply(state, payload) };
  { type.maskedForever(log, cstate, log, ctx) } -> std::same_as<std::set<OpId>>;
  { type.hasObservableImpact(log, cstate, log, ctx) } -> std::same_as<std::set<OpId>>;
  { type.mayHaveObservableImpact(log, cstate, log, ctx) } -> std::same_as<std::set<OpId>>;
  { type.compact(ReplicaId{}, envelopes) } -> std::same_as<std::vector<Envelope<typename T::Payload>>>;
  { type.residual(payload, applied) } -> std::same_as<typename T::Payload>;
  { type.sendMetadata(cstate) } -> std::same_as<typename T::Metadata>;
  { type.receiveMetadata(state, meta) };
  { type.payloadBytes(payload) } -> std::convertible_to<std::size_t>;
  { type.metadataBytes(meta) } -> std::convertible_to<std::size_t>;
  { type.stateBytes(cstate) } -> std::convertible_to<std::size_t>;
  { type.describe(cstate) } -> std::convertible_to<std::string>;
  { type.describe(payload) } -> std::convertible_to<std::string>;
  { type.describe(meta) } -> std::convertible_to<std::string>;
};

// Metadata type for data types that piggyback nothing.
struct NoMetadata {
  friend bool operator==(const NoMetadata&, const NoMetadata&) = default;
};

}  // namespace nuec
