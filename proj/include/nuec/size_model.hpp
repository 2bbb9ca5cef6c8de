#pragma once

#include <cstddef>

// Canonical byte costs used for metering messages and replica state.
namespace nuec::size {

inline constexpr std::size_t kId = 8;
inline constexpr std::size_t kScalar = 8;     // score, amount, count
inline constexpr std::size_t kTimestamp = 12; // 4B siteId + 8B val
inline constexpr std::size_t kClockLength = 4;
inline constexpr std::size_t kClockEntry = 12;
inline constexpr std::size_t kOpTag = 1;
inline constexpr std::size_t kOpId = 12;
inline constexpr std::size_t kMessageHeader = 16;
inline constexpr std::size_t kListLength = 4;
inline constexpr std::size_t kReplicaRef = 4;

inline constexpr std::size_t vectorClock(std::size_t entries) {
  return kClockLength + kClockEntry * entries;
}

}  // namespace nuec::size
