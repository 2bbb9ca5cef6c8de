#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>

#include "nuec/core/types.hpp"
#include "nuec/size_model.hpp"

namespace nuec {

struct Timestamp {
  ReplicaId siteId{0};
  std::uint64_t val{1};

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// Sparse vector clock; absent entries read as zero and zero entries are never stored.
class VectorClock {
 public:
  VectorClock() = default;
  VectorClock(std::initializer_list<std::pair<const ReplicaId, std::uint64_t>> init) {
    for (const auto& [r, v] : init) set(r, v);
  }

  std::uint64_t operator[](ReplicaId r) const {
    auto it = entries_.find(r);
    return it == entries_.end() ? 0 : it->second;
  }

  void set(ReplicaId r, std::uint64_t v) {
    if (v == 0) {
      entries_.erase(r);
    } else {
      entries_[r] = v;
    }
  }

  void raise(ReplicaId r, std::uint64_t v) {
    if (v > (*this)[r]) set(r, v);
  }

  void mergeFrom(const VectorClock& other) {
    for (const auto& [r, v] : other.entries_) raise(r, v);
  }

  bool covers(const Timestamp& ts) const { return ts.val <= (*this)[ts.siteId]; }

  // a <= b componentwise.
  bool dominatedBy(const VectorClock& other) const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const auto& e) { return e.second <= other[e.first]; });
  }

  const std::map<ReplicaId, std::uint64_t>& entries() const { return entries_; }
  std::size_t bytes() const { return size::vectorClock(entries_.size()); }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (const auto& [r, v] : entries_) {
      os << (first ? "" : ",") << 'r' << r << "->" << v;
      first = false;
    }
    os << ']';
    return os.str();
  }

  friend bool operator==(const VectorClock&, const VectorClock&) = default;

 private:
  std::map<ReplicaId, std::uint64_t> entries_;
};

inline VectorClock pointwiseMax(VectorClock a, const VectorClock& b) {
  a.mergeFrom(b);
  return a;
}

// Strict partial order: a < b iff a <= b componentwise and a != b.
inline bool happenedBefore(const VectorClock& a, const VectorClock& b) {
  return a.dominatedBy(b) && a != b;
}

}  // namespace nuec
