#pragma once

#include <vector>

#include "nuec/types/histogram.hpp"
#include "nuec/types/top_sum.hpp"
#include "nuec/types/topk.hpp"
#include "nuec/types/topk_rmv.hpp"

// Small operation alphabets over two ids, used by the enumerating checks.
namespace nuec::verify {

inline std::vector<TopKRmv::PrepareOp> alphabet(const TopKRmv&) {
  return {TopKRmv::AddOp{1, 1}, TopKRmv::AddOp{1, 2}, TopKRmv::AddOp{2, 1}, TopKRmv::AddOp{2, 2},
          TopKRmv::RmvOp{1},    TopKRmv::RmvOp{2}};
}

inline std::vector<TopSum::PrepareOp> alphabet(const TopSum&) {
  return {TopSum::AddOp{1, 1}, TopSum::AddOp{1, 2}, TopSum::AddOp{2, 1}, TopSum::AddOp{2, 2}};
}

inline std::vector<TopK::PrepareOp> alphabet(const TopK&) {
  return {ScoredEntry{1, 1}, ScoredEntry{1, 2}, ScoredEntry{2, 1}, ScoredEntry{2, 2}};
}

inline std::vector<Histogram::PrepareOp> alphabet(const Histogram&) {
  return {Histogram::AddOp{1}, Histogram::AddOp{2}, Histogram::MergeOp{{{1, 1}, {2, 2}}}};
}

}  // namespace nuec::verify
