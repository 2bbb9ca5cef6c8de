#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>

#include "nuec/sim/config.hpp"
#include "nuec/verify/alphabet.hpp"
#include "nuec/verify/checks.hpp"
#include "nuec/verify/commutativity.hpp"
#include "nuec/verify/soundness.hpp"

namespace nuec::verify {

struct SuiteOptions {
  // Most operations per enumerated history.
  std::size_t budget{4};
  std::uint64_t seed{1};
  // Enumeration on three replicas grows fast; it is capped at this many ops.
  std::size_t threeReplicaBudget{4};
};

template <NuDataType T>
std::size_t runSuite(const T& type, sim::DataTypeKind kind, const SuiteOptions& opt, std::ostream& os) {
  std::size_t failures = 0;
  const auto report = [&](const CheckResult& r) {
    print(os, r);
    os.flush();
    failures += r.failures.size();
  };
  const auto ops = alphabet(type);
  report(checkCommutativity(type, ops, opt.budget));
  report(checkHookSoundness(type, ops, opt.budget, 2));
  report(checkHookSoundness(type, ops, std::min(opt.budget, opt.threeReplicaBudget), 3));
  report(checkRedelivery(type, ops, opt.seed, 100, 10 * opt.budget));

  sim::SimConfig cfg;
  cfg.dataType = kind;
  cfg.nOps = 500;
  cfg.nIds = 20;
  cfg.k = 5;
  cfg.maxScore = 100;
  cfg.syncEveryEvents = 5;
  cfg.maxDelay = 4;
  cfg.seed = opt.seed;
  report(checkCrashes(cfg, 20, cfg.f));
  return failures;
}

// Runs every property check for one data type; returns the failure count.
inline std::size_t runSuite(sim::DataTypeKind kind, const SuiteOptions& opt, std::ostream& os) {
  switch (kind) {
    case sim::DataTypeKind::TopKRmv: return runSuite(TopKRmv{1}, kind, opt, os);
    case sim::DataTypeKind::TopSum: return runSuite(TopSum{1}, kind, opt, os);
    case sim::DataTypeKind::TopK: return runSuite(TopK{1}, kind, opt, os);
    case sim::DataTypeKind::Histogram: return runSuite(Histogram{}, kind, opt, os);
  }
  return 0;
}

}  // namespace nuec::verify
