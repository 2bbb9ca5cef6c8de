#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace nuec::verify {

// A failing case: the generated operations and the steps that led to it.
struct Counterexample {
  std::string detail;
  std::vector<std::string> ops;
  std::vector<std::string> trace;
};

struct CheckResult {
  std::string name;
  std::size_t cases{0};
  std::vector<Counterexample> failures;

  bool ok() const { return failures.empty(); }
};

inline void print(std::ostream& os, const Counterexample& cx) {
  os << "  counterexample: " << cx.detail << '\n';
  os << "    ops:";
  for (const auto& op : cx.ops) os << ' ' << op;
  os << "\n    steps:\n";
  for (const auto& step : cx.trace) os << "      " << step << '\n';
}

inline void print(std::ostream& os, const CheckResult& r) {
  os << (r.ok() ? "ok   " : "FAIL ") << r.name << " (" << r.cases << " cases";
  if (!r.ok()) os << ", " << r.failures.size() << " failures";
  os << ")\n";
  if (!r.ok()) print(os, r.failures.front());
}

}  // namespace nuec::verify
