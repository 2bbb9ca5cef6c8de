#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include <json.hpp>

#include "nuec/sim/metrics.hpp"

namespace nuec::cli {

inline constexpr const char* kCsvHeader =
    "engine,dataType,seed,nOps,removeRatio,totalPayloadBytes,messageCount,avgReplicaBytes,quiescent,oracleMatch";

inline constexpr const char* kSamplesHeader =
    "engine,dataType,seed,removeRatio,round,opsExecuted,cumulativePayloadBytes,avgReplicaBytes";

// Shortest text that reads back as the same double.
inline std::string formatNumber(double v) {
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void writeCsvRow(std::ostream& os, const sim::MetricsReport& r) {
  os << sim::name(r.engine) << ',' << sim::name(r.dataType) << ',' << r.seed << ',' << r.nOps << ','
     << formatNumber(r.removeRatio) << ',' << r.totalPayloadBytes << ',' << r.messageCount << ','
     << formatNumber(r.avgReplicaBytes) << ',' << (r.quiescent ? "true" : "false") << ','
     << (r.oracleMatch ? "true" : "false") << '\n';
}

inline nlohmann::ordered_json toJson(const sim::MetricsReport& r) {
  nlohmann::ordered_json j;
  j["engine"] = sim::name(r.engine);
  j["dataType"] = sim::name(r.dataType);
  j["seed"] = r.seed;
  j["nOps"] = r.nOps;
  j["removeRatio"] = r.removeRatio;
  j["totalPayloadBytes"] = r.totalPayloadBytes;
  j["durabilityPayloadBytes"] = r.durabilityPayloadBytes;
  j["messageCount"] = r.messageCount;
  j["avgReplicaBytes"] = r.avgReplicaBytes;
  j["finalReplicaBytes"] = r.finalReplicaBytes;
  j["quiescent"] = r.quiescent;
  j["observablyEquivalent"] = r.observablyEquivalent;
  j["oracleMatch"] = r.oracleMatch;
  j["opsGenerated"] = r.opsGenerated;
  j["opsInOracle"] = r.opsInOracle;
  return j;
}

inline void writeJsonLine(std::ostream& os, const sim::MetricsReport& r) { os << toJson(r).dump() << '\n'; }

// Every `every`-th sample of the run, plus the final one.
inline void writeSamples(std::ostream& os, const sim::MetricsReport& r, std::size_t every) {
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    if (s.round % every != 0 && i + 1 != r.samples.size()) continue;
    os << sim::name(r.engine) << ',' << sim::name(r.dataType) << ',' << r.seed << ',' << formatNumber(r.removeRatio)
       << ',' << s.round << ',' << s.opsExecuted << ',' << s.cumulativePayloadBytes << ','
       << formatNumber(s.avgReplicaBytes) << '\n';
  }
}

}  // namespace nuec::cli
