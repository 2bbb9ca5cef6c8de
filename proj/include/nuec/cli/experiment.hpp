#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nuec/sim/config.hpp"

// Experiment files: `key = value` lines, `#` comments, and an optional
// `[sweep]` block whose keys take comma-separated lists. The sweep expands to
// the cross product of its lists, first key outermost.
//
//   dataType = topk-rmv
//   nOps = 50000
//   crashSchedule = 1@100 3@2000
//   [sweep]
//   engine = nuec, fullop, stateship
//   removeRatio = 0.05, 0.0005
namespace nuec::cli {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
  std::size_t line{0};
};

struct Experiment {
  sim::SimConfig base;
  std::vector<SweepAxis> sweep;
  // Line of each key set in the base section.
  std::map<std::string, std::size_t> baseLines;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class Int>
Int parseInt(const std::string& key, std::string_view text, std::size_t line) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw sim::ConfigError(key, "expected an integer, got '" + std::string(text) + "'", line);
  }
  return value;
}

inline double parseDouble(const std::string& key, std::string_view text, std::size_t line) {
  const std::string copy(text);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw sim::ConfigError(key, "expected a number, got '" + copy + "'", line);
  }
  return value;
}

// `replica@event`, whitespace separated.
inline std::vector<sim::CrashSpec> parseCrashes(std::string_view text, std::size_t line) {
  std::vector<sim::CrashSpec> out;
  std::istringstream in{std::string(text)};
  std::string item;
  while (in >> item) {
    const auto at = item.find('@');
    if (at == std::string::npos) throw sim::ConfigError("crashSchedule", "expected replica@event, got '" + item + "'", line);
    out.push_back({parseInt<ReplicaId>("crashSchedule", std::string_view(item).substr(0, at), line),
                   parseInt<std::uint64_t>("crashSchedule", std::string_view(item).substr(at + 1), line)});
  }
  return out;
}

using Setter = std::function<void(sim::SimConfig&, std::string_view, std::size_t)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"nReplicas", [](auto& c, auto v, auto l) { c.nReplicas = parseInt<std::size_t>("nReplicas", v, l); }},
      {"f", [](auto& c, auto v, auto l) { c.f = parseInt<std::size_t>("f", v, l); }},
      {"dataType",
       [](auto& c, auto v, auto l) {
         try {
           c.dataType = sim::parseDataType(v);
         } catch (const sim::ConfigError&) {
           throw sim::ConfigError("dataType", "unknown data type '" + std::string(v) + "'", l);
         }
       }},
      {"engine",
       [](auto& c, auto v, auto l) {
         try {
           c.engine = sim::parseEngine(v);
         } catch (const sim::ConfigError&) {
           throw sim::ConfigError("engine", "unknown engine '" + std::string(v) + "'", l);
         }
       }},
      {"K", [](auto& c, auto v, auto l) { c.k = parseInt<std::size_t>("K", v, l); }},
      {"nOps", [](auto& c, auto v, auto l) { c.nOps = parseInt<std::size_t>("nOps", v, l); }},
      {"nIds", [](auto& c, auto v, auto l) { c.nIds = parseInt<std::size_t>("nIds", v, l); }},
      {"maxScore", [](auto& c, auto v, auto l) { c.maxScore = parseInt<Score>("maxScore", v, l); }},
      {"removeRatio", [](auto& c, auto v, auto l) { c.removeRatio = parseDouble("removeRatio", v, l); }},
      {"syncEveryEvents",
       [](auto& c, auto v, auto l) { c.syncEveryEvents = parseInt<std::size_t>("syncEveryEvents", v, l); }},
      {"seed", [](auto& c, auto v, auto l) { c.seed = parseInt<std::uint64_t>("seed", v, l); }},
      {"maxDelay", [](auto& c, auto v, auto l) { c.maxDelay = parseInt<std::size_t>("maxDelay", v, l); }},
      {"crashSchedule", [](auto& c, auto v, auto l) { c.crashSchedule = parseCrashes(v, l); }},
  };
  return table;
}

inline const Setter& setterFor(const std::string& key, std::size_t line) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw sim::ConfigError(key, "unknown key", line);
  return it->second;
}

}  // namespace detail

// Parses an experiment file. Values are checked for syntax here and for
// consistency when the sweep is expanded.
inline Experiment parseExperiment(std::istream& in) {
  Experiment exp;
  bool inSweep = false;
  std::map<std::string, std::size_t> sweepLines;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    auto text = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text != "[sweep]") throw sim::ConfigError(std::string(text), "unknown section", line);
      if (inSweep) throw sim::ConfigError("[sweep]", "only one sweep block is allowed", line);
      inSweep = true;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw sim::ConfigError(std::string(text), "expected key = value", line);
    const std::string key(detail::trim(text.substr(0, eq)));
    const auto value = detail::trim(text.substr(eq + 1));
    const auto& set = detail::setterFor(key, line);
    if (value.empty()) throw sim::ConfigError(key, "missing value", line);

    auto& lines = inSweep ? sweepLines : exp.baseLines;
    if (!lines.emplace(key, line).second) throw sim::ConfigError(key, "set twice", line);
    if (!inSweep) {
      set(exp.base, value, line);
      continue;
    }
    SweepAxis axis{key, {}, line};
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const auto item = detail::trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
      if (item.empty()) throw sim::ConfigError(key, "empty sweep value", line);
      sim::SimConfig probe;
      set(probe, item, line);
      axis.values.emplace_back(item);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    exp.sweep.push_back(std::move(axis));
  }
  return exp;
}

// NUEC_SEED, when set, replaces the base seed.
inline void applySeedOverride(Experiment& exp, const char* envValue) {
  if (envValue == nullptr || *envValue == '\0') return;
  exp.base.seed = detail::parseInt<std::uint64_t>("NUEC_SEED", envValue, 0);
}

// Cross product of the sweep axes over the base config, in file order.
inline std::vector<sim::SimConfig> expand(const Experiment& exp) {
  std::vector<sim::SimConfig> out;
  std::vector<std::size_t> index(exp.sweep.size(), 0);
  while (true) {
    auto cfg = exp.base;
    std::size_t lastLine = 0;
    for (std::size_t a = 0; a < exp.sweep.size(); ++a) {
      const auto& axis = exp.sweep[a];
      detail::setterFor(axis.key, axis.line)(cfg, axis.values[index[a]], axis.line);
    }
    try {
      cfg.validate();
    } catch (const sim::ConfigError& e) {
      for (const auto& axis : exp.sweep) {
        if (axis.key == e.field()) lastLine = axis.line;
      }
      if (lastLine == 0) {
        const auto it = exp.baseLines.find(e.field());
        if (it != exp.baseLines.end()) lastLine = it->second;
      }
      throw sim::ConfigError(e.field(), std::string(e.what()).substr(e.field().size() + 2), lastLine);
    }
    out.push_back(std::move(cfg));

    std::size_t a = exp.sweep.size();
    while (a > 0) {
      --a;
      if (++index[a] < exp.sweep[a].values.size()) break;
      index[a] = 0;
      if (a == 0) return out;
    }
    if (exp.sweep.empty()) return out;
  }
}

}  // namespace nuec::cli
