#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nuec/cli/output.hpp"

// Turns a samples CSV into one x/y series per (engine, metric): operations
// executed against cumulative payload bytes and against average replica size.
// Runs of the same engine are averaged at each x.
namespace nuec::cli {

struct PlotSeries {
  std::string engine;
  std::string metric;
  std::map<std::size_t, double> points;
};

namespace detail {

inline std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline std::vector<PlotSeries> readSeries(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = detail::splitCsv(line);
  const auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("missing column '" + name + "'");
  };
  const auto engineCol = column("engine");
  const auto opsCol = column("opsExecuted");
  const auto payloadCol = column("cumulativePayloadBytes");
  const auto replicaCol = column("avgReplicaBytes");

  struct Acc {
    double sum{0};
    std::size_t n{0};
  };
  std::map<std::pair<std::string, std::string>, std::map<std::size_t, Acc>> acc;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty()) continue;
    const auto cells = detail::splitCsv(line);
    if (cells.size() != header.size()) throw std::runtime_error("row " + std::to_string(row) + " has wrong width");
    const auto x = static_cast<std::size_t>(std::stoull(cells[opsCol]));
    auto add = [&](const std::string& metric, const std::string& value) {
      auto& a = acc[{cells[engineCol], metric}][x];
      a.sum += std::stod(value);
      ++a.n;
    };
    add("payload", cells[payloadCol]);
    add("replica", cells[replicaCol]);
  }
  std::vector<PlotSeries> out;
  for (const auto& [key, points] : acc) {
    PlotSeries s{key.first, key.second, {}};
    for (const auto& [x, a] : points) s.points[x] = a.sum / static_cast<double>(a.n);
    out.push_back(std::move(s));
  }
  return out;
}

// Writes `<dir>/<engine>.<metric>.csv` for every series; returns the paths.
inline std::vector<std::filesystem::path> writeSeries(const std::vector<PlotSeries>& series,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& s : series) {
    auto path = dir / (s.engine + "." + s.metric + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "opsExecuted," << (s.metric == "payload" ? "cumulativePayloadBytes" : "avgReplicaBytes") << '\n';
    for (const auto& [x, y] : s.points) out << x << ',' << formatNumber(y) << '\n';
    paths.push_back(std::move(path));
  }
  return paths;
}

}  // namespace nuec::cli
