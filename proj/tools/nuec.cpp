#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "nuec/cli/experiment.hpp"
#include "nuec/cli/output.hpp"
#include "nuec/cli/plotdata.hpp"
#include "nuec/cli/runner.hpp"
#include "nuec/verify/suite.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::string out;
  std::string format{"csv"};
  std::size_t sampleEvery{0};
  std::size_t jobs{std::max(1u, std::thread::hardware_concurrency())};
};

int runCommand(const RunArgs& args) {
  std::ifstream in(args.config);
  if (!in) {
    std::cerr << "nuec: cannot read " << args.config << '\n';
    return 2;
  }
  std::vector<nuec::sim::SimConfig> configs;
  try {
    auto exp = nuec::cli::parseExperiment(in);
    nuec::cli::applySeedOverride(exp, std::getenv("NUEC_SEED"));
    configs = nuec::cli::expand(exp);
  } catch (const nuec::sim::ConfigError& e) {
    std::cerr << args.config << ": " << e.what() << '\n';
    return 2;
  }

  std::ofstream out(args.out);
  if (!out) {
    std::cerr << "nuec: cannot write " << args.out << '\n';
    return 2;
  }
  std::ofstream samples;
  if (args.sampleEvery > 0) {
    const auto path = args.out + ".samples.csv";
    samples.open(path);
    if (!samples) {
      std::cerr << "nuec: cannot write " << path << '\n';
      return 2;
    }
    samples << nuec::cli::kSamplesHeader << '\n';
  }

  const auto reports = nuec::cli::runAll(configs, args.jobs);
  if (args.format == "csv") out << nuec::cli::kCsvHeader << '\n';
  int status = 0;
  for (const auto& r : reports) {
    if (args.format == "csv") {
      nuec::cli::writeCsvRow(out, r);
    } else {
      nuec::cli::writeJsonLine(out, r);
    }
    if (args.sampleEvery > 0) nuec::cli::writeSamples(samples, r, args.sampleEvery);
    if (!r.quiescent || !r.oracleMatch) {
      std::cerr << "nuec: " << nuec::sim::name(r.engine) << '/' << nuec::sim::name(r.dataType) << " seed " << r.seed
                << (r.quiescent ? "" : " not quiescent") << (r.oracleMatch ? "" : " differs from the oracle") << '\n';
      status = 1;
    }
  }
  return status;
}

int verifyCommand(const std::string& type, const nuec::verify::SuiteOptions& opt) {
  const auto kind = nuec::sim::parseDataType(type);
  const auto failures = nuec::verify::runSuite(kind, opt, std::cout);
  std::cout << type << ": " << (failures == 0 ? "all checks passed" : std::to_string(failures) + " failures") << '\n';
  return failures == 0 ? 0 : 1;
}

int plotdataCommand(const std::string& input, const std::string& dir) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "nuec: cannot read " << input << '\n';
    return 2;
  }
  try {
    const auto series = nuec::cli::readSeries(in);
    if (series.empty()) {
      std::cerr << "nuec: warning: " << input << " has no samples, nothing written\n";
      return 0;
    }
    for (const auto& path : nuec::cli::writeSeries(series, dir)) std::cout << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << input << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and check non-uniformly replicated data types"};
  app.require_subcommand(1);

  RunArgs run;
  auto* runCmd = app.add_subcommand("run", "Run the experiments described by a config file");
  runCmd->add_option("-c,--config", run.config, "Experiment file")->required();
  runCmd->add_option("-o,--out", run.out, "Result file")->required();
  runCmd->add_option("--format", run.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  runCmd->add_option("--sample-every", run.sampleEvery, "Also write <out>.samples.csv every N sync rounds");
  runCmd->add_option("-j,--jobs", run.jobs, "Parallel runs");

  std::string type;
  nuec::verify::SuiteOptions opt;
  auto* verifyCmd = app.add_subcommand("verify", "Run the property checks for one data type");
  verifyCmd->add_option("-t,--type", type, "topk-rmv, top-sum, topk or histogram")
      ->required()
      ->check(CLI::IsMember({"topk-rmv", "top-sum", "topk", "histogram"}));
  verifyCmd->add_option("--budget", opt.budget, "Most operations per enumerated history");
  verifyCmd->add_option("--seed", opt.seed, "Seed for the randomized checks");

  std::string input;
  std::string outDir;
  auto* plotCmd = app.add_subcommand("plotdata", "Split a samples CSV into per-engine series");
  plotCmd->add_option("-i,--input", input, "Samples CSV written by run --sample-every")->required();
  plotCmd->add_option("-o,--out", outDir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (*runCmd) return runCommand(run);
  if (*verifyCmd) return verifyCommand(type, opt);
  return plotdataCommand(input, outDir);
}
