#pragma once

// The four batch commands behind the command-line tool. Each takes a
// RunConfig, writes its artifacts into output_dir and returns the JSON it
// wrote to run.json (or summary.json for sweeps).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "holoscope/detector.hpp"
#include "holoscope/synth.hpp"

namespace holoscope {

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 42;
  std::string scale = "1:5:1";

  // detection
  double base = 32.0;
  std::size_t num_seeds = 10;
  std::vector<std::string> signals;  // empty: every signal the data supports
  Timestamp time_bin = 86400;
  std::vector<double> neutral;  // rating values; empty: scale midpoint
  double cap_exponent = 1.0 / 1.6;
  std::string seed_matrix = "auto";
  std::string kappa_scaling = "evolving";

  // injection and sweep
  InjectionConfig injection;
  std::vector<double> densities;
  bool with_baseline = false;

  // bench
  std::vector<std::size_t> sizes;
  double bench_exponent = 0.5;
};

nlohmann::json to_json(const RunConfig& config);
/// Throws ConfigError for unknown keys or mistyped values.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Detection settings derived from a RunConfig for graph g.
DetectConfig detect_config(const RunConfig& config, const BipartiteGraph& g);

nlohmann::json cmd_detect(const RunConfig& config);
nlohmann::json cmd_inject(const RunConfig& config);
nlohmann::json cmd_sweep(const RunConfig& config);
nlohmann::json cmd_bench(const RunConfig& config);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace holoscope
