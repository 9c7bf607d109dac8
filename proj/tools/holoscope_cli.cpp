// holoscope: detect, inject, sweep and bench from the command line.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "holoscope/commands.hpp"
#include "holoscope/error.hpp"

namespace {

using holoscope::RunConfig;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kConvergence = 4 };

holoscope::Timestamp parse_duration(const std::string& text) {
  if (text.empty()) throw holoscope::ConfigError("empty duration");
  std::int64_t unit = 1;
  std::string digits = text;
  switch (text.back()) {
    case 's': unit = 1; break;
    case 'm': unit = 60; break;
    case 'h': unit = 3600; break;
    case 'd': unit = 86400; break;
    case 'w': unit = 7 * 86400; break;
    default: digits.push_back('s');
  }
  digits.pop_back();
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(digits, &used);
  } catch (const std::exception&) {
    throw holoscope::ConfigError("invalid duration '" + text + "'");
  }
  if (used != digits.size() || n <= 0) throw holoscope::ConfigError("invalid duration '" + text + "'");
  return n * unit;
}

// Loads --config before option parsing so explicit flags override it.
void preload_config(int argc, char** argv, RunConfig& config) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i], path;
    if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
    else continue;
    std::ifstream in(path);
    if (!in) throw holoscope::ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw holoscope::ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    config = holoscope::run_config_from_json(j.contains("config") ? j.at("config") : j);
  }
}

void add_common(CLI::App* cmd, RunConfig& c, std::string& config_path) {
  cmd->add_option("--input", c.input, "Edge list (user,object[,timestamp[,rating[,prior]]])");
  cmd->add_option("--output-dir", c.output_dir, "Directory for outputs");
  cmd->add_option("--seed", c.seed, "Root random seed");
  cmd->add_option("--scale", c.scale, "Rating scale min:max:step");
  cmd->add_option("--config", config_path, "run.json or config JSON to start from");
}

void add_detection(CLI::App* cmd, RunConfig& c, std::string& time_bin) {
  cmd->add_option("--base", c.base, "Scaling base b");
  cmd->add_option("--num-seeds", c.num_seeds, "Singular vectors used for seeding");
  cmd->add_option("--signals", c.signals, "Subset of alpha,phi,kappa")->delimiter(',');
  cmd->add_option("--time-bin", time_bin, "Matricization time bin, e.g. 86400, 6h, 1d");
  cmd->add_option("--neutral", c.neutral, "Neutral rating values")->delimiter(',');
  cmd->add_option("--cap-exponent", c.cap_exponent, "Seed size cap exponent");
  cmd->add_option("--seed-matrix", c.seed_matrix, "auto, adjacency or matricized");
  cmd->add_option("--kappa-scaling", c.kappa_scaling, "evolving or initial");
}

void add_injection(CLI::App* cmd, RunConfig& c) {
  auto& i = c.injection;
  cmd->add_option("--n-objects", i.n_objects, "Target objects");
  cmd->add_option("--ratings-per-object", i.ratings_per_object, "Fraud ratings per target");
  cmd->add_option("--n-fraudsters", i.n_fraudsters, "Fraudulent accounts");
  cmd->add_option("--max-target-indegree", i.max_target_indegree, "Largest indegree of a target");
  cmd->add_option("--camouflage-ratio", i.camouflage_ratio, "Camouflage events per fraud event");
  cmd->add_option("--rating-values", i.rating_values, "Fraud rating values")->delimiter(',');
  cmd->add_option("--surge-compression", i.surge_compression, "Factor applied to sampled inter-arrival gaps");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    preload_config(argc, argv, config);
  } catch (const holoscope::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"holoscope: contrast-suspiciousness fraud detection on bipartite graphs"};
  app.require_subcommand(1);
  std::string config_path;
  std::string time_bin = std::to_string(config.time_bin);

  auto* detect = app.add_subcommand("detect", "Detect the most suspicious user block");
  add_common(detect, config, config_path);
  add_detection(detect, config, time_bin);

  auto* inject = app.add_subcommand("inject", "Inject a labelled fraud block into a graph");
  add_common(inject, config, config_path);
  add_injection(inject, config);

  auto* sweep = app.add_subcommand("sweep", "Accuracy versus injected fraud density");
  add_common(sweep, config, config_path);
  add_detection(sweep, config, time_bin);
  add_injection(sweep, config);
  sweep->add_option("--densities", config.densities, "Fraud densities in (0, 1]")->delimiter(',');
  sweep->add_flag("--baseline", config.with_baseline, "Also run the average-degree baseline");

  auto* bench = app.add_subcommand("bench", "Time detection on synthetic graphs of growing size");
  add_common(bench, config, config_path);
  add_detection(bench, config, time_bin);
  bench->add_option("--sizes", config.sizes, "Edge counts, increasing")->delimiter(',');
  bench->add_option("--exponent", config.bench_exponent, "Power-law exponent of the generated graphs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    config.time_bin = parse_duration(time_bin);
    nlohmann::json out;
    if (*detect) {
      config.command = "detect";
      out = holoscope::cmd_detect(config);
      std::cout << "hs=" << out["hs_star"] << " users=" << out["num_users"] << '\n';
    } else if (*inject) {
      config.command = "inject";
      out = holoscope::cmd_inject(config);
      std::cout << "events=" << out["events"] << " fraud=" << out["fraud_events"]
                << " camouflage=" << out["camouflage_events"] << '\n';
    } else if (*sweep) {
      config.command = "sweep";
      out = holoscope::cmd_sweep(config);
      std::cout << "auc_users=" << out["auc_users"] << " auc_sinks=" << out["auc_sinks"] << '\n';
    } else if (*bench) {
      config.command = "bench";
      out = holoscope::cmd_bench(config);
      if (out.contains("loglog_slope")) std::cout << "slope=" << out["loglog_slope"] << '\n';
    }
    if (out.contains("warnings"))
      for (const auto& w : out["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    return kOk;
  } catch (const holoscope::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const holoscope::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const holoscope::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
