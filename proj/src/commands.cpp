#include "holoscope/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

#include "holoscope/error.hpp"
#include "holoscope/evalkit.hpp"
#include "holoscope/io.hpp"

namespace holoscope {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

json injection_json(const InjectionConfig& c) {
  return {{"n_objects", c.n_objects},
          {"ratings_per_object", c.ratings_per_object},
          {"n_fraudsters", c.n_fraudsters},
          {"max_target_indegree", c.max_target_indegree},
          {"camouflage_ratio", c.camouflage_ratio},
          {"rating_values", c.rating_values},
          {"surge_compression", c.surge_compression},
          {"seed", c.seed}};
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

BipartiteGraph load_graph(const RunConfig& config) {
  if (config.input.empty()) throw ConfigError("--input is required");
  const auto records = io::read_edges(config.input);
  return BipartiteGraph::ingest(records, RatingScale::parse(config.scale));
}

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json signals_json(const SignalConfig& s) {
  json out = json::array();
  if (s.use_alpha) out.push_back("alpha");
  if (s.use_phi) out.push_back("phi");
  if (s.use_kappa) out.push_back("kappa");
  return out;
}

json optional_density(const std::optional<double>& d) { return d ? json(*d) : json("—"); }

}  // namespace

json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"input", c.input.string()},
          {"output_dir", c.output_dir.string()},
          {"seed", c.seed},
          {"scale", c.scale},
          {"base", c.base},
          {"num_seeds", c.num_seeds},
          {"signals", c.signals},
          {"time_bin", c.time_bin},
          {"neutral", c.neutral},
          {"cap_exponent", c.cap_exponent},
          {"seed_matrix", c.seed_matrix},
          {"kappa_scaling", c.kappa_scaling},
          {"injection", injection_json(c.injection)},
          {"densities", c.densities},
          {"with_baseline", c.with_baseline},
          {"sizes", c.sizes},
          {"bench_exponent", c.bench_exponent}};
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j,
             {"command", "input", "output_dir", "seed", "scale", "base", "num_seeds", "signals", "time_bin", "neutral",
              "cap_exponent", "seed_matrix", "kappa_scaling", "injection", "densities", "with_baseline", "sizes",
              "bench_exponent"},
             "config");
  RunConfig c;
  std::string input = c.input.string(), output = c.output_dir.string();
  read_key(j, "command", c.command);
  read_key(j, "input", input);
  read_key(j, "output_dir", output);
  c.input = input;
  c.output_dir = output;
  read_key(j, "seed", c.seed);
  read_key(j, "scale", c.scale);
  read_key(j, "base", c.base);
  read_key(j, "num_seeds", c.num_seeds);
  read_key(j, "signals", c.signals);
  read_key(j, "time_bin", c.time_bin);
  read_key(j, "neutral", c.neutral);
  read_key(j, "cap_exponent", c.cap_exponent);
  read_key(j, "seed_matrix", c.seed_matrix);
  read_key(j, "kappa_scaling", c.kappa_scaling);
  read_key(j, "densities", c.densities);
  read_key(j, "with_baseline", c.with_baseline);
  read_key(j, "sizes", c.sizes);
  read_key(j, "bench_exponent", c.bench_exponent);
  if (j.contains("injection")) {
    const json& i = j.at("injection");
    check_keys(i,
               {"n_objects", "ratings_per_object", "n_fraudsters", "max_target_indegree", "camouflage_ratio",
                "rating_values", "surge_compression", "seed"},
               "injection");
    read_key(i, "n_objects", c.injection.n_objects);
    read_key(i, "ratings_per_object", c.injection.ratings_per_object);
    read_key(i, "n_fraudsters", c.injection.n_fraudsters);
    read_key(i, "max_target_indegree", c.injection.max_target_indegree);
    read_key(i, "camouflage_ratio", c.injection.camouflage_ratio);
    read_key(i, "rating_values", c.injection.rating_values);
    read_key(i, "surge_compression", c.injection.surge_compression);
    read_key(i, "seed", c.injection.seed);
  }
  return c;
}

DetectConfig detect_config(const RunConfig& c, const BipartiteGraph& g) {
  DetectConfig d;
  if (!(c.base > 1.0)) throw ConfigError("--base must be > 1");
  if (c.num_seeds == 0) throw ConfigError("--num-seeds must be at least 1");
  if (!(c.cap_exponent > 0.0)) throw ConfigError("--cap-exponent must be positive");
  d.signals.base = c.base;
  if (c.signals.empty()) {
    d.signals = SignalTables::available_signals(g, d.signals);
  } else {
    d.signals.use_alpha = d.signals.use_phi = d.signals.use_kappa = false;
    for (const auto& s : c.signals) {
      if (s == "alpha") d.signals.use_alpha = true;
      else if (s == "phi") d.signals.use_phi = true;
      else if (s == "kappa") d.signals.use_kappa = true;
      else throw ConfigError("unknown signal '" + s + "' (expected alpha, phi or kappa)");
    }
  }
  if (!c.neutral.empty()) {
    std::vector<RatingCategory> neutral;
    for (double v : c.neutral) {
      const auto cat = g.scale().category(v);
      if (!cat) throw ConfigError("neutral rating " + std::to_string(v) + " is not on the scale");
      neutral.push_back(*cat);
    }
    d.signals.neutral = neutral;
  }
  if (c.kappa_scaling == "evolving") d.signals.kappa_scaling = KappaScaling::evolving;
  else if (c.kappa_scaling == "initial") d.signals.kappa_scaling = KappaScaling::initial;
  else throw ConfigError("unknown kappa scaling '" + c.kappa_scaling + "'");
  if (c.seed_matrix == "auto") d.seed_matrix = SeedMatrix::automatic;
  else if (c.seed_matrix == "adjacency") d.seed_matrix = SeedMatrix::adjacency;
  else if (c.seed_matrix == "matricized") d.seed_matrix = SeedMatrix::matricized;
  else throw ConfigError("unknown seed matrix '" + c.seed_matrix + "'");
  if (c.time_bin <= 0) throw ConfigError("--time-bin must be positive");
  d.num_seeds = c.num_seeds;
  d.cap_exponent = c.cap_exponent;
  d.time_bin = c.time_bin;
  d.svd.seed = c.seed;
  return d;
}

json cmd_detect(const RunConfig& config) {
  const auto t0 = Clock::now();
  const BipartiteGraph g = load_graph(config);
  const double ingest_s = seconds_since(t0);
  const DetectConfig dc = detect_config(config, g);
  const auto t1 = Clock::now();
  const FastGreedyResult r = fast_greedy(g, dc);
  const double detect_s = seconds_since(t1);

  prepare_output(config.output_dir);
  {
    std::ofstream out(config.output_dir / "users.csv");
    if (!out) throw DataError("cannot write users.csv");
    out << "user\n";
    for (UserId u : r.best.users) out << g.user_name(u) << '\n';
  }
  {
    std::vector<ObjectId> order(g.num_objects());
    for (ObjectId v = 0; v < order.size(); ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](ObjectId a, ObjectId b) { return r.best.sink_scores[a] > r.best.sink_scores[b]; });
    std::ofstream out(config.output_dir / "objects.csv");
    if (!out) throw DataError("cannot write objects.csv");
    out << "object,score,rank\n" << std::setprecision(12);
    for (std::size_t i = 0; i < order.size(); ++i)
      out << g.object_name(order[i]) << ',' << r.best.sink_scores[order[i]] << ',' << i + 1 << '\n';
  }
  RunConfig echo = config;
  echo.command = "detect";
  json run = {{"command", "detect"},
              {"seed", config.seed},
              {"config", to_json(echo)},
              {"hs_star", r.best.hs},
              {"num_users", r.best.users.size()},
              {"signals_used", signals_json(dc.signals)},
              {"seed_sizes", r.seed_sizes},
              {"seed_hs", r.seed_hs},
              {"best_seed", r.best.seed_index},
              {"warnings", r.warnings},
              {"graph", {{"users", g.num_users()}, {"objects", g.num_objects()}, {"events", g.num_events()}}},
              {"timings", {{"ingest_seconds", ingest_s}, {"detect_seconds", detect_s}}}};
  write_json(config.output_dir / "run.json", run);
  return run;
}

json cmd_inject(const RunConfig& config) {
  const BipartiteGraph g = load_graph(config);
  InjectionConfig ic = config.injection;
  ic.seed = derive_seed(config.seed, 1, 0);
  const Injection inj = inject(g, ic);
  prepare_output(config.output_dir);
  io::write_edges(config.output_dir / "edges.csv", inj.graph.to_records());
  io::write_labels(config.output_dir / "labels.csv", {inj.truth.fraud_users, inj.truth.fraud_objects});
  RunConfig echo = config;
  echo.command = "inject";
  json run = {{"command", "inject"},
              {"seed", config.seed},
              {"config", to_json(echo)},
              {"base_events", g.num_events()},
              {"events", inj.graph.num_events()},
              {"fraud_events", inj.fraud_events},
              {"camouflage_events", inj.camouflage_events},
              {"fraud_users", inj.truth.fraud_users.size()},
              {"fraud_objects", inj.truth.fraud_objects.size()},
              {"density", static_cast<double>(ic.ratings_per_object) / static_cast<double>(ic.n_fraudsters)}};
  write_json(config.output_dir / "run.json", run);
  return run;
}

json cmd_sweep(const RunConfig& config) {
  if (config.densities.empty()) throw ConfigError("empty density grid");
  const BipartiteGraph g = load_graph(config);
  SweepConfig sc;
  sc.densities = config.densities;
  sc.injection = config.injection;
  sc.seed = config.seed;
  const DetectConfig dc = detect_config(config, g);
  const SweepResult hs = density_sweep(g, sc, holoscope_detector(dc));
  std::optional<SweepResult> baseline;
  if (config.with_baseline) baseline = density_sweep(g, sc, baseline_detector());

  prepare_output(config.output_dir);
  {
    std::ofstream out(config.output_dir / "curves.csv");
    if (!out) throw DataError("cannot write curves.csv");
    out << "method,density,n_fraudsters,user_f1,sink_auc,seconds,error\n" << std::setprecision(10);
    auto emit = [&](const std::string& method, const SweepResult& r) {
      for (const auto& p : r.points) {
        out << method << ',' << p.density << ',' << p.n_fraudsters << ',';
        if (p.user_f1) out << *p.user_f1;
        out << ',';
        if (p.sink_auc) out << *p.sink_auc;
        out << ',' << p.seconds << ",\"" << p.error << "\"\n";
      }
    };
    emit("holoscope", hs);
    if (baseline) emit("avg_degree", *baseline);
  }
  auto summarize = [](const SweepResult& r) {
    return json{{"auc_users", r.users.area},
                {"auc_sinks", r.sinks.area},
                {"lowest_detection_density_users", optional_density(r.users_lowest)},
                {"lowest_detection_density_sinks", optional_density(r.sinks_lowest)}};
  };
  RunConfig echo = config;
  echo.command = "sweep";
  json summary = summarize(hs);
  summary["command"] = "sweep";
  summary["seed"] = config.seed;
  summary["config"] = to_json(echo);
  if (baseline) summary["baseline"] = summarize(*baseline);
  write_json(config.output_dir / "summary.json", summary);
  return summary;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("slope needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DataError("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DataError("slope needs distinct sizes");
  return sxy / sxx;
}

json cmd_bench(const RunConfig& config) {
  if (config.sizes.empty()) throw ConfigError("empty size list");
  for (std::size_t i = 1; i < config.sizes.size(); ++i)
    if (config.sizes[i] <= config.sizes[i - 1]) throw ConfigError("sizes must be increasing");
  prepare_output(config.output_dir);
  std::vector<double> edges, seconds;
  json rows = json::array();
  bool cap_ok = true;
  std::ofstream csv(config.output_dir / "bench.csv");
  if (!csv) throw DataError("cannot write bench.csv");
  csv << "edges,users,objects,seconds,max_seed_size,seed_cap\n" << std::setprecision(8);
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    const std::size_t e = config.sizes[i];
    BackgroundConfig bc;
    bc.n_users = std::max<std::size_t>(100, e / 10);
    bc.n_objects = std::max<std::size_t>(50, e / 20);
    bc.exponent = config.bench_exponent;
    bc.density = static_cast<double>(e) / (static_cast<double>(bc.n_users) * static_cast<double>(bc.n_objects));
    bc.seed = derive_seed(config.seed, 3, i);
    const BipartiteGraph g = gen_background(bc);
    const DetectConfig dc = detect_config(config, g);
    const auto t = Clock::now();
    const FastGreedyResult r = fast_greedy(g, dc);
    const double s = seconds_since(t);
    std::size_t max_seed = 0;
    for (std::size_t sz : r.seed_sizes) max_seed = std::max(max_seed, sz);
    const std::size_t cap = seed_cap(g.num_users(), dc.cap_exponent);
    cap_ok = cap_ok && max_seed <= cap;
    edges.push_back(static_cast<double>(g.num_events()));
    seconds.push_back(s);
    csv << g.num_events() << ',' << g.num_users() << ',' << g.num_objects() << ',' << s << ',' << max_seed << ','
        << cap << '\n';
    csv.flush();
    rows.push_back({{"edges", g.num_events()},
                    {"users", g.num_users()},
                    {"objects", g.num_objects()},
                    {"seconds", s},
                    {"max_seed_size", max_seed},
                    {"seed_cap", cap}});
  }
  RunConfig echo = config;
  echo.command = "bench";
  json run = {{"command", "bench"},
              {"seed", config.seed},
              {"config", to_json(echo)},
              {"rows", rows},
              {"seed_cap_respected", cap_ok}};
  if (edges.size() >= 2) run["loglog_slope"] = loglog_slope(edges, seconds);
  write_json(config.output_dir / "run.json", run);
  return run;
}

}  // namespace holoscope
