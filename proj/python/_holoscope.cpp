// Python bindings: graph construction, detection, synthesis, metrics and the
// batch commands (configs and results cross the boundary as JSON text).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "holoscope/commands.hpp"
#include "holoscope/detector.hpp"
#include "holoscope/error.hpp"
#include "holoscope/evalkit.hpp"
#include "holoscope/io.hpp"
#include "holoscope/synth.hpp"
#include "holoscope/temporal.hpp"

namespace py = pybind11;
using namespace holoscope;

namespace {

using Row = std::tuple<std::string, std::string, std::optional<Timestamp>, std::optional<double>>;

BipartiteGraph from_rows(const std::vector<Row>& rows, const std::string& scale) {
  std::vector<EdgeRecord> records;
  records.reserve(rows.size());
  for (const auto& [u, v, t, r] : rows) records.push_back({u, v, t, r, {}});
  return BipartiteGraph::ingest(records, RatingScale::parse(scale));
}

std::vector<Row> to_rows(const BipartiteGraph& g) {
  std::vector<Row> out;
  for (const auto& r : g.to_records()) out.emplace_back(r.user, r.object, r.timestamp, r.rating);
  return out;
}

SeedMatrix parse_seed_matrix(const std::string& s) {
  if (s == "auto") return SeedMatrix::automatic;
  if (s == "adjacency") return SeedMatrix::adjacency;
  if (s == "matricized") return SeedMatrix::matricized;
  throw ConfigError("unknown seed matrix '" + s + "'");
}

py::dict detect(const BipartiteGraph& g, std::optional<std::vector<std::string>> signals, std::size_t num_seeds,
                double cap_exponent, double base, const std::string& seed_matrix, Timestamp time_bin) {
  DetectConfig dc;
  dc.signals.base = base;
  if (signals) {
    dc.signals.use_alpha = dc.signals.use_phi = dc.signals.use_kappa = false;
    for (const auto& s : *signals) {
      if (s == "alpha") dc.signals.use_alpha = true;
      else if (s == "phi") dc.signals.use_phi = true;
      else if (s == "kappa") dc.signals.use_kappa = true;
      else throw ConfigError("unknown signal '" + s + "'");
    }
  } else {
    dc.signals = SignalTables::available_signals(g, dc.signals);
  }
  dc.num_seeds = num_seeds;
  dc.cap_exponent = cap_exponent;
  dc.seed_matrix = parse_seed_matrix(seed_matrix);
  dc.time_bin = time_bin;
  FastGreedyResult r;
  {
    py::gil_scoped_release release;
    r = fast_greedy(g, dc);
  }
  std::vector<std::string> users;
  for (UserId u : r.best.users) users.push_back(g.user_name(u));
  py::dict scores;
  for (ObjectId v = 0; v < g.num_objects(); ++v) scores[py::str(g.object_name(v))] = r.best.sink_scores[v];
  std::vector<std::string> used;
  if (r.signals.use_alpha) used.push_back("alpha");
  if (r.signals.use_phi) used.push_back("phi");
  if (r.signals.use_kappa) used.push_back("kappa");
  py::dict out;
  out["users"] = users;
  out["hs"] = r.best.hs;
  out["sink_scores"] = scores;
  out["seed_sizes"] = r.seed_sizes;
  out["seed_hs"] = r.seed_hs;
  out["signals"] = used;
  out["warnings"] = r.warnings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_holoscope, m) {
  m.doc() = "Native core of the holoscope package";

  auto error = py::register_exception<Error>(m, "HoloscopeError");
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::class_<BipartiteGraph>(m, "Graph")
      .def(py::init(&from_rows), py::arg("rows"), py::arg("scale") = "1:5:1",
           "Rows are (user, object, timestamp or None, rating or None).")
      .def_static(
          "read",
          [](const std::filesystem::path& path, const std::string& scale) {
            return BipartiteGraph::ingest(io::read_edges(path), RatingScale::parse(scale));
          },
          py::arg("path"), py::arg("scale") = "1:5:1")
      .def("write", [](const BipartiteGraph& g, const std::filesystem::path& p) { io::write_edges(p, g.to_records()); })
      .def_property_readonly("num_users", &BipartiteGraph::num_users)
      .def_property_readonly("num_objects", &BipartiteGraph::num_objects)
      .def_property_readonly("num_events", &BipartiteGraph::num_events)
      .def_property_readonly("has_timestamps", &BipartiteGraph::has_timestamps)
      .def_property_readonly("has_ratings", &BipartiteGraph::has_ratings)
      .def_property_readonly("users", &BipartiteGraph::user_names)
      .def_property_readonly("objects", &BipartiteGraph::object_names)
      .def("rows", &to_rows)
      .def("__repr__", [](const BipartiteGraph& g) {
        return "<Graph users=" + std::to_string(g.num_users()) + " objects=" + std::to_string(g.num_objects()) +
               " events=" + std::to_string(g.num_events()) + ">";
      });

  m.def("detect", &detect, py::arg("graph"), py::arg("signals") = py::none(), py::arg("num_seeds") = 10,
        py::arg("cap_exponent") = 1.0 / 1.6, py::arg("base") = 32.0, py::arg("seed_matrix") = "auto",
        py::arg("time_bin") = 86400);

  m.def(
      "gen_background",
      [](std::size_t users, std::size_t objects, double exponent, double density, std::uint64_t seed) {
        BackgroundConfig c;
        c.n_users = users;
        c.n_objects = objects;
        c.exponent = exponent;
        c.density = density;
        c.seed = seed;
        return gen_background(c);
      },
      py::arg("users") = 10000, py::arg("objects") = 5000, py::arg("exponent") = 0.5, py::arg("density") = 0.002,
      py::arg("seed") = 1);

  m.def(
      "inject",
      [](const BipartiteGraph& g, std::size_t n_objects, std::size_t ratings_per_object, std::size_t n_fraudsters,
         double max_target_indegree, double camouflage_ratio, std::vector<double> rating_values,
         double surge_compression, std::uint64_t seed) {
        InjectionConfig c;
        c.n_objects = n_objects;
        c.ratings_per_object = ratings_per_object;
        c.n_fraudsters = n_fraudsters;
        c.max_target_indegree = max_target_indegree;
        c.camouflage_ratio = camouflage_ratio;
        c.rating_values = std::move(rating_values);
        c.surge_compression = surge_compression;
        c.seed = seed;
        auto inj = inject(g, c);
        return py::make_tuple(std::move(inj.graph), inj.truth.fraud_users, inj.truth.fraud_objects);
      },
      py::arg("graph"), py::arg("n_objects") = 200, py::arg("ratings_per_object") = 200,
      py::arg("n_fraudsters") = 2000, py::arg("max_target_indegree") = 100, py::arg("camouflage_ratio") = 0.2,
      py::arg("rating_values") = std::vector<double>{4.0, 4.5}, py::arg("surge_compression") = 0.1,
      py::arg("seed") = 7, "Returns (graph, fraud_users, fraud_objects).");

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<bool>& positive) {
        std::vector<char> p(positive.begin(), positive.end());
        return roc_auc(scores, p);
      },
      py::arg("scores"), py::arg("positive"));
  m.def(
      "f_measure",
      [](const std::vector<std::uint32_t>& predicted, const std::vector<std::uint32_t>& truth) {
        const auto r = f_measure(predicted, truth);
        return py::make_tuple(r.precision, r.recall, r.f1);
      },
      py::arg("predicted"), py::arg("truth"), "Returns (precision, recall, f1).");
  m.def(
      "time_obstruction_bound",
      [](double events, double bin_width, double rise, double decline) {
        const auto b = time_obstruction_bound(events, bin_width, rise, decline);
        return py::make_tuple(b.min_duration, b.min_height);
      },
      py::arg("events"), py::arg("bin_width"), py::arg("rise_slope"), py::arg("decline_slope"),
      "Returns (min_duration, min_height).");

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config_json) {
        RunConfig c = run_config_from_json(nlohmann::json::parse(config_json));
        c.command = command;
        nlohmann::json out;
        {
          py::gil_scoped_release release;
          if (command == "detect") out = cmd_detect(c);
          else if (command == "inject") out = cmd_inject(c);
          else if (command == "sweep") out = cmd_sweep(c);
          else if (command == "bench") out = cmd_bench(c);
          else throw ConfigError("unknown command '" + command + "'");
        }
        return out.dump();
      },
      py::arg("command"), py::arg("config_json"));
}
