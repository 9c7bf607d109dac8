#pragma once

// Detection metrics, accuracy-versus-density curves and the injection sweep
// harness, plus an average-degree peeling baseline.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holoscope/detector.hpp"
#include "holoscope/graph.hpp"
#include "holoscope/synth.hpp"

namespace holoscope {

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Set overlap scores. Duplicates are ignored. Throws DataError for an empty
/// truth set; an empty prediction scores zero.
PrecisionRecall f_measure(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth);

/// Mann-Whitney AUC with averaged ranks for ties. `positive[i]` marks item i.
/// Throws DataError unless both classes occur.
double roc_auc(std::span<const double> scores, std::span<const char> positive);

struct CurvePoint {
  double density = 0.0;
  std::optional<double> accuracy;  // absent when the run failed
};

struct AccuracyCurve {
  std::vector<CurvePoint> points;  // strictly increasing density
  double area = 0.0;
};

/// Sorts by density and integrates by trapezoid from an added (0, 0) point;
/// absent points are skipped. Throws DataError for repeated densities or
/// accuracies outside [0, 1].
AccuracyCurve make_curve(std::vector<CurvePoint> points);

/// Smallest density with accuracy >= threshold.
std::optional<double> lowest_detection_density(const AccuracyCurve& curve, double threshold = 0.9);

struct SweepDetection {
  std::vector<UserId> users;
  std::vector<double> sink_scores;  // one per object
  std::size_t max_seed_size = 0;
};

using SweepDetector = std::function<SweepDetection(const BipartiteGraph&)>;

struct SweepConfig {
  std::vector<double> densities;
  InjectionConfig injection;  // n_fraudsters and seed are set per point
  std::uint64_t seed = 1;
};

struct SweepPoint {
  double density = 0.0;
  std::size_t n_fraudsters = 0;
  std::optional<double> user_f1;
  std::optional<double> sink_auc;
  double seconds = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  AccuracyCurve users;
  AccuracyCurve sinks;
  std::optional<double> users_lowest;
  std::optional<double> sinks_lowest;
};

/// Injects at every density (n_fraudsters = ratings_per_object / density),
/// runs the detector and scores users by F-measure and sinks by AUC.
SweepResult density_sweep(const BipartiteGraph& base, const SweepConfig& config, const SweepDetector& detector);

SweepDetector holoscope_detector(DetectConfig config);
SweepDetector baseline_detector();

struct DenseBlock {
  std::vector<UserId> users;
  std::vector<ObjectId> objects;
  double density = 0.0;  // events / (|A| + |B|)
};

/// Greedy peeling over users and objects that keeps the prefix with the best
/// average degree.
DenseBlock avg_degree_baseline(const BipartiteGraph& g);

}  // namespace holoscope
