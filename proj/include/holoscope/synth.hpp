#pragma once

// Synthetic inputs: power-law (hyperbolic) community blocks, background graphs
// with timestamps and ratings, and fraud injection with ground-truth labels.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "holoscope/graph.hpp"

namespace holoscope {

/// Counter-based seed fan-out: the same (root, stream, index) always gives
/// the same child seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index);

using Cell = std::pair<std::uint32_t, std::uint32_t>;

/// Chung-Lu block with p_ij = min(1, c (i+1)^-g (j+1)^-g); c is solved so
/// that the expected density equals `density`. Cells come out sorted by row
/// then column. Throws ConfigError for density outside (0, 1], or density 1
/// with a positive exponent.
std::vector<Cell> hyperbolic_cells(std::size_t rows, std::size_t cols, double exponent, double density,
                                   std::uint64_t seed);

/// Expected density of the block above for a given c.
double hyperbolic_expected_density(std::size_t rows, std::size_t cols, double exponent, double c);

struct SyntheticGraph {
  BipartiteGraph graph;
  std::vector<std::string> block_users;
  std::vector<std::string> block_objects;
  double realized_density = 0.0;
};

/// Graph made of one hyperbolic block with users "u<i>" and objects "o<j>".
SyntheticGraph gen_hyperbolic(std::size_t n_sources, std::size_t n_sinks, double exponent, double density,
                              std::uint64_t seed);

struct BackgroundConfig {
  std::size_t n_users = 10000;
  std::size_t n_objects = 5000;
  double exponent = 0.5;
  double density = 0.002;
  Timestamp start = 1'300'000'000;
  Timestamp span = 3 * 365 * 86400;
  RatingScale scale{0.5, 5.0, 0.5};
  double rating_noise = 0.75;
  std::uint64_t seed = 1;
};

/// Hyperbolic background with uniform timestamps over [start, start + span)
/// and ratings drawn around a per-object quality.
BipartiteGraph gen_background(const BackgroundConfig& config);

struct InjectionConfig {
  std::size_t n_objects = 200;
  std::size_t ratings_per_object = 200;
  std::size_t n_fraudsters = 2000;
  double max_target_indegree = 100;
  double camouflage_ratio = 0.2;
  std::vector<double> rating_values{4.0, 4.5};
  double surge_compression = 0.1;
  std::uint64_t seed = 7;
};

struct GroundTruth {
  std::vector<std::string> fraud_users;
  std::vector<std::string> fraud_objects;
};

struct Injection {
  BipartiteGraph graph;
  GroundTruth truth;
  std::size_t fraud_events = 0;
  std::size_t camouflage_events = 0;
  std::vector<EdgeRecord> added;
};

/// Injects a fraud block. Targets are drawn from objects whose event count is
/// at most max_target_indegree; each target gets ratings_per_object events
/// from distinct fraudsters; camouflage goes to other objects in proportion
/// to their indegree. Existing node ids are kept.
Injection inject(const BipartiteGraph& g, const InjectionConfig& config);

}  // namespace holoscope
