#pragma once

// Greedy shaving of a seed user set and the seeded driver that runs it from
// the leading singular vectors of the (optionally matricized) adjacency matrix.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "holoscope/graph.hpp"
#include "holoscope/spectral.hpp"
#include "holoscope/suspiciousness.hpp"

namespace holoscope {

struct TracePoint {
  std::size_t size = 0;
  double hs = 0.0;
};

struct DetectionResult {
  std::vector<UserId> users;  // A*, ascending
  double hs = 0.0;
  std::vector<double> sink_scores;  // f_A*(v) * P(v|A*) for every object
  std::vector<TracePoint> trace;    // HS after each removal, starting at |A0|
  std::vector<UserId> removal_order;
  std::size_t seed_index = 0;
};

/// Runs the peeling from `seed`. Throws DataError("degenerate seed") when the
/// seed has no incident edges.
DetectionResult greedy_shaving(const SignalTables& tables, std::span<const UserId> seed);

enum class SeedMatrix { automatic, adjacency, matricized };

/// Rating values <= low_max fall in cluster 0, >= high_min in cluster 2,
/// anything between in cluster 1.
struct RatingClusters {
  double low_max = 2.0;
  double high_min = 4.0;
  int cluster(double rating) const { return rating <= low_max ? 0 : (rating >= high_min ? 2 : 1); }
};

struct DetectConfig {
  SignalConfig signals;
  std::size_t num_seeds = 10;
  double cap_exponent = 1.0 / 1.6;
  /// automatic: adjacency seeds, plus matricized seeds when phi is active.
  SeedMatrix seed_matrix = SeedMatrix::automatic;
  Timestamp time_bin = 86400;
  RatingClusters rating_clusters;
  SvdOptions svd;
};

/// Users x objects with cell value sum of effective edge weights.
SparseMatrix adjacency_matrix(const SignalTables& tables);

struct Matricization {
  SparseMatrix matrix;
  std::vector<ObjectId> column_object;
  std::vector<Timestamp> column_bin;
  std::vector<int> column_cluster;
};

/// Users x observed (object, time bin, rating cluster) triples. Cells count
/// events, scaled by the object's effective sigma. Throws
/// DataError("matricization requires timestamps").
Matricization matricize(const SignalTables& tables, Timestamp time_bin, const RatingClusters& clusters = {});

struct SeedSet {
  std::vector<std::vector<UserId>> seeds;
  std::vector<std::size_t> source_vector;  // singular vector index per seed
  std::vector<std::string> warnings;
};

/// Seeds from the top-k left singular vectors: entries above 1/sqrt(rows) in
/// magnitude, ordered by magnitude and capped at floor(rows^cap_exponent).
/// A mixed-sign vector yields one seed per sign.
SeedSet svd_seeds(const SparseMatrix& m, std::size_t k, double cap_exponent, SvdOptions svd = {});

/// Largest seed size svd_seeds can return.
std::size_t seed_cap(std::size_t rows, double cap_exponent);

struct FastGreedyResult {
  DetectionResult best;
  std::vector<double> seed_hs;          // best HS reached from each seed
  std::vector<std::size_t> seed_sizes;  // |A0| of each seed
  double max_explored_hs = 0.0;         // max over every (seed, step)
  std::vector<std::string> warnings;
  SignalConfig signals;  // signals actually used
};

/// Throws DataError when every seed is degenerate.
FastGreedyResult fast_greedy(const BipartiteGraph& g, const DetectConfig& config);

}  // namespace holoscope
