#include "holoscope/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "holoscope/error.hpp"
#include "holoscope/indexed_heap.hpp"

namespace holoscope {

DetectionResult greedy_shaving(const SignalTables& tables, std::span<const UserId> seed) {
  const auto& g = tables.graph();
  if (seed.empty()) throw DataError("empty seed");
  bool any_edge = false;
  for (UserId u : seed) {
    if (u >= g.num_users()) throw DataError("unknown user id " + std::to_string(u));
    any_edge = any_edge || !g.user_pairs(u).empty();
  }
  if (!any_edge) throw DataError("degenerate seed");

  ContrastState state(tables, seed);
  const auto initial_scale = state.kappa_scale();
  IndexedMinHeap heap(g.num_users());
  for (UserId u : state.seed()) heap.push(u, state.score(u));

  DetectionResult out;
  out.trace.push_back({state.size(), state.objective()});
  double best = out.trace.back().hs;
  std::size_t best_removed = 0;
  while (state.size() > 1) {
    const UserId u = heap.pop().first;
    state.remove_user(u);
    out.removal_order.push_back(u);
    for (UserId t : state.touched_users()) heap.update(t, state.score(t));
    const double hs = state.objective();
    out.trace.push_back({state.size(), hs});
    if (hs > best) {
      best = hs;
      best_removed = out.removal_order.size();
    }
  }

  std::vector<char> removed(g.num_users(), 0);
  for (std::size_t i = 0; i < best_removed; ++i) removed[out.removal_order[i]] = 1;
  for (UserId u : state.seed())
    if (!removed[u]) out.users.push_back(u);

  const bool pinned = tables.config().kappa_scaling == KappaScaling::initial;
  ContrastState final_state(tables, state.seed(), out.users,
                            pinned ? std::optional<double>(initial_scale) : std::nullopt);
  out.hs = final_state.objective();
  out.sink_scores.assign(g.num_objects(), 0.0);
  for (ObjectId v : final_state.sinks()) out.sink_scores[v] = final_state.engagement(v) * final_state.contrast(v);
  return out;
}

SparseMatrix adjacency_matrix(const SignalTables& tables) {
  const auto& g = tables.graph();
  std::vector<Triplet> entries;
  entries.reserve(g.num_pairs());
  for (PairId p = 0; p < g.num_pairs(); ++p) entries.push_back({g.pair_user(p), g.pair_object(p), tables.pair_weight(p)});
  return SparseMatrix(g.num_users(), g.num_objects(), entries);
}

Matricization matricize(const SignalTables& tables, Timestamp time_bin, const RatingClusters& clusters) {
  const auto& g = tables.graph();
  if (!g.has_timestamps()) throw DataError("matricization requires timestamps");
  if (time_bin <= 0) throw ConfigError("time bin must be positive");
  using Key = std::tuple<ObjectId, Timestamp, int>;
  std::map<Key, std::uint32_t> columns;
  std::vector<Triplet> entries;
  entries.reserve(g.num_events());
  Matricization out;
  for (PairId p = 0; p < g.num_pairs(); ++p) {
    const ObjectId v = g.pair_object(p);
    const auto times = g.pair_timestamps(p);
    const auto ratings = g.pair_ratings(p);
    for (std::size_t e = 0; e < times.size(); ++e) {
      const int cluster = ratings.empty() ? 1 : clusters.cluster(g.scale().value(ratings[e]));
      const Key key{v, times[e] / time_bin, cluster};
      auto [it, inserted] = columns.try_emplace(key, static_cast<std::uint32_t>(columns.size()));
      if (inserted) {
        out.column_object.push_back(v);
        out.column_bin.push_back(std::get<1>(key));
        out.column_cluster.push_back(cluster);
      }
      entries.push_back({g.pair_user(p), it->second, tables.sigma(v) * g.pair_prior(p)});
    }
  }
  out.matrix = SparseMatrix(g.num_users(), columns.size(), entries);
  return out;
}

std::size_t seed_cap(std::size_t rows, double cap_exponent) {
  if (!(cap_exponent > 0.0)) throw ConfigError("cap exponent must be positive");
  const double cap = std::floor(std::pow(static_cast<double>(rows), cap_exponent) + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::min(cap, static_cast<double>(rows))));
}

SeedSet svd_seeds(const SparseMatrix& m, std::size_t k, double cap_exponent, SvdOptions svd) {
  if (k == 0) throw ConfigError("number of seeds must be at least 1");
  SeedSet out;
  const std::size_t cap = seed_cap(m.rows(), cap_exponent);
  const std::size_t available = std::min(m.rows(), m.cols());
  if (available == 0 || m.nonzeros() == 0) {
    out.warnings.push_back("matrix has no entries; no seeds");
    return out;
  }
  if (k > available) {
    out.warnings.push_back("requested " + std::to_string(k) + " singular vectors, only " + std::to_string(available) +
                           " available");
    k = available;
  }
  svd.rank = k;
  const SvdResult r = truncated_svd(m, svd);
  // a vector spread evenly over every row sits exactly on the threshold
  const double threshold = (1.0 - 1e-9) / std::sqrt(static_cast<double>(m.rows()));
  const double top = r.sigma(0);
  std::size_t used = 0;

  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (r.sigma(col) <= 1e-12 * top) break;
    ++used;
    for (double sign : {1.0, -1.0}) {
      std::vector<std::pair<double, UserId>> ranked;
      for (Eigen::Index row = 0; row < r.u.rows(); ++row) {
        const double x = sign * r.u(row, col);
        if (x > threshold) ranked.emplace_back(x, static_cast<UserId>(row));
      }
      if (ranked.empty()) continue;
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (ranked.size() > cap) ranked.resize(cap);
      std::vector<UserId> seed;
      for (const auto& [x, u] : ranked) seed.push_back(u);
      std::sort(seed.begin(), seed.end());
      if (std::find(out.seeds.begin(), out.seeds.end(), seed) != out.seeds.end()) continue;
      out.seeds.push_back(std::move(seed));
      out.source_vector.push_back(i);
    }
  }
  if (used < k) out.warnings.push_back("matrix rank " + std::to_string(used) + " is below the requested " + std::to_string(k));
  return out;
}

FastGreedyResult fast_greedy(const BipartiteGraph& g, const DetectConfig& config) {
  if (g.num_pairs() == 0) throw DataError("empty graph");
  FastGreedyResult out;
  const SignalTables tables(g, config.signals);
  out.signals = config.signals;

  const bool tensor = config.seed_matrix == SeedMatrix::matricized ||
                      (config.seed_matrix == SeedMatrix::automatic && tables.phi_active());
  const bool plain = config.seed_matrix != SeedMatrix::matricized;
  SeedSet seeds;
  auto collect = [&](const SparseMatrix& m) {
    SeedSet part = svd_seeds(m, config.num_seeds, config.cap_exponent, config.svd);
    for (std::size_t i = 0; i < part.seeds.size(); ++i) {
      if (std::find(seeds.seeds.begin(), seeds.seeds.end(), part.seeds[i]) != seeds.seeds.end()) continue;
      seeds.seeds.push_back(std::move(part.seeds[i]));
      seeds.source_vector.push_back(part.source_vector[i]);
    }
    seeds.warnings.insert(seeds.warnings.end(), part.warnings.begin(), part.warnings.end());
  };
  if (tensor) collect(matricize(tables, config.time_bin, config.rating_clusters).matrix);
  if (plain) collect(adjacency_matrix(tables));
  out.warnings = std::move(seeds.warnings);

  bool have = false;
  for (std::size_t i = 0; i < seeds.seeds.size(); ++i) {
    const auto& seed = seeds.seeds[i];
    out.seed_sizes.push_back(seed.size());
    DetectionResult r;
    try {
      r = greedy_shaving(tables, seed);
    } catch (const DataError& e) {
      out.warnings.push_back("seed " + std::to_string(i) + ": " + e.what());
      out.seed_hs.push_back(0.0);
      continue;
    }
    r.seed_index = i;
    out.seed_hs.push_back(r.hs);
    for (const auto& t : r.trace) out.max_explored_hs = std::max(out.max_explored_hs, t.hs);
    if (!have || r.hs > out.best.hs) {
      out.best = std::move(r);
      have = true;
    }
  }
  if (!have) throw DataError("all seeds degenerate");
  return out;
}

}  // namespace holoscope
