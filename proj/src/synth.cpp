#include "holoscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "holoscope/error.hpp"

namespace holoscope {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(root) ^ stream) ^ index);
}

namespace {

double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

// First `k` entries of a Fisher-Yates shuffle of `items`.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) std::swap(items[i], items[i + uniform_index(rng, items.size() - i)]);
}

struct PowerWeights {
  std::vector<double> a, b, b_prefix;  // b_prefix[j] = b_0 + ... + b_{j-1}
};

PowerWeights power_weights(std::size_t rows, std::size_t cols, double exponent) {
  PowerWeights w;
  w.a.resize(rows);
  w.b.resize(cols);
  w.b_prefix.assign(cols + 1, 0.0);
  for (std::size_t i = 0; i < rows; ++i) w.a[i] = std::pow(static_cast<double>(i + 1), -exponent);
  for (std::size_t j = 0; j < cols; ++j) {
    w.b[j] = std::pow(static_cast<double>(j + 1), -exponent);
    w.b_prefix[j + 1] = w.b_prefix[j] + w.b[j];
  }
  return w;
}

// Columns j with c * a * b_j >= 1.
std::size_t saturated_columns(const PowerWeights& w, double ca, double exponent) {
  const std::size_t cols = w.b.size();
  std::size_t j = 0;
  if (exponent > 0.0) {
    const double x = std::floor(std::pow(ca, 1.0 / exponent));
    j = x >= static_cast<double>(cols) ? cols : (x > 0.0 ? static_cast<std::size_t>(x) : 0);
  } else {
    j = ca >= 1.0 ? cols : 0;
  }
  while (j < cols && ca * w.b[j] >= 1.0) ++j;
  while (j > 0 && ca * w.b[j - 1] < 1.0) --j;
  return j;
}

double expected_edges(const PowerWeights& w, double c, double exponent) {
  const double total_b = w.b_prefix.back();
  double sum = 0.0;
  for (double a : w.a) {
    const std::size_t j = saturated_columns(w, c * a, exponent);
    sum += static_cast<double>(j) + c * a * (total_b - w.b_prefix[j]);
  }
  return sum;
}

void check_block(std::size_t rows, std::size_t cols, double exponent, double density) {
  if (rows == 0 || cols == 0) throw ConfigError("block dimensions must be positive");
  if (!(exponent >= 0.0)) throw ConfigError("power exponent must be non-negative");
  if (!(density > 0.0) || density > 1.0) throw ConfigError("density must be in (0, 1]");
  if (exponent > 0.0 && density >= 1.0) throw ConfigError("density 1 is infeasible for a positive exponent");
}

}  // namespace

double hyperbolic_expected_density(std::size_t rows, std::size_t cols, double exponent, double c) {
  const auto w = power_weights(rows, cols, exponent);
  return expected_edges(w, c, exponent) / (static_cast<double>(rows) * static_cast<double>(cols));
}

std::vector<Cell> hyperbolic_cells(std::size_t rows, std::size_t cols, double exponent, double density,
                                   std::uint64_t seed) {
  check_block(rows, cols, exponent, density);
  const auto w = power_weights(rows, cols, exponent);
  const double target = density * static_cast<double>(rows) * static_cast<double>(cols);
  double lo = 0.0, hi = 1.0;
  while (expected_edges(w, hi, exponent) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw ConfigError("density unreachable for this exponent");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected_edges(w, mid, exponent) < target ? lo : hi) = mid;
  }
  const double c = hi;

  std::mt19937_64 rng(seed);
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(target * 1.05) + 16);
  for (std::size_t i = 0; i < rows; ++i) {
    const double ca = c * w.a[i];
    auto prob = [&](std::size_t j) { return std::min(1.0, ca * w.b[j]); };
    std::size_t j = 0;
    double p = prob(0);
    while (j < cols) {
      if (p < 1.0) {
        if (p <= 0.0) break;
        const double r = 1.0 - uniform01(rng);
        const double skip = std::floor(std::log(r) / std::log1p(-p));
        if (skip >= static_cast<double>(cols - j)) break;
        j += static_cast<std::size_t>(skip);
      }
      const double q = prob(j);
      if (q >= 1.0 || uniform01(rng) < q / p) cells.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      p = q;
      ++j;
    }
  }
  return cells;
}

SyntheticGraph gen_hyperbolic(std::size_t n_sources, std::size_t n_sinks, double exponent, double density,
                              std::uint64_t seed) {
  const auto cells = hyperbolic_cells(n_sources, n_sinks, exponent, density, seed);
  if (cells.empty()) throw ConfigError("generated block has no edges");
  SyntheticGraph out;
  for (std::size_t i = 0; i < n_sources; ++i) out.block_users.push_back("u" + std::to_string(i));
  for (std::size_t j = 0; j < n_sinks; ++j) out.block_objects.push_back("o" + std::to_string(j));
  std::vector<EdgeRecord> records;
  records.reserve(cells.size());
  for (const auto& [i, j] : cells) records.push_back({out.block_users[i], out.block_objects[j], {}, {}, {}});
  out.graph = BipartiteGraph::ingest(records, RatingScale{}, out.block_users, out.block_objects);
  out.realized_density =
      static_cast<double>(cells.size()) / (static_cast<double>(n_sources) * static_cast<double>(n_sinks));
  return out;
}

BipartiteGraph gen_background(const BackgroundConfig& config) {
  if (config.span <= 0 || config.start < 0) throw ConfigError("time span must be positive");
  const auto cells = hyperbolic_cells(config.n_users, config.n_objects, config.exponent, config.density,
                                      derive_seed(config.seed, 0, 0));
  std::mt19937_64 rng(derive_seed(config.seed, 1, 0));
  const double lo = config.scale.min + 0.25 * (config.scale.max - config.scale.min);
  const double hi = config.scale.max - 0.1 * (config.scale.max - config.scale.min);
  std::vector<double> quality(config.n_objects);
  for (double& q : quality) q = lo + (hi - lo) * uniform01(rng);

  std::vector<std::string> users(config.n_users), objects(config.n_objects);
  for (std::size_t i = 0; i < users.size(); ++i) users[i] = "u" + std::to_string(i);
  for (std::size_t j = 0; j < objects.size(); ++j) objects[j] = "o" + std::to_string(j);

  std::normal_distribution<double> noise(0.0, config.rating_noise);
  std::vector<EdgeRecord> records;
  records.reserve(cells.size());
  const auto categories = static_cast<double>(config.scale.categories());
  for (const auto& [i, j] : cells) {
    EdgeRecord r{users[i], objects[j], {}, {}, {}};
    r.timestamp = config.start + static_cast<Timestamp>(uniform_index(rng, static_cast<std::uint64_t>(config.span)));
    const double raw = quality[j] + noise(rng);
    const double idx = std::clamp(std::round((raw - config.scale.min) / config.scale.step), 0.0, categories - 1.0);
    r.rating = config.scale.value(static_cast<RatingCategory>(idx));
    records.push_back(std::move(r));
  }
  return BipartiteGraph::ingest(records, config.scale, users, objects);
}

Injection inject(const BipartiteGraph& g, const InjectionConfig& config) {
  if (config.n_objects == 0 || config.ratings_per_object == 0 || config.n_fraudsters == 0)
    throw ConfigError("injection counts must be positive");
  if (config.ratings_per_object > config.n_fraudsters)
    throw ConfigError("ratings per object exceed the number of fraudsters (density above 1)");
  if (config.n_fraudsters > g.num_users())
    throw ConfigError("need " + std::to_string(config.n_fraudsters) + " fraudsters but the graph has " +
                      std::to_string(g.num_users()) + " users");
  if (config.camouflage_ratio < 0.0) throw ConfigError("camouflage ratio must be non-negative");
  std::vector<RatingCategory> fraud_ratings;
  if (g.has_ratings()) {
    if (config.rating_values.empty()) throw ConfigError("no fraud rating values");
    for (double r : config.rating_values) {
      const auto c = g.scale().category(r);
      if (!c) throw ConfigError("fraud rating " + std::to_string(r) + " is not on the scale");
      fraud_ratings.push_back(*c);
    }
  }

  std::mt19937_64 rng(config.seed);
  std::vector<double> indegree(g.num_objects(), 0.0);
  std::vector<ObjectId> eligible;
  for (ObjectId v = 0; v < g.num_objects(); ++v) {
    for (PairId p : g.object_pairs(v)) indegree[v] += g.multiplicity(p);
    if (indegree[v] <= config.max_target_indegree) eligible.push_back(v);
  }
  if (eligible.size() < config.n_objects)
    throw DataError("need " + std::to_string(config.n_objects) + " objects with indegree <= " +
                    std::to_string(config.max_target_indegree) + ", found " + std::to_string(eligible.size()) +
                    " (short by " + std::to_string(config.n_objects - eligible.size()) + ")");
  partial_shuffle(eligible, config.n_objects, rng);
  std::vector<ObjectId> targets(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(config.n_objects));

  std::vector<UserId> users(g.num_users());
  std::iota(users.begin(), users.end(), 0);
  partial_shuffle(users, config.n_fraudsters, rng);
  std::vector<UserId> fraudsters(users.begin(), users.begin() + static_cast<std::ptrdiff_t>(config.n_fraudsters));

  Timestamp t_lo = 0, t_hi = 0;
  std::vector<Timestamp> gaps;
  if (g.has_timestamps()) {
    std::tie(t_lo, t_hi) = g.time_range();
    for (ObjectId v = 0; v < g.num_objects(); ++v) {
      const auto ts = g.object_timestamps(v);
      for (std::size_t i = 1; i < ts.size(); ++i) gaps.push_back(ts[i] - ts[i - 1]);
    }
  }
  auto random_time = [&]() {
    return t_lo + static_cast<Timestamp>(uniform_index(rng, static_cast<std::uint64_t>(t_hi - t_lo) + 1));
  };

  Injection out;
  for (ObjectId v : targets) {
    const Timestamp start = g.has_timestamps() ? random_time() : 0;
    partial_shuffle(fraudsters, config.ratings_per_object, rng);
    for (std::size_t i = 0; i < config.ratings_per_object; ++i) {
      EdgeRecord r{g.user_name(fraudsters[i]), g.object_name(v), {}, {}, {}};
      if (g.has_timestamps()) {
        const Timestamp gap = gaps.empty() ? 0 : gaps[uniform_index(rng, gaps.size())];
        r.timestamp = start + static_cast<Timestamp>(std::llround(config.surge_compression * static_cast<double>(gap)));
      }
      if (g.has_ratings()) r.rating = g.scale().value(fraud_ratings[uniform_index(rng, fraud_ratings.size())]);
      out.added.push_back(std::move(r));
    }
  }
  out.fraud_events = out.added.size();

  const auto camouflage = static_cast<std::size_t>(
      std::llround(config.camouflage_ratio * static_cast<double>(config.n_objects * config.ratings_per_object)));
  if (camouflage > 0) {
    std::vector<char> is_target(g.num_objects(), 0);
    for (ObjectId v : targets) is_target[v] = 1;
    std::vector<ObjectId> pool;
    std::vector<double> cumulative;
    double acc = 0.0;
    for (ObjectId v = 0; v < g.num_objects(); ++v) {
      if (is_target[v] || indegree[v] <= 0.0) continue;
      acc += indegree[v];
      pool.push_back(v);
      cumulative.push_back(acc);
    }
    if (pool.empty()) throw DataError("no non-target objects available for camouflage");
    for (std::size_t i = 0; i < camouflage; ++i) {
      const UserId u = fraudsters[uniform_index(rng, fraudsters.size())];
      const double x = uniform01(rng) * acc;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
      const ObjectId v = pool[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pool.size() - 1)];
      EdgeRecord r{g.user_name(u), g.object_name(v), {}, {}, {}};
      if (g.has_timestamps()) r.timestamp = random_time();
      if (g.has_ratings()) {
        const auto ps = g.object_pairs(v);
        const PairId p = ps[uniform_index(rng, ps.size())];
        const auto rs = g.pair_ratings(p);
        r.rating = g.scale().value(rs[uniform_index(rng, rs.size())]);
      }
      out.added.push_back(std::move(r));
    }
  }
  out.camouflage_events = out.added.size() - out.fraud_events;

  auto records = g.to_records();
  const bool has_prior = !records.empty() && records.front().prior.has_value();
  for (auto r : out.added) {
    if (has_prior) r.prior = 1.0;
    records.push_back(std::move(r));
  }
  out.graph = BipartiteGraph::ingest(records, g.scale(), g.user_names(), g.object_names());
  for (UserId u : fraudsters) out.truth.fraud_users.push_back(g.user_name(u));
  for (ObjectId v : targets) out.truth.fraud_objects.push_back(g.object_name(v));
  return out;
}

}  // namespace holoscope
