#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "holoscope/graph.hpp"

namespace fixtures {

inline holoscope::EdgeRecord edge(std::string u, std::string v) { return {std::move(u), std::move(v), {}, {}, {}}; }

inline holoscope::EdgeRecord event(std::string u, std::string v, holoscope::Timestamp t, double rating) {
  return {std::move(u), std::move(v), t, rating, {}};
}

// Random multigraph with timestamps and ratings on a 1..5 scale. Users and
// objects are named so that every node appears at least once.
inline std::vector<holoscope::EdgeRecord> random_events(std::size_t users, std::size_t objects, std::size_t events,
                                                        std::uint64_t seed, bool attributes = true) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_u(0, users - 1), pick_v(0, objects - 1);
  std::uniform_int_distribution<holoscope::Timestamp> pick_t(0, 200000);
  std::uniform_int_distribution<int> pick_r(1, 5);
  std::vector<holoscope::EdgeRecord> out;
  auto add = [&](std::size_t u, std::size_t v) {
    holoscope::EdgeRecord r{"u" + std::to_string(u), "v" + std::to_string(v), {}, {}, {}};
    if (attributes) {
      r.timestamp = pick_t(rng);
      r.rating = pick_r(rng);
    }
    out.push_back(std::move(r));
  };
  for (std::size_t u = 0; u < users; ++u) add(u, pick_v(rng));
  for (std::size_t v = 0; v < objects; ++v) add(pick_u(rng), v);
  while (out.size() < events) add(pick_u(rng), pick_v(rng));
  return out;
}

inline holoscope::BipartiteGraph random_graph(std::size_t users, std::size_t objects, std::size_t events,
                                              std::uint64_t seed, bool attributes = true) {
  return holoscope::BipartiteGraph::ingest(random_events(users, objects, events, seed, attributes),
                                           holoscope::RatingScale{});
}

}  // namespace fixtures

namespace fixtures {

// Expected per-bin counts of N events spread as a triangle that rises for
// `rise` seconds and falls for `fall` seconds, starting `offset` seconds into
// a zero-padded series of bins of width dt.
inline std::vector<double> triangle_attack(double events, double dt, double rise, double fall, double offset) {
  const double total = rise + fall;
  auto cdf = [&](double t) {
    t -= offset;
    if (t <= 0.0) return 0.0;
    if (t >= total) return 1.0;
    if (t <= rise) return t * t / (rise * total);
    const double r = total - t;
    return 1.0 - r * r / (fall * total);
  };
  const auto bins = static_cast<std::size_t>(std::ceil((offset + total) / dt)) + 2;
  std::vector<double> counts(bins);
  for (std::size_t i = 0; i < bins; ++i)
    counts[i] = events * (cdf(static_cast<double>(i + 1) * dt) - cdf(static_cast<double>(i) * dt));
  return counts;
}

// Largest increase and decrease between adjacent bins, in counts per second.
inline std::pair<double, double> adjacent_slopes(const std::vector<double>& counts, double dt) {
  double rise = 0.0, fall = 0.0;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    rise = std::max(rise, (counts[i + 1] - counts[i]) / dt);
    fall = std::max(fall, (counts[i] - counts[i + 1]) / dt);
  }
  return {rise, fall};
}

}  // namespace fixtures
