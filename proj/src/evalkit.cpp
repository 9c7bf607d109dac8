#include "holoscope/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "holoscope/error.hpp"
#include "holoscope/indexed_heap.hpp"

namespace holoscope {

PrecisionRecall f_measure(std::span<const std::uint32_t> predicted, std::span<const std::uint32_t> truth) {
  std::vector<std::uint32_t> p(predicted.begin(), predicted.end()), t(truth.begin(), truth.end());
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  if (t.empty()) throw DataError("empty truth set");
  if (p.empty()) return {};
  std::vector<std::uint32_t> both;
  std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(both));
  PrecisionRecall out;
  out.precision = static_cast<double>(both.size()) / static_cast<double>(p.size());
  out.recall = static_cast<double>(both.size()) / static_cast<double>(t.size());
  if (!both.empty()) out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const char> positive) {
  if (scores.size() != positive.size()) throw DataError("scores and labels differ in size");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC needs both positive and negative items");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

AccuracyCurve make_curve(std::vector<CurvePoint> points) {
  std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.density < b.density; });
  AccuracyCurve curve;
  double x = 0.0, y = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.density > 0.0)) throw DataError("curve densities must be positive");
    if (i > 0 && !(p.density > points[i - 1].density)) throw DataError("curve densities must be strictly increasing");
    if (!p.accuracy) continue;
    if (*p.accuracy < 0.0 || *p.accuracy > 1.0) throw DataError("accuracy outside [0, 1]");
    curve.area += 0.5 * (p.density - x) * (*p.accuracy + y);
    x = p.density;
    y = *p.accuracy;
  }
  curve.points = std::move(points);
  return curve;
}

std::optional<double> lowest_detection_density(const AccuracyCurve& curve, double threshold) {
  for (const auto& p : curve.points)
    if (p.accuracy && *p.accuracy >= threshold) return p.density;
  return std::nullopt;
}

SweepResult density_sweep(const BipartiteGraph& base, const SweepConfig& config, const SweepDetector& detector) {
  if (config.densities.empty()) throw ConfigError("empty density grid");
  for (double d : config.densities)
    if (!(d > 0.0) || d > 1.0) throw ConfigError("densities must lie in (0, 1]");
  SweepResult out;
  std::vector<CurvePoint> user_points, sink_points;
  for (std::size_t i = 0; i < config.densities.size(); ++i) {
    SweepPoint point;
    point.density = config.densities[i];
    point.n_fraudsters = static_cast<std::size_t>(
        std::llround(static_cast<double>(config.injection.ratings_per_object) / point.density));
    const auto started = std::chrono::steady_clock::now();
    try {
      InjectionConfig inj = config.injection;
      inj.n_fraudsters = point.n_fraudsters;
      inj.seed = derive_seed(config.seed, 2, i);
      const Injection injected = inject(base, inj);
      const auto& g = injected.graph;
      std::vector<UserId> truth_users;
      for (const auto& name : injected.truth.fraud_users) truth_users.push_back(*g.find_user(name));
      std::vector<char> target(g.num_objects(), 0);
      for (const auto& name : injected.truth.fraud_objects) target[*g.find_object(name)] = 1;

      const SweepDetection found = detector(g);
      point.user_f1 = f_measure(found.users, truth_users).f1;
      point.sink_auc = roc_auc(found.sink_scores, target);
    } catch (const Error& e) {
      point.user_f1.reset();
      point.sink_auc.reset();
      point.error = e.what();
    }
    point.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    user_points.push_back({point.density, point.user_f1});
    sink_points.push_back({point.density, point.sink_auc});
    out.points.push_back(std::move(point));
  }
  out.users = make_curve(std::move(user_points));
  out.sinks = make_curve(std::move(sink_points));
  out.users_lowest = lowest_detection_density(out.users);
  out.sinks_lowest = lowest_detection_density(out.sinks);
  return out;
}

SweepDetector holoscope_detector(DetectConfig config) {
  return [config](const BipartiteGraph& g) {
    DetectConfig cfg = config;
    cfg.signals = SignalTables::available_signals(g, cfg.signals);
    const auto r = fast_greedy(g, cfg);
    SweepDetection out;
    out.users = r.best.users;
    out.sink_scores = r.best.sink_scores;
    for (std::size_t s : r.seed_sizes) out.max_seed_size = std::max(out.max_seed_size, s);
    return out;
  };
}

SweepDetector baseline_detector() {
  return [](const BipartiteGraph& g) {
    const auto block = avg_degree_baseline(g);
    SweepDetection out;
    out.users = block.users;
    out.sink_scores.assign(g.num_objects(), 0.0);
    for (ObjectId v : block.objects) out.sink_scores[v] = 1.0;
    return out;
  };
}

DenseBlock avg_degree_baseline(const BipartiteGraph& g) {
  const std::size_t nu = g.num_users(), n = nu + g.num_objects();
  if (g.num_pairs() == 0) throw DataError("empty graph");
  std::vector<double> degree(n, 0.0);
  double edges = 0.0;
  for (PairId p = 0; p < g.num_pairs(); ++p) {
    const double e = g.multiplicity(p);
    degree[g.pair_user(p)] += e;
    degree[nu + g.pair_object(p)] += e;
    edges += e;
  }
  IndexedMinHeap heap(n);
  for (std::size_t i = 0; i < n; ++i) heap.push(static_cast<std::uint32_t>(i), degree[i]);
  std::vector<char> alive(n, 1);
  std::vector<std::uint32_t> order;
  double best = edges / static_cast<double>(n);
  std::size_t best_removed = 0;
  while (heap.size() > 1) {
    const auto [node, d] = heap.pop();
    alive[node] = 0;
    order.push_back(node);
    edges -= d;
    if (node < nu) {
      for (PairId p : g.user_pairs(node)) {
        const std::uint32_t other = static_cast<std::uint32_t>(nu + g.pair_object(p));
        if (alive[other]) heap.update(other, heap.key(other) - g.multiplicity(p));
      }
    } else {
      for (PairId p : g.object_pairs(node - static_cast<std::uint32_t>(nu))) {
        const std::uint32_t other = g.pair_user(p);
        if (alive[other]) heap.update(other, heap.key(other) - g.multiplicity(p));
      }
    }
    const double density = edges / static_cast<double>(heap.size());
    if (density > best) {
      best = density;
      best_removed = order.size();
    }
  }
  std::vector<char> removed(n, 0);
  for (std::size_t i = 0; i < best_removed; ++i) removed[order[i]] = 1;
  DenseBlock out;
  out.density = best;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    if (i < nu) out.users.push_back(static_cast<UserId>(i));
    else out.objects.push_back(static_cast<ObjectId>(i - nu));
  }
  return out;
}

}  // namespace holoscope
