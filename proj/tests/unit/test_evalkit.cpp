#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "holoscope/error.hpp"
#include "holoscope/evalkit.hpp"

using namespace holoscope;
using fixtures::edge;

namespace {

// Exhaustive pair count: concordant pairs score 1, ties 1/2.
double pair_count_auc(const std::vector<double>& s, const std::vector<char>& pos) {
  double hits = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (pos[i] && !pos[j]) {
        pairs += 1;
        hits += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return hits / pairs;
}

// Densest subgraph over every subset of users and objects.
double brute_force_density(const BipartiteGraph& g) {
  const std::size_t nu = g.num_users(), n = nu + g.num_objects();
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double events = 0;
    for (PairId p = 0; p < g.num_pairs(); ++p)
      if ((mask >> g.pair_user(p) & 1) && (mask >> (nu + g.pair_object(p)) & 1)) events += g.multiplicity(p);
    best = std::max(best, events / std::popcount(mask));
  }
  return best;
}

double block_density(const BipartiteGraph& g, const DenseBlock& b) {
  std::vector<char> in_u(g.num_users(), 0), in_v(g.num_objects(), 0);
  for (UserId u : b.users) in_u[u] = 1;
  for (ObjectId v : b.objects) in_v[v] = 1;
  double events = 0;
  for (PairId p = 0; p < g.num_pairs(); ++p)
    if (in_u[g.pair_user(p)] && in_v[g.pair_object(p)]) events += g.multiplicity(p);
  return events / static_cast<double>(b.users.size() + b.objects.size());
}

}  // namespace

TEST_CASE("f-measure") {
  std::vector<std::uint32_t> truth{1, 2, 3};
  auto same = f_measure(truth, truth);
  CHECK(same.f1 == 1.0);
  std::vector<std::uint32_t> other{7, 8};
  CHECK(f_measure(other, truth).f1 == 0.0);
  CHECK(f_measure(std::vector<std::uint32_t>{}, truth).precision == 0.0);

  std::vector<std::uint32_t> t200(200), p100(100);
  for (std::uint32_t i = 0; i < 200; ++i) t200[i] = i;
  for (std::uint32_t i = 0; i < 100; ++i) p100[i] = 2 * i;
  auto pr = f_measure(p100, t200);
  CHECK(pr.precision == 1.0);
  CHECK(pr.recall == 0.5);
  CHECK(pr.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(f_measure(t200, p100).f1 == doctest::Approx(2.0 / 3.0));  // symmetric

  std::vector<std::uint32_t> dup{1, 1, 2};
  CHECK(f_measure(dup, truth).precision == 1.0);
  CHECK_THROWS_AS(f_measure(truth, std::vector<std::uint32_t>{}), DataError);
}

TEST_CASE("AUC against the pair-count oracle") {
  std::vector<double> s{0.9, 0.4, 0.4, 0.7, 0.1, 0.3};
  std::vector<char> pos{1, 1, 0, 0, 0, 1};
  CHECK(roc_auc(s, pos) == doctest::Approx(pair_count_auc(s, pos)).epsilon(1e-12));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> sc(n);
    std::vector<char> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      sc[i] = static_cast<double>(rng() % 6);  // coarse scores force ties
      lab[i] = static_cast<char>(i < 1 ? 1 : i < 2 ? 0 : rng() % 2);
    }
    const double a = roc_auc(sc, lab);
    CHECK(a == doctest::Approx(pair_count_auc(sc, lab)).epsilon(1e-12));
    std::vector<double> warped(n);
    for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3.0 * sc[i]) - 7.0;
    CHECK(roc_auc(warped, lab) == doctest::Approx(a).epsilon(1e-12));
  }

  std::vector<double> sep{5, 6, 1, 2};
  std::vector<char> sep_lab{1, 1, 0, 0};
  CHECK(roc_auc(sep, sep_lab) == 1.0);

  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> noise(20000);
  std::vector<char> coin(20000);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    noise[i] = u(rng);
    coin[i] = static_cast<char>(rng() % 2);
  }
  CHECK(std::abs(roc_auc(noise, coin) - 0.5) <= 0.02);

  std::vector<char> one_class{1, 1, 1, 1};
  CHECK_THROWS_AS(roc_auc(sep, one_class), DataError);
}

TEST_CASE("accuracy curves") {
  std::vector<CurvePoint> perfect;
  for (int i = 1; i <= 100; ++i) perfect.push_back({i / 100.0, 1.0});
  auto c = make_curve(perfect);
  CHECK(std::abs(c.area - 0.995) <= 1e-9);
  CHECK(*lowest_detection_density(c) == 0.01);

  std::vector<CurvePoint> never{{0.01, 0.0}, {0.5, 0.0}, {1.0, 0.0}};
  auto n = make_curve(never);
  CHECK(n.area == 0.0);
  CHECK_FALSE(lowest_detection_density(n).has_value());

  // an absent point is skipped in the integral
  std::vector<CurvePoint> gap{{0.5, 1.0}, {0.25, std::nullopt}, {1.0, 1.0}};
  CHECK(make_curve(gap).area == doctest::Approx(0.75));

  std::vector<CurvePoint> repeated{{0.5, 1.0}, {0.5, 0.5}};
  CHECK_THROWS_AS(make_curve(repeated), DataError);
  std::vector<CurvePoint> out_of_range{{0.5, 1.5}};
  CHECK_THROWS_AS(make_curve(out_of_range), DataError);
}

TEST_CASE("average-degree baseline") {
  SUBCASE("complete block plus isolated nodes") {
    std::vector<EdgeRecord> r;
    for (const char* u : {"a", "b", "c"})
      for (const char* v : {"x", "y", "z"}) r.push_back(edge(u, v));
    r.push_back(edge("d", "w"));
    auto g = BipartiteGraph::ingest(r, {}, std::vector<std::string>{"lonely"});
    auto b = avg_degree_baseline(g);
    CHECK(b.users.size() == 3);
    CHECK(b.objects.size() == 3);
    CHECK(b.density == doctest::Approx(1.5));
  }
  SUBCASE("single edge") {
    std::vector<EdgeRecord> r{edge("a", "x")};
    auto g = BipartiteGraph::ingest(r, {});
    auto b = avg_degree_baseline(g);
    CHECK(b.users == std::vector<UserId>{0});
    CHECK(b.objects == std::vector<ObjectId>{0});
    CHECK(b.density == 0.5);
  }
  SUBCASE("ten-node fixture matches brute force") {
    std::vector<EdgeRecord> r;
    for (const char* u : {"a", "b", "c", "d"})
      for (const char* v : {"x", "y", "z"}) r.push_back(edge(u, v));
    r.push_back(edge("e", "x"));
    r.push_back(edge("e", "w"));
    r.push_back(edge("f", "w"));
    r.push_back(edge("a", "w"));
    auto g = BipartiteGraph::ingest(r, {});
    REQUIRE(g.num_users() + g.num_objects() == 10);
    auto b = avg_degree_baseline(g);
    CHECK(b.density == doctest::Approx(brute_force_density(g)));
    CHECK(b.density == doctest::Approx(block_density(g, b)));
  }
  SUBCASE("random small graphs stay within the peeling factor of two") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      auto g = fixtures::random_graph(6, 6, 14, seed, false);
      auto b = avg_degree_baseline(g);
      const double best = brute_force_density(g);
      CHECK(b.density <= best + 1e-12);
      CHECK(b.density >= best / 2.0 - 1e-12);
      CHECK(b.density == doctest::Approx(block_density(g, b)));
    }
  }
}

TEST_CASE("density sweep") {
  BackgroundConfig bg;
  bg.n_users = 1500;
  bg.n_objects = 800;
  bg.density = 0.004;
  auto base = gen_background(bg);
  SweepConfig sc;
  sc.densities = {1.0, 0.5};
  sc.injection.n_objects = 30;
  sc.injection.ratings_per_object = 30;
  sc.injection.max_target_indegree = 20;

  DetectConfig dc;
  dc.num_seeds = 3;
  auto a = density_sweep(base, sc, holoscope_detector(dc));
  auto b = density_sweep(base, sc, holoscope_detector(dc));
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.points[i].n_fraudsters == (i == 0 ? 30 : 60));
    CHECK(a.points[i].user_f1 == b.points[i].user_f1);
    CHECK(a.points[i].sink_auc == b.points[i].sink_auc);
  }
  CHECK(*a.points[0].user_f1 >= 0.9);

  auto never = density_sweep(base, sc, [](const BipartiteGraph& g) {
    SweepDetection d;
    d.sink_scores.assign(g.num_objects(), 0.0);
    return d;
  });
  CHECK(never.users.area == 0.0);
  CHECK_FALSE(never.users_lowest.has_value());
  CHECK(*never.points[0].sink_auc == 0.5);

  auto failing = density_sweep(base, sc, [](const BipartiteGraph&) -> SweepDetection { throw DataError("boom"); });
  CHECK_FALSE(failing.points[0].user_f1.has_value());
  CHECK(failing.points[0].error == "boom");
  CHECK(failing.users.area == 0.0);

  sc.densities.clear();
  CHECK_THROWS_AS(density_sweep(base, sc, baseline_detector()), ConfigError);
  sc.densities = {1.5};
  CHECK_THROWS_AS(density_sweep(base, sc, baseline_detector()), ConfigError);
}
