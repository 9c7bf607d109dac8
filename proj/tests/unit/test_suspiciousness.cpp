#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "holoscope/error.hpp"
#include "holoscope/suspiciousness.hpp"
#include "oracle.hpp"

using namespace holoscope;
using fixtures::edge;
using fixtures::event;

TEST_CASE("alpha, scaling and contrast arithmetic") {
  CHECK(alpha(6, 6) == 1.0);
  CHECK(alpha(0, 6) == 0.0);
  CHECK(alpha(3, 6) == 0.5);
  CHECK_THROWS_WITH_AS(alpha(1, 0), "isolated sink", DataError);

  CHECK(q_scale(1, 32) == 1.0);
  CHECK(q_scale(0, 32) == doctest::Approx(0.03125));
  CHECK(q_scale(0.5, 32) == doctest::Approx(0.17678).epsilon(1e-4));
  CHECK_THROWS_AS(q_scale(0.5, 1.0), ConfigError);

  CHECK(contrast(1, 1, 1, 32) == 1.0);
  CHECK(contrast(0, 0, 0, 32) == doctest::Approx(1.0 / 32768));
  CHECK(contrast(1, 0.5, 0, 32) == doctest::Approx(0.005524).epsilon(1e-3));
}

TEST_CASE("contrast is strictly increasing in every exponent for any base") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1), b(1.01, 1000);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), p = u(rng), k = u(rng), base = b(rng), step = 0.01 + 0.1 * u(rng);
    CHECK(contrast(a + step, p, k, base) > contrast(a, p, k, base));
    CHECK(contrast(a, p + step, k, base) > contrast(a, p, k, base));
    CHECK(contrast(a, p, k + step, base) > contrast(a, p, k, base));
    // order of two exponent sums does not depend on the base
    const double x = u(rng) * 3, y = u(rng) * 3, other = b(rng);
    if (x != y) CHECK(((std::pow(base, x - 3) > std::pow(base, y - 3)) == (std::pow(other, x - 3) > std::pow(other, y - 3))));
  }
}

TEST_CASE("smoothed KL and balance factor") {
  std::vector<double> same{3, 1, 0, 2};
  CHECK(smoothed_kl(same, same, 1e-3) == doctest::Approx(0.0));
  std::vector<double> none{0, 0, 0, 0};
  CHECK(smoothed_kl(same, none, 1e-3) == 0.0);

  // 20 top ratings against 20 bottom ratings over 8 counted categories
  std::vector<double> top(8, 0.0), bottom(8, 0.0);
  top[7] = 20;
  bottom[0] = 20;
  const double eps = 1e-3, z = 20 + 8 * eps;
  double direct = 0.0;
  for (int c = 0; c < 8; ++c) {
    const double p = (top[c] + eps) / z, q = (bottom[c] + eps) / z;
    direct += p * std::log(p / q);
  }
  CHECK(smoothed_kl(top, bottom, eps) == doctest::Approx(direct).epsilon(1e-12));

  CHECK(balance_factor(2, 8) == 0.25);
  CHECK(balance_factor(8, 2) == 0.25);
  CHECK(balance_factor(5, 0) == 0.0);
}

TEST_CASE("HS objective") {
  std::vector<double> f{1}, p{1};
  CHECK(hs_objective(f, p, 1) == 0.5);
  // all P = 1 reduces to edges / (|A| + |B|)
  std::vector<double> f2{3, 2, 4}, ones{1, 1, 1};
  CHECK(hs_objective(f2, ones, 2) == doctest::Approx(9.0 / 5.0));
  CHECK_THROWS_WITH_AS(hs_objective(f, p, 0), "empty set", DataError);
}

TEST_CASE("signal tables honour available attributes") {
  std::vector<EdgeRecord> plain{edge("a", "x"), edge("b", "x")};
  auto g = BipartiteGraph::ingest(plain, {});
  CHECK_THROWS_WITH_AS(SignalTables(g, {}), "signal phi requires timestamps", DataError);
  auto cfg = SignalTables::available_signals(g);
  CHECK_FALSE(cfg.use_phi);
  CHECK_FALSE(cfg.use_kappa);
  SignalTables t(g, cfg);
  CHECK_FALSE(t.phi_active());

  SignalConfig bad = cfg;
  bad.base = 1.0;
  CHECK_THROWS_AS(SignalTables(g, bad), ConfigError);

  std::vector<EdgeRecord> rated{event("a", "x", 1, 5)};
  auto gr = BipartiteGraph::ingest(rated, {});
  SignalConfig off_scale;
  off_scale.neutral = std::vector<RatingCategory>{9};
  CHECK_THROWS_AS(SignalTables(gr, off_scale), ConfigError);
}

TEST_CASE("timestamp-free data gives P = b^(alpha - 1)") {
  auto g = fixtures::random_graph(15, 10, 80, 3, false);
  SignalTables t(g, SignalTables::available_signals(g));
  std::vector<UserId> seed{0, 1, 2, 3, 4, 5};
  ContrastState st(t, seed);
  for (ObjectId v : st.sinks()) {
    const double a = engagement(g, seed, v) / g.object_weight(v);
    CHECK(st.alpha(v) == doctest::Approx(a));
    CHECK(st.contrast(v) == doctest::Approx(std::pow(32.0, a - 1.0)));
  }
}

TEST_CASE("kappa against a direct-sum oracle") {
  // sink x: A gives only 5 stars, the rest only 1 star; sink y is mixed evenly
  std::vector<EdgeRecord> r;
  for (int i = 0; i < 20; ++i) {
    r.push_back(event("a" + std::to_string(i), "x", 100 + i, 5));
    r.push_back(event("b" + std::to_string(i), "x", 200 + i, 1));
    r.push_back(event("a" + std::to_string(i), "y", 300 + i, i % 2 ? 5 : 1));
    r.push_back(event("b" + std::to_string(i), "y", 400 + i, i % 2 ? 5 : 1));
  }
  auto g = BipartiteGraph::ingest(r, RatingScale::parse("0.5:5:0.5"));
  SignalConfig cfg;
  cfg.use_phi = false;
  SignalTables t(g, cfg);
  std::vector<UserId> a;
  for (int i = 0; i < 20; ++i) a.push_back(*g.find_user("a" + std::to_string(i)));
  auto kappa = kappa_values(t, a);
  CHECK(kappa[*g.find_object("x")] == 1.0);
  CHECK(kappa[*g.find_object("y")] == doctest::Approx(0.0).epsilon(1e-12));

  // raw value: 8 counted categories after dropping the two neutral ones
  CHECK(t.categories() == 8);
  CHECK(t.slot(4) == -1);
  CHECK(t.slot(5) == -1);
  CHECK(t.slot(9) == 7);
  std::vector<double> all_a(8, 0), all_b(8, 0);
  all_a[7] = 20;
  all_b[1] = 20;
  ContrastState st(t, a);
  CHECK(st.kappa(*g.find_object("x")) == 1.0);
  CHECK(st.kappa_scale() == doctest::Approx(oracle::kl(all_a, all_b, 1e-3)));

  // no users outside A on a sink: balance factor 0
  std::vector<UserId> everyone(g.num_users());
  for (UserId u = 0; u < g.num_users(); ++u) everyone[u] = u;
  for (double k : kappa_values(t, everyone)) CHECK(k == 0.0);
}

TEST_CASE("user scores") {
  std::vector<EdgeRecord> r{edge("a", "x"), edge("a", "y"), edge("a", "y"), edge("b", "x")};
  auto g = BipartiteGraph::ingest(r, {});
  SignalTables t(g, SignalTables::available_signals(g));
  std::vector<UserId> all{0, 1};
  ContrastState st(t, all);
  // every sink fully covered: P = 1, score = weighted outdegree
  CHECK(st.score(*g.find_user("a")) == 3.0);
  CHECK(st.score(*g.find_user("b")) == 1.0);
  CHECK(st.objective() == doctest::Approx(4.0 / 4.0));

  // a user whose sinks all sit at alpha = 0 scores degree / b
  std::vector<EdgeRecord> r2{edge("a", "x"), edge("b", "y"), edge("b", "z"), edge("c", "y"), edge("c", "z")};
  auto g2 = BipartiteGraph::ingest(r2, {});
  SignalTables t2(g2, SignalTables::available_signals(g2));
  std::vector<UserId> seed{*g2.find_user("a"), *g2.find_user("b"), *g2.find_user("c")};
  ContrastState s2(t2, seed);
  s2.remove_user(*g2.find_user("c"));
  s2.remove_user(*g2.find_user("a"));
  CHECK(s2.contrast(*g2.find_object("x")) == doctest::Approx(1.0 / 32));
  CHECK(s2.score(*g2.find_user("b")) == doctest::Approx(2.0 * std::pow(32.0, 0.5 - 1.0)));
}

TEST_CASE("removal boundaries") {
  std::vector<EdgeRecord> r{edge("a", "x"), edge("b", "y"), edge("c", "x")};
  auto g = BipartiteGraph::ingest(r, {});
  SignalTables t(g, SignalTables::available_signals(g));
  const UserId a = *g.find_user("a"), b = *g.find_user("b"), c = *g.find_user("c");
  std::vector<UserId> seed{a, b, c};
  ContrastState st(t, seed);
  const double px = st.contrast(*g.find_object("x"));
  st.remove_user(b);  // shares no sink with the others
  CHECK(st.contrast(*g.find_object("x")) == px);
  CHECK_THROWS_AS(st.remove_user(b), DataError);
  st.remove_user(a);
  st.remove_user(c);
  CHECK(st.size() == 0);
  CHECK_THROWS_WITH_AS(st.objective(), "empty set", DataError);
  CHECK_THROWS_WITH_AS(ContrastState(t, std::vector<UserId>{}), "empty seed", DataError);
}

TEST_CASE("incremental state matches a from-scratch rebuild") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto g = fixtures::random_graph(50, 40, 600, seed);
    for (auto scaling : {KappaScaling::evolving, KappaScaling::initial}) {
      SignalConfig cfg;
      cfg.kappa_scaling = scaling;
      SignalTables t(g, cfg);
      std::vector<UserId> users(g.num_users());
      for (UserId u = 0; u < g.num_users(); ++u) users[u] = u;
      ContrastState st(t, users);
      const double pinned = st.kappa_scale();
      std::vector<UserId> order = users;
      std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
      for (std::size_t step = 0; step < 10; ++step) {
        st.remove_user(order[step]);
        const auto live = st.members();
        const auto ref =
            oracle::evaluate(g, cfg, users, live, scaling == KappaScaling::initial ? pinned : -1.0);
        double worst = oracle::rel_err(st.objective(), ref.hs);
        for (ObjectId v : st.sinks()) {
          worst = std::max(worst, oracle::rel_err(st.engagement(v), ref.fa.at(v)));
          worst = std::max(worst, oracle::rel_err(st.contrast(v), ref.p.at(v)));
        }
        for (UserId u : live) worst = std::max(worst, oracle::rel_err(st.score(u), ref.score.at(u)));
        CHECK(worst <= 1e-9);
      }
    }
  }
}
