#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "holoscope/error.hpp"
#include "holoscope/temporal.hpp"

using namespace holoscope;

namespace {

TimeSeriesHist series(std::vector<double> counts, double width = 1.0) {
  return TimeSeriesHist::from_centers(0.0, width, std::move(counts));
}

double distance_to_line(double x0, double y0, double x1, double y1, double x, double y) {
  return std::abs((y1 - y0) * (x - x0) - (x1 - x0) * (y - y0)) / std::hypot(y1 - y0, x1 - x0);
}

// Linear-interpolation quantile, as numpy's default.
double quantile(const std::vector<Timestamp>& s, double q) {
  const double h = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return static_cast<double>(s[lo]) + (h - static_cast<double>(lo)) * static_cast<double>(s[hi] - s[lo]);
}

}  // namespace

TEST_CASE("histogram bin count follows the finer of two rules") {
  std::vector<Timestamp> uniform(1024);
  for (std::size_t i = 0; i < uniform.size(); ++i) uniform[i] = static_cast<Timestamp>(i);
  const auto bins = histogram_bins(uniform);
  CHECK(bins.sturges == 11);
  CHECK(bins.chosen >= 11);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> a(1e6, 5e3), b(1.2e6, 2e4);
  std::vector<Timestamp> mix;
  for (int i = 0; i < 10000; ++i) mix.push_back(static_cast<Timestamp>(i % 2 ? a(rng) : b(rng)));
  std::sort(mix.begin(), mix.end());
  const double n = static_cast<double>(mix.size());
  const auto sturges = static_cast<std::size_t>(std::ceil(std::log2(n)) + 1);
  const double width = 2.0 * (quantile(mix, 0.75) - quantile(mix, 0.25)) / std::cbrt(n);
  const auto fd = static_cast<std::size_t>(std::ceil(static_cast<double>(mix.back() - mix.front()) / width));
  CHECK(histogram_bins(mix).chosen == std::max(sturges, fd));

  auto h = build_histogram(mix);
  CHECK(h.size() == std::max(sturges, fd));
  CHECK(h.total() == doctest::Approx(n));
  CHECK(h.bin_width() == doctest::Approx(static_cast<double>(mix.back() - mix.front()) / static_cast<double>(h.size())));
}

TEST_CASE("degenerate histograms") {
  std::vector<Timestamp> one{42};
  auto h = build_histogram(one);
  CHECK(h.size() == 1);
  CHECK(h.count(0) == 1.0);
  CHECK(h.bin_width() == 1.0);
  CHECK(h.center(0) == 42.0);
  std::vector<Timestamp> same{7, 7, 7};
  CHECK(build_histogram(same).count(0) == 3.0);
  CHECK_THROWS_AS(build_histogram(std::vector<Timestamp>{}), DataError);
  CHECK_THROWS_AS(build_histogram(std::vector<Timestamp>{3, 1}), DataError);
}

TEST_CASE("awakening point maximizes distance to the start-peak line") {
  auto h = series({0, 0, 0, 10});
  CHECK(distance_to_line(0, 0, 3, 10, 1, 0) == doctest::Approx(0.958).epsilon(1e-3));
  CHECK(distance_to_line(0, 0, 3, 10, 2, 0) == doctest::Approx(1.916).epsilon(1e-3));
  CHECK(awakening_point(h, 0, 3) == std::size_t{2});

  auto ramp = series({0, 1, 2, 3, 4, 5});
  CHECK(awakening_point(ramp, 0, 5) == std::size_t{1});

  CHECK_THROWS_WITH_AS(awakening_point(h, 0, 1), "window too short", DataError);
  CHECK_FALSE(awakening_point(series({9, 1, 1, 1}), 0, 3).has_value());
}

TEST_CASE("awakening point agrees with a direct distance scan") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(3 + rng() % 20);
    for (auto& x : c) x = static_cast<double>(rng() % 50);
    auto h = series(c, 60.0);
    const std::size_t m = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
    const auto a = awakening_point(h, 0, c.size() - 1);
    if (m == 0) {
      CHECK_FALSE(a.has_value());
      continue;
    }
    REQUIRE(a.has_value());
    double best = -1.0;
    for (std::size_t k = 1; k < m; ++k)
      best = std::max(best, distance_to_line(0, c[0], m * 60.0, c[m], k * 60.0, c[k]));
    if (m >= 2) CHECK(distance_to_line(0, c[0], m * 60.0, c[m], *a * 60.0, c[*a]) == doctest::Approx(best));
  }
}

TEST_CASE("multiburst on simple shapes") {
  CHECK(multiburst(series({4, 4, 4, 4, 4, 4})).empty());

  auto spike = series({1, 1, 2, 1, 30, 2, 1, 1});
  auto one = multiburst(spike);
  REQUIRE(one.size() == 1);
  CHECK(one[0].burst_index == 4);
  CHECK(one[0].awakening_index == 3);
  CHECK(one[0].altitude == 29.0);
  CHECK(one[0].slope == doctest::Approx(29.0));

  // altitudes 100 and 30: the smaller one is below half of the larger
  auto two = series({0, 100, 0, 0, 0, 30, 0, 0});
  CHECK(multiburst_unfiltered(two).size() == 2);
  auto kept = multiburst(two);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].burst_index == 1);
  CHECK(kept[0].altitude == 100.0);
}

TEST_CASE("burst pairs are well formed and disjoint") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> c(3 + rng() % 40);
    for (auto& x : c) x = static_cast<double>(rng() % 30);
    auto pairs = multiburst(series(c, 10.0), 0.0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      CHECK(p.awakening.t < p.burst.t);
      CHECK(p.altitude == doctest::Approx(p.burst.c - p.awakening.c));
      CHECK(p.altitude > 0.0);
      CHECK(p.slope == doctest::Approx(p.altitude / (p.burst.t - p.awakening.t)));
      if (i > 0) CHECK(pairs[i - 1].burst_index < p.awakening_index);
    }
  }
}

TEST_CASE("maximal drop") {
  CHECK_FALSE(max_drop(series({0, 1, 2, 3, 3, 3})).has_value());

  auto spike = series({2, 3, 100, 5, 4, 4, 4, 4}, 3600.0);
  auto d = max_drop(spike);
  REQUIRE(d.has_value());
  CHECK(d->burst_index == 2);
  CHECK(d->dying_index == 3);
  CHECK(d->fall == 95.0);
  CHECK(d->slope == doctest::Approx(95.0 / 3600.0));

  auto two = series({0, 90, 10, 10, 10, 70, 10, 10, 10, 10});
  auto best = max_drop(two);
  REQUIRE(best.has_value());
  CHECK(best->fall == 80.0);
  CHECK(best->burst_index == 1);
}

TEST_CASE("drop edge weight") {
  CHECK(drop_edge_weight(std::nullopt) == 0.0);
  DropInfo unit;
  unit.fall = 2.0;
  unit.slope = 0.5;
  CHECK(drop_edge_weight(unit) == doctest::Approx(1.0));
  DropInfo hour;
  hour.fall = 95.0;
  hour.slope = 95.0 / 3600.0;
  CHECK(drop_edge_weight(hour) == doctest::Approx(std::log2(1.0 + 95.0 * 95.0 / 3600.0)));
  CHECK(drop_edge_weight(hour) == doctest::Approx(1.810).epsilon(1e-3));
}

TEST_CASE("phi involvement") {
  // quiet background, then a burst of 40 events in one hour
  std::vector<Timestamp> all;
  for (int i = 0; i < 20; ++i) all.push_back(i * 3600);
  for (int i = 0; i < 40; ++i) all.push_back(20 * 3600 + i * 90);
  for (int i = 0; i < 20; ++i) all.push_back(22 * 3600 + i * 3600);
  std::sort(all.begin(), all.end());
  auto profile = build_spike_profile(all);
  REQUIRE_FALSE(profile.pairs.empty());

  CHECK(phi_involvement(profile, all, all) == doctest::Approx(1.0));

  std::vector<Timestamp> outside{all.front(), all.back()};
  CHECK(phi_involvement(profile, outside, all) == 0.0);

  std::vector<Timestamp> in_window;
  for (Timestamp t : all)
    if (profile.burst_weight(t) > 0.0) in_window.push_back(t);
  // half of the in-window events, one per bin where possible
  std::vector<Timestamp> half;
  for (std::size_t i = 0; i < in_window.size(); i += 2) half.push_back(in_window[i]);
  double direct = 0.0, total = 0.0;
  for (Timestamp t : half) direct += profile.burst_weight(t);
  for (Timestamp t : in_window) total += profile.burst_weight(t);
  CHECK(phi_involvement(profile, half, all) == doctest::Approx(direct / total));

  std::vector<Timestamp> foreign{5};
  CHECK_THROWS_WITH_AS(phi_involvement(profile, foreign, all), "inconsistent timestamp sets", DataError);

  std::vector<Timestamp> few{1, 2};
  auto empty = build_spike_profile(few);
  CHECK(empty.pairs.empty());
  CHECK(phi_involvement(empty, few, few) == 0.0);
}

TEST_CASE("phi is monotone in the timestamp set") {
  std::mt19937_64 rng(12);
  std::vector<Timestamp> all;
  std::uniform_int_distribution<Timestamp> t(0, 100000), burst(50000, 52000);
  for (int i = 0; i < 200; ++i) all.push_back(t(rng));
  for (int i = 0; i < 150; ++i) all.push_back(burst(rng));
  std::sort(all.begin(), all.end());
  auto profile = build_spike_profile(all);
  std::vector<Timestamp> grow;
  double last = 0.0;
  for (Timestamp x : all) {
    grow.push_back(x);
    const double phi = phi_involvement(profile, grow, all);
    CHECK(phi >= last - 1e-12);
    CHECK(phi <= 1.0 + 1e-12);
    last = phi;
  }
  CHECK(last == doctest::Approx(1.0));
}

TEST_CASE("profiles are invariant under time shifts") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<Timestamp> t(0, 500000), burst(200000, 203000);
  std::vector<Timestamp> all;
  for (int i = 0; i < 300; ++i) all.push_back(t(rng));
  for (int i = 0; i < 100; ++i) all.push_back(burst(rng));
  std::sort(all.begin(), all.end());
  std::vector<Timestamp> shifted = all;
  for (auto& x : shifted) x += 1'300'000'000;
  auto a = build_spike_profile(all), b = build_spike_profile(shifted);
  CHECK(a.hist.counts() == b.hist.counts());
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].altitude == b.pairs[i].altitude);
    CHECK(a.pairs[i].slope == doctest::Approx(b.pairs[i].slope));
  }
  CHECK(drop_edge_weight(a.drop) == doctest::Approx(drop_edge_weight(b.drop)));
  std::vector<Timestamp> sub(all.begin(), all.begin() + 150), sub_shifted(shifted.begin(), shifted.begin() + 150);
  CHECK(phi_involvement(a, sub, all) == doctest::Approx(phi_involvement(b, sub_shifted, shifted)));
}

TEST_CASE("time obstruction bound") {
  auto b = time_obstruction_bound(200, 1, 10, 10);
  CHECK(b.min_duration == doctest::Approx(std::sqrt(80.0)));
  CHECK(b.min_duration == doctest::Approx(8.944).epsilon(1e-4));
  auto sym = time_obstruction_bound(500, 60, 0.3, 0.3);
  CHECK(sym.min_duration == doctest::Approx(2.0 * std::sqrt(500.0 * 60.0 / 0.3)));
  // at the bound a triangle of N events has height exactly c_min
  CHECK(2.0 * 500.0 * 60.0 / sym.min_duration == doctest::Approx(sym.min_height));
  CHECK_THROWS_AS(time_obstruction_bound(0, 1, 1, 1), ConfigError);
  CHECK_THROWS_AS(time_obstruction_bound(1, 1, -1, 1), ConfigError);
}

TEST_CASE("attacks faster than the bound show a steep rise or fall") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double n = 100 + 2000 * u(rng), dt = 60 + 3000 * u(rng);
    const double s1 = (0.5 + 5 * u(rng)) / dt, s2 = (0.5 + 5 * u(rng)) / dt;
    const auto bound = time_obstruction_bound(n, dt, s1, s2);
    const double tau = bound.min_duration * (0.3 + 0.69 * u(rng));
    const double rise = tau * (0.05 + 0.9 * u(rng));
    auto counts = fixtures::triangle_attack(n, dt, rise, tau - rise, dt * (1.0 + u(rng)));
    const auto [r, f] = fixtures::adjacent_slopes(counts, dt);
    CHECK((r > s1 || f > s2));
  }
}
