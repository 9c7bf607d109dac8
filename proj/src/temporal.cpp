#include "holoscope/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "holoscope/error.hpp"

namespace holoscope {

TimeSeriesHist::TimeSeriesHist(double origin, double bin_width, std::vector<double> counts)
    : origin_(origin), bin_width_(bin_width), counts_(std::move(counts)) {
  if (!(bin_width_ > 0.0)) throw DataError("bin width must be positive");
}

TimeSeriesHist TimeSeriesHist::from_centers(double first_center, double bin_width, std::vector<double> counts) {
  return TimeSeriesHist(first_center - 0.5 * bin_width, bin_width, std::move(counts));
}

double TimeSeriesHist::total() const {
  double s = 0.0;
  for (double c : counts_) s += c;
  return s;
}

std::size_t TimeSeriesHist::bin_of(double t) const {
  const double pos = std::floor((t - origin_) / bin_width_);
  if (pos <= 0.0) return 0;
  const auto idx = static_cast<std::size_t>(pos);
  return std::min(idx, counts_.size() - 1);
}

namespace {

double quantile(std::span<const Timestamp> sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return static_cast<double>(sorted[lo]) + frac * static_cast<double>(sorted[hi] - sorted[lo]);
}

// Perpendicular distance from (x, c) to the line through (0, c0) and (x1, c1).
// x is measured from the window start so large epoch offsets never enter.
double line_distance(double x, double c, double c0, double x1, double c1) {
  const double dc = c1 - c0;
  return std::abs(dc * x - x1 * (c - c0)) / std::sqrt(dc * dc + x1 * x1);
}

bool clearly_greater(double a, double b) { return a > b + 1e-9 * (1.0 + std::abs(b)); }

}  // namespace

BinCounts histogram_bins(std::span<const Timestamp> sorted, double max_bins_per_event) {
  if (sorted.empty()) throw DataError("empty timestamp list");
  BinCounts out;
  const double n = static_cast<double>(sorted.size());
  out.sturges = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
  const double range = static_cast<double>(sorted.back() - sorted.front());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  if (iqr > 0.0 && range > 0.0) {
    const double width = 2.0 * iqr * std::pow(n, -1.0 / 3.0);
    double k = std::ceil(range / width);
    k = std::min(k, std::ceil(max_bins_per_event * n));
    out.freedman_diaconis = static_cast<std::size_t>(k);
  }
  out.chosen = std::max(out.sturges, out.freedman_diaconis);
  return out;
}

TimeSeriesHist build_histogram(std::span<const Timestamp> sorted) {
  if (sorted.empty()) throw DataError("cannot build a histogram from no timestamps");
  if (!std::is_sorted(sorted.begin(), sorted.end())) throw DataError("timestamps must be sorted");
  if (sorted.front() == sorted.back())
    return TimeSeriesHist(static_cast<double>(sorted.front()) - 0.5, 1.0, {static_cast<double>(sorted.size())});

  const std::size_t k = histogram_bins(sorted, 1.0).chosen;
  const double range = static_cast<double>(sorted.back() - sorted.front());
  TimeSeriesHist shape(static_cast<double>(sorted.front()), range / static_cast<double>(k), std::vector<double>(k, 0.0));
  std::vector<double> counts(k, 0.0);
  for (Timestamp t : sorted) counts[shape.bin_of(static_cast<double>(t))] += 1.0;
  return TimeSeriesHist(shape.origin(), shape.bin_width(), std::move(counts));
}

std::size_t peak_index(const TimeSeriesHist& h, std::size_t begin, std::size_t end) {
  std::size_t best = begin;
  for (std::size_t k = begin + 1; k <= end; ++k)
    if (h.count(k) > h.count(best)) best = k;
  return best;
}

std::optional<std::size_t> awakening_point(const TimeSeriesHist& h, std::size_t begin, std::size_t end) {
  if (end >= h.size() || end < begin || end - begin < 2) throw DataError("window too short");
  const std::size_t m = peak_index(h, begin, end);
  if (m == begin) return std::nullopt;
  if (m == begin + 1) return begin;
  const double w = h.bin_width();
  const double c0 = h.count(begin);
  const double x1 = static_cast<double>(m - begin) * w;
  const double c1 = h.count(m);
  std::size_t best = begin + 1;
  double best_dist = line_distance(w, h.count(best), c0, x1, c1);
  for (std::size_t k = begin + 2; k < m; ++k) {
    const double d = line_distance(static_cast<double>(k - begin) * w, h.count(k), c0, x1, c1);
    if (clearly_greater(d, best_dist)) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

std::optional<std::size_t> dying_point(const TimeSeriesHist& h, std::size_t peak, std::size_t end) {
  if (end >= h.size() || end < peak) throw DataError("invalid drop window");
  if (end == peak) return std::nullopt;
  if (end == peak + 1) return end;
  const double w = h.bin_width();
  const double c0 = h.count(peak);
  const double x1 = static_cast<double>(end - peak) * w;
  const double c1 = h.count(end);
  std::size_t best = peak + 1;
  double best_dist = line_distance(w, h.count(best), c0, x1, c1);
  for (std::size_t k = peak + 2; k < end; ++k) {
    const double d = line_distance(static_cast<double>(k - peak) * w, h.count(k), c0, x1, c1);
    if (clearly_greater(d, best_dist)) {
      best = k;
      best_dist = d;
    }
  }
  return best;
}

std::vector<BurstPair> multiburst_unfiltered(const TimeSeriesHist& h) {
  std::vector<BurstPair> out;
  struct Window {
    std::size_t begin, end;
  };
  std::vector<Window> stack;
  if (h.size() >= 3) stack.push_back({0, h.size() - 1});
  while (!stack.empty()) {
    const Window win = stack.back();
    stack.pop_back();
    if (win.end < win.begin + 2) continue;
    const std::size_t m = peak_index(h, win.begin, win.end);
    const auto a = awakening_point(h, win.begin, win.end);

    // First local minimum after the peak; a plateau counts at its left edge.
    std::size_t k = win.end;
    for (std::size_t q = m + 1; q < win.end; ++q) {
      if (h.count(q) <= h.count(q + 1)) {
        k = q;
        break;
      }
    }
    // Right window is pushed first so the left one is explored first.
    if (m < win.end) stack.push_back({k, win.end});
    if (a) {
      if (h.count(m) > h.count(*a)) {
        BurstPair p;
        p.awakening_index = *a;
        p.burst_index = m;
        p.awakening = h.point(*a);
        p.burst = h.point(m);
        p.altitude = h.count(m) - h.count(*a);
        p.slope = p.altitude / (static_cast<double>(m - *a) * h.bin_width());
        out.push_back(p);
      }
      if (*a > win.begin) stack.push_back({win.begin, *a - 1});
    }
  }
  return out;
}

std::vector<BurstPair> multiburst(const TimeSeriesHist& h, double keep_fraction) {
  auto pairs = multiburst_unfiltered(h);
  double largest = 0.0;
  for (const auto& p : pairs) largest = std::max(largest, p.altitude);
  std::vector<BurstPair> kept;
  for (const auto& p : pairs)
    if (p.altitude >= keep_fraction * largest && p.altitude > 0.0) kept.push_back(p);
  std::sort(kept.begin(), kept.end(),
            [](const BurstPair& a, const BurstPair& b) { return a.awakening_index < b.awakening_index; });
  return kept;
}

std::optional<DropInfo> max_drop(const TimeSeriesHist& h) {
  std::optional<DropInfo> best;
  struct Window {
    std::size_t begin, end;
  };
  std::vector<Window> stack;
  if (h.size() >= 3) stack.push_back({0, h.size() - 1});
  while (!stack.empty()) {
    const Window win = stack.back();
    stack.pop_back();
    if (win.end < win.begin + 2) continue;
    const std::size_t m = peak_index(h, win.begin, win.end);
    const auto d = dying_point(h, m, win.end);
    if (d) {
      const double fall = h.count(m) - h.count(*d);
      if (fall > 0.0 && (!best || fall > best->fall)) {
        DropInfo info;
        info.burst_index = m;
        info.dying_index = *d;
        info.burst = h.point(m);
        info.dying = h.point(*d);
        info.fall = fall;
        info.slope = fall / (static_cast<double>(*d - m) * h.bin_width());
        best = info;
      }
      stack.push_back({*d, win.end});
    }
    if (m > win.begin) stack.push_back({win.begin, m - 1});
  }
  return best;
}

double SpikeProfile::burst_weight(Timestamp t) const {
  if (pairs.empty()) return 0.0;
  const std::size_t b = hist.bin_of(static_cast<double>(t));
  double w = 0.0;
  for (const auto& p : pairs)
    if (p.awakening_index <= b && b <= p.burst_index) w += p.altitude * p.slope;
  return w;
}

double SpikeProfile::phi(std::span<const Timestamp> timestamps) const {
  double total = 0.0;
  for (Timestamp t : timestamps) total += burst_weight(t);
  return total;
}

SpikeProfile build_spike_profile(std::span<const Timestamp> sorted, double keep_fraction) {
  SpikeProfile profile;
  if (sorted.empty()) return profile;
  profile.hist = build_histogram(sorted);
  if (sorted.size() < 3) return profile;
  profile.pairs = multiburst(profile.hist, keep_fraction);
  profile.drop = max_drop(profile.hist);
  profile.phi_denominator = profile.phi(sorted);
  return profile;
}

double phi_involvement(const SpikeProfile& profile, std::span<const Timestamp> from_subset,
                       std::span<const Timestamp> from_all) {
  if (!std::is_sorted(from_subset.begin(), from_subset.end()) || !std::is_sorted(from_all.begin(), from_all.end()) ||
      !std::includes(from_all.begin(), from_all.end(), from_subset.begin(), from_subset.end()))
    throw DataError("inconsistent timestamp sets");
  const double denom = profile.phi(from_all);
  if (denom <= 0.0) return 0.0;
  return profile.phi(from_subset) / denom;
}

double drop_edge_weight(const std::optional<DropInfo>& drop) {
  if (!drop) return 0.0;
  return std::log2(1.0 + drop->fall * drop->slope);
}

ObstructionBound time_obstruction_bound(double events, double bin_width, double rise_slope, double decline_slope) {
  if (!(events > 0) || !(bin_width > 0) || !(rise_slope > 0) || !(decline_slope > 0))
    throw ConfigError("time obstruction bound needs positive inputs");
  const double s = rise_slope + decline_slope;
  const double p = rise_slope * decline_slope;
  return {std::sqrt(2.0 * events * bin_width * s / p), std::sqrt(2.0 * events * bin_width * p / s)};
}

}  // namespace holoscope
