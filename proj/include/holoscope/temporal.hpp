#pragma once

// Per-sink time series and spike geometry: histograms, burst (awakening ->
// burst point) extraction, the maximal drop, burst involvement and the
// drop-based column weight.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "holoscope/graph.hpp"

namespace holoscope {

struct TimePoint {
  double t = 0.0;  // bin center, seconds
  double c = 0.0;  // count
};

/// Histogram with uniform bins [origin + i*w, origin + (i+1)*w); the last bin
/// is closed on the right.
class TimeSeriesHist {
 public:
  TimeSeriesHist() = default;
  TimeSeriesHist(double origin, double bin_width, std::vector<double> counts);

  /// Series with bin centers first_center, first_center + width, ...
  static TimeSeriesHist from_centers(double first_center, double bin_width, std::vector<double> counts);

  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  double origin() const { return origin_; }
  double bin_width() const { return bin_width_; }
  double center(std::size_t i) const { return origin_ + (static_cast<double>(i) + 0.5) * bin_width_; }
  double count(std::size_t i) const { return counts_[i]; }
  TimePoint point(std::size_t i) const { return {center(i), counts_[i]}; }
  const std::vector<double>& counts() const { return counts_; }
  double total() const;
  /// Bin holding timestamp t, clamped to the first/last bin.
  std::size_t bin_of(double t) const;

 private:
  double origin_ = 0.0;
  double bin_width_ = 1.0;
  std::vector<double> counts_;
};

struct BinCounts {
  std::size_t sturges = 0;
  std::size_t freedman_diaconis = 0;  // 0 when the IQR is zero
  std::size_t chosen = 0;
};

/// Bin count for a sorted sample: the larger of Sturges and Freedman-Diaconis,
/// the latter capped at `max_bins_per_event` * n.
BinCounts histogram_bins(std::span<const Timestamp> sorted, double max_bins_per_event = 1.0);

/// Throws DataError for an empty or unsorted sample. Equal timestamps give a
/// single one-second bin centered on them.
TimeSeriesHist build_histogram(std::span<const Timestamp> sorted);

struct BurstPair {
  TimePoint awakening;
  TimePoint burst;
  std::size_t awakening_index = 0;
  std::size_t burst_index = 0;
  double slope = 0.0;     // counts per second
  double altitude = 0.0;  // c_m - c_a
};

struct DropInfo {
  TimePoint burst;
  TimePoint dying;
  std::size_t burst_index = 0;
  std::size_t dying_index = 0;
  double slope = 0.0;  // counts per second
  double fall = 0.0;   // c_m - c_d
};

/// Index of the maximum count in [begin, end], earliest on ties.
std::size_t peak_index(const TimeSeriesHist& h, std::size_t begin, std::size_t end);

/// Awakening point of the peak in [begin, end]: the point before the peak
/// farthest from the line joining (t_begin, c_begin) and the peak. Interior
/// points are preferred, earliest on ties; nullopt when the peak is the first
/// point of the window. Throws DataError("window too short") for < 3 points.
std::optional<std::size_t> awakening_point(const TimeSeriesHist& h, std::size_t begin, std::size_t end);

/// Dying point after the peak at `peak` within [peak, end]: the point farthest
/// from the line joining the peak and the window's last point.
std::optional<std::size_t> dying_point(const TimeSeriesHist& h, std::size_t peak, std::size_t end);

/// All awakening/burst pairs found by the recursive search, before filtering,
/// in discovery order.
std::vector<BurstPair> multiburst_unfiltered(const TimeSeriesHist& h);

/// Pairs whose altitude is at least `keep_fraction` of the largest one,
/// ordered by time.
std::vector<BurstPair> multiburst(const TimeSeriesHist& h, double keep_fraction = 0.5);

/// Drop with the largest fall found by the recursive burst/dying search.
std::optional<DropInfo> max_drop(const TimeSeriesHist& h);

/// Burst pairs, maximal drop and Phi(T_U) for one sink.
struct SpikeProfile {
  TimeSeriesHist hist;
  std::vector<BurstPair> pairs;
  std::optional<DropInfo> drop;
  double phi_denominator = 0.0;

  /// Sum over pairs whose [awakening, burst] bin range holds t of altitude * slope.
  double burst_weight(Timestamp t) const;
  /// Phi(T) for timestamps T of this sink.
  double phi(std::span<const Timestamp> timestamps) const;
};

/// Profile from the sorted timestamps of one sink. Fewer than 3 timestamps
/// give an empty profile (no pairs, no drop, zero denominator).
SpikeProfile build_spike_profile(std::span<const Timestamp> sorted, double keep_fraction = 0.5);

/// phi = Phi(T_A) / Phi(T_U), 0 when Phi(T_U) = 0. Both samples sorted.
/// Throws DataError("inconsistent timestamp sets") unless T_A is a
/// sub-multiset of T_U.
double phi_involvement(const SpikeProfile& profile, std::span<const Timestamp> from_subset,
                       std::span<const Timestamp> from_all);

/// log2(1 + fall * slope); 0 without a drop.
double drop_edge_weight(const std::optional<DropInfo>& drop);

struct ObstructionBound {
  double min_duration = 0.0;  // seconds
  double min_height = 0.0;    // counts per bin
};

/// Shortest attack duration that stays within normal rise/decline slopes
/// (counts per second) for N events at bin width dt, and the burst height such
/// an attack must reach.
ObstructionBound time_obstruction_bound(double events, double bin_width, double rise_slope, double decline_slope);

}  // namespace holoscope
