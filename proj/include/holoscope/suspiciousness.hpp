#pragma once

// Contrast suspiciousness of sinks given a suspicious user set A, the HS
// objective and per-user scores, with incremental maintenance as users are
// peeled off A.

#include <optional>
#include <span>
#include <vector>

#include "holoscope/graph.hpp"
#include "holoscope/temporal.hpp"

namespace holoscope {

/// alpha = f_A(v) / f_U(v). Throws DataError("isolated sink") when f_U(v) <= 0.
double alpha(double engagement_subset, double engagement_all);

/// q(x) = b^(x - 1). Throws ConfigError for b <= 1.
double q_scale(double x, double base);

/// P(v|A) = b^(alpha + phi + kappa - 3).
double contrast(double alpha, double phi, double kappa, double base);

/// KL(p || q) between two category-count tables after adding `smoothing` to
/// every category. Zero when either table is empty.
double smoothed_kl(std::span<const double> subset_counts, std::span<const double> rest_counts, double smoothing);

/// min(f_A / f_rest, f_rest / f_A); zero when either side is zero.
double balance_factor(double engagement_subset, double engagement_rest);

/// HS = sum_v f_A(v) P(v) / (|A| + sum_v P(v)). Throws DataError("empty set")
/// when |A| = 0.
double hs_objective(std::span<const double> engagement, std::span<const double> contrast, std::size_t set_size);

enum class KappaScaling {
  evolving,  // rescale by the max weighted kappa under the current A
  initial,   // rescale by the max under the seed set and keep that scale
};

struct SignalConfig {
  double base = 32.0;
  bool use_alpha = true;
  bool use_phi = true;
  bool use_kappa = true;
  /// Ignored rating categories; default is the scale's midpoint category.
  std::optional<std::vector<RatingCategory>> neutral;
  double kl_smoothing = 1e-3;
  double burst_keep_fraction = 0.5;
  KappaScaling kappa_scaling = KappaScaling::evolving;
  /// Multiply each column's sigma by 1 + w(v) / max w where w is the drop
  /// weight. Only applies when phi is active.
  bool drop_weighting = true;
};

/// Per-graph precomputation shared by every ContrastState: effective edge
/// weights, spike profiles, per-pair burst contributions and rating tables.
class SignalTables {
 public:
  /// Throws DataError when a requested signal lacks its attribute in `g`, and
  /// ConfigError for a base <= 1.
  SignalTables(const BipartiteGraph& g, SignalConfig config);

  /// Picks every signal whose attribute the graph carries.
  static SignalConfig available_signals(const BipartiteGraph& g, SignalConfig config = {});

  const BipartiteGraph& graph() const { return *graph_; }
  const SignalConfig& config() const { return config_; }
  bool phi_active() const { return phi_active_; }
  bool kappa_active() const { return kappa_active_; }

  double sigma(ObjectId v) const { return sigma_[v]; }
  double pair_weight(PairId p) const { return pair_weight_[p]; }
  /// f_U(v) under the effective weights.
  double sink_weight(ObjectId v) const { return sink_weight_[v]; }
  double pair_phi(PairId p) const { return phi_active_ ? pair_phi_[p] : 0.0; }
  double phi_total(ObjectId v) const { return phi_active_ ? profiles_[v].phi_denominator : 0.0; }
  const SpikeProfile& profile(ObjectId v) const { return profiles_.at(v); }
  double drop_weight(ObjectId v) const { return drop_weight_.empty() ? 0.0 : drop_weight_[v]; }

  /// Number of counted (non-neutral) rating categories.
  std::size_t categories() const { return categories_; }
  /// Slot of scale category c among the counted ones, -1 when neutral.
  int slot(RatingCategory c) const { return slot_[static_cast<std::size_t>(c)]; }
  /// Per-slot event counts on v over all users.
  std::span<const double> sink_ratings(ObjectId v) const {
    return std::span<const double>(sink_ratings_).subspan(static_cast<std::size_t>(v) * categories_, categories_);
  }

 private:
  const BipartiteGraph* graph_;
  SignalConfig config_;
  bool phi_active_ = false;
  bool kappa_active_ = false;
  std::vector<double> sigma_;
  std::vector<double> pair_weight_;
  std::vector<double> sink_weight_;
  std::vector<SpikeProfile> profiles_;
  std::vector<double> pair_phi_;
  std::vector<double> drop_weight_;
  std::size_t categories_ = 0;
  std::vector<int> slot_;
  std::vector<double> sink_ratings_;
};

/// Normalized kappa for every sink of g under user set A, computed directly.
std::vector<double> kappa_values(const SignalTables& tables, std::span<const UserId> users);

/// State of the shaving procedure: the live suspicious set A (a subset of a
/// fixed seed A0), f_A, the three signals and P for every sink adjacent to A0,
/// the user scores S(u) and the running HS sums.
class ContrastState {
 public:
  /// A = seed. Throws DataError("empty seed") for an empty seed.
  ContrastState(const SignalTables& tables, std::span<const UserId> seed);
  /// Built from scratch with A = active (a subset of seed) over the seed's
  /// sinks. `kappa_scale` pins the kappa normalizer (used with
  /// KappaScaling::initial).
  ContrastState(const SignalTables& tables, std::span<const UserId> seed, std::span<const UserId> active,
                std::optional<double> kappa_scale = std::nullopt);

  /// Removes u from A and updates only what depends on u's sinks, unless the
  /// kappa normalizer moves, in which case every sink is refreshed.
  void remove_user(UserId u);

  std::size_t size() const { return size_; }
  bool contains(UserId u) const;
  /// Members of the seed still in A, ascending.
  std::vector<UserId> members() const;
  std::span<const UserId> seed() const { return seed_; }
  std::span<const ObjectId> sinks() const { return sinks_; }

  double objective() const;
  double score(UserId u) const;
  double engagement(ObjectId v) const { return sink_value(fa_, v); }
  double contrast(ObjectId v) const;
  double alpha(ObjectId v) const { return sink_value(alpha_, v); }
  double phi(ObjectId v) const { return sink_value(phi_, v); }
  double kappa(ObjectId v) const;
  double kappa_scale() const { return kappa_scale_; }

  /// Users whose score changed during the last remove_user.
  std::span<const UserId> touched_users() const { return touched_users_; }

 private:
  void init(std::span<const UserId> seed, std::span<const UserId> active, std::optional<double> kappa_scale);
  void recompute_sink(std::size_t s);
  void refresh_signals(std::size_t s);
  double contrast_of(std::size_t s) const;
  double score_of(std::size_t m) const;
  void rescan_kappa_max();
  void refresh_all();
  double sink_value(const std::vector<double>& values, ObjectId v) const;
  int local_sink(ObjectId v) const;

  const SignalTables* tables_;
  std::vector<UserId> seed_;
  std::vector<std::int32_t> member_of_;  // user -> member slot or -1
  std::vector<char> active_;
  std::size_t size_ = 0;

  std::vector<ObjectId> sinks_;
  std::vector<std::int32_t> sink_of_;  // object -> sink slot or -1

  // member slot -> (sink slot, pair id) for each of its pairs
  std::vector<std::size_t> member_begin_;
  std::vector<std::uint32_t> member_sink_;
  std::vector<PairId> member_pair_;
  // sink slot -> (member slot, pair id) over seed members
  std::vector<std::size_t> sink_begin_;
  std::vector<std::uint32_t> sink_member_;
  std::vector<PairId> sink_pair_;

  std::vector<double> fa_, phi_mass_, alpha_, phi_, kappa_raw_, p_;
  std::vector<double> ratings_a_;  // sink slot * categories
  std::vector<double> score_;

  double kappa_scale_ = 0.0;
  bool kappa_scale_fixed_ = false;
  std::size_t kappa_holder_ = 0;

  struct CompensatedSum {
    double sum = 0.0, carry = 0.0;
    void add(double x);
    double value() const { return sum + carry; }
  };
  CompensatedSum numerator_, denominator_;

  std::vector<UserId> touched_users_;
  std::vector<std::uint32_t> stamp_member_, stamp_sink_;
  std::uint32_t stamp_ = 0;
};

}  // namespace holoscope
