#pragma once

// Dual-indexed bipartite multigraph built from (user, object, timestamp,
// rating) event logs.
//
// Node names are interned to dense indices at ingestion. Events between the
// same (user, object) pair are grouped into one stored pair whose
// multiplicity is the event count; each pair keeps its events' timestamps
// sorted ascending with ratings aligned to them. Pairs are laid out sorted by
// (user, object) so the forward index is a plain offset table; the reverse
// index lists pair ids per object.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace holoscope {

using UserId = std::uint32_t;
using ObjectId = std::uint32_t;
using PairId = std::uint32_t;
using Timestamp = std::int64_t;
using RatingCategory = std::int16_t;

/// Declared rating scale: values min, min+step, ..., max. Each value maps to
/// a category index in [0, categories()).
struct RatingScale {
  double min = 1.0;
  double max = 5.0;
  double step = 1.0;

  std::size_t categories() const;
  /// Category of a rating value; nullopt if the value is not on the scale.
  std::optional<RatingCategory> category(double rating) const;
  double value(RatingCategory category) const;
  /// Categories closest to the scale midpoint (two of them on even scales).
  std::vector<RatingCategory> default_neutral() const;

  /// Parses "min:max:step", e.g. "0.5:5:0.5".
  static RatingScale parse(std::string_view text);
  std::string to_string() const;
};

struct EdgeRecord {
  std::string user;
  std::string object;
  std::optional<Timestamp> timestamp;
  std::optional<double> rating;
  /// Optional per-event prior suspiciousness (extension hook, default 1).
  std::optional<double> prior;

  bool operator==(const EdgeRecord&) const = default;
};

class BipartiteGraph {
 public:
  /// Builds the graph. Names listed in `known_users` / `known_objects` are
  /// interned first, in order, so a graph rebuilt from its own records plus
  /// extra events keeps every existing id stable.
  static BipartiteGraph ingest(std::span<const EdgeRecord> records, const RatingScale& scale,
                               std::span<const std::string> known_users = {},
                               std::span<const std::string> known_objects = {});

  std::size_t num_users() const { return user_names_.size(); }
  std::size_t num_objects() const { return object_names_.size(); }
  std::size_t num_pairs() const { return pair_user_.size(); }
  std::size_t num_events() const { return event_time_.size(); }

  bool has_timestamps() const { return has_timestamps_; }
  bool has_ratings() const { return has_ratings_; }
  const RatingScale& scale() const { return scale_; }

  const std::string& user_name(UserId u) const { return user_names_.at(u); }
  const std::string& object_name(ObjectId v) const { return object_names_.at(v); }
  const std::vector<std::string>& user_names() const { return user_names_; }
  const std::vector<std::string>& object_names() const { return object_names_; }
  std::optional<UserId> find_user(const std::string& name) const;
  std::optional<ObjectId> find_object(const std::string& name) const;

  UserId pair_user(PairId p) const { return pair_user_[p]; }
  ObjectId pair_object(PairId p) const { return pair_object_[p]; }
  /// Edge frequency e_ji: number of events between the pair's endpoints.
  std::uint32_t multiplicity(PairId p) const {
    return static_cast<std::uint32_t>(pair_event_begin_[p + 1] - pair_event_begin_[p]);
  }
  /// Sorted timestamps of the pair's events (empty without timestamps).
  std::span<const Timestamp> pair_timestamps(PairId p) const;
  /// Rating categories aligned with pair_timestamps (empty without ratings).
  std::span<const RatingCategory> pair_ratings(PairId p) const;

  /// Pairs of user u, ordered by object id.
  std::span<const PairId> user_pairs(UserId u) const;
  /// Pairs of object v, ordered by user id.
  std::span<const PairId> object_pairs(ObjectId v) const;

  /// Global suspiciousness of object column v (default 1).
  double sigma(ObjectId v) const { return sigma_.at(v); }
  void set_sigma(ObjectId v, double value);
  /// Per-pair prior (mean of its events' priors; default 1).
  double pair_prior(PairId p) const { return pair_prior_[p]; }
  /// sigma(v) * prior * e for the pair.
  double pair_weight(PairId p) const {
    return sigma_[pair_object_[p]] * pair_prior_[p] * multiplicity(p);
  }

  /// Weighted outdegree of u and weighted indegree f_U(v).
  double user_weight(UserId u) const;
  double object_weight(ObjectId v) const;

  /// All timestamps on object v, sorted.
  std::vector<Timestamp> object_timestamps(ObjectId v) const;
  std::pair<Timestamp, Timestamp> time_range() const;

  /// Events in pair order. Ingesting them back with user_names() and
  /// object_names() as known names yields an identical graph.
  std::vector<EdgeRecord> to_records() const;

 private:
  RatingScale scale_;
  bool has_timestamps_ = false;
  bool has_ratings_ = false;

  std::vector<std::string> user_names_;
  std::vector<std::string> object_names_;
  std::unordered_map<std::string, UserId> user_index_;
  std::unordered_map<std::string, ObjectId> object_index_;

  std::vector<UserId> pair_user_;
  std::vector<ObjectId> pair_object_;
  std::vector<std::size_t> pair_event_begin_;  // size num_pairs + 1
  std::vector<double> pair_prior_;

  std::vector<Timestamp> event_time_;
  std::vector<RatingCategory> event_rating_;

  std::vector<std::size_t> user_begin_;  // forward index offsets into pair ids
  std::vector<std::size_t> object_begin_;
  std::vector<PairId> object_pair_ids_;
  std::vector<PairId> forward_pair_ids_;

  std::vector<double> sigma_;
};

/// f_A(v): weighted engagement from `users` to sink v. Duplicates in `users`
/// are counted once.
double engagement(const BipartiteGraph& g, std::span<const UserId> users, ObjectId v);

/// Read-only view over the edges incident to a subset of users.
class SubgraphView {
 public:
  SubgraphView(const BipartiteGraph& g, std::span<const UserId> users);

  const BipartiteGraph& graph() const { return *graph_; }
  std::span<const UserId> users() const { return users_; }
  /// Sinks adjacent to the subset, ascending.
  std::span<const ObjectId> objects() const { return objects_; }
  std::span<const PairId> pairs() const { return pairs_; }
  std::size_t num_events() const { return num_events_; }
  bool contains(UserId u) const { return u < member_.size() && member_[u]; }

 private:
  const BipartiteGraph* graph_;
  std::vector<UserId> users_;
  std::vector<ObjectId> objects_;
  std::vector<PairId> pairs_;
  std::vector<char> member_;
  std::size_t num_events_ = 0;
};

/// Restricts g to the edges of `users`. Throws DataError("empty seed") for an
/// empty subset.
SubgraphView restrict_users(const BipartiteGraph& g, std::span<const UserId> users);

}  // namespace holoscope
