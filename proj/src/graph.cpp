#include "holoscope/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "holoscope/error.hpp"

namespace holoscope {

std::size_t RatingScale::categories() const {
  return static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
}

std::optional<RatingCategory> RatingScale::category(double rating) const {
  if (!std::isfinite(rating)) return std::nullopt;
  const double pos = (rating - min) / step;
  const long long idx = std::llround(pos);
  if (std::abs(pos - static_cast<double>(idx)) > 1e-6) return std::nullopt;
  if (idx < 0 || static_cast<std::size_t>(idx) >= categories()) return std::nullopt;
  return static_cast<RatingCategory>(idx);
}

double RatingScale::value(RatingCategory category) const { return min + step * category; }

std::vector<RatingCategory> RatingScale::default_neutral() const {
  const double mid = 0.5 * (min + max);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < categories(); ++c)
    best = std::min(best, std::abs(value(static_cast<RatingCategory>(c)) - mid));
  std::vector<RatingCategory> out;
  for (std::size_t c = 0; c < categories(); ++c)
    if (std::abs(value(static_cast<RatingCategory>(c)) - mid) <= best + 1e-9)
      out.push_back(static_cast<RatingCategory>(c));
  return out;
}

RatingScale RatingScale::parse(std::string_view text) {
  RatingScale s;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ':', ' ');
  std::istringstream in(buf);
  if (!(in >> s.min >> s.max >> s.step) || s.step <= 0 || s.max < s.min)
    throw ConfigError("invalid rating scale '" + std::string(text) + "' (expected min:max:step)");
  const double n = (s.max - s.min) / s.step;
  if (std::abs(n - std::round(n)) > 1e-6)
    throw ConfigError("rating scale step does not divide its range: " + std::string(text));
  return s;
}

std::string RatingScale::to_string() const {
  std::ostringstream out;
  out << min << ':' << max << ':' << step;
  return out.str();
}

namespace {

struct Event {
  UserId user;
  ObjectId object;
  Timestamp time;
  RatingCategory rating;
  double prior;
  std::size_t order;
};

}  // namespace

BipartiteGraph BipartiteGraph::ingest(std::span<const EdgeRecord> records, const RatingScale& scale,
                                      std::span<const std::string> known_users,
                                      std::span<const std::string> known_objects) {
  if (records.empty()) throw DataError("empty input");

  BipartiteGraph g;
  g.scale_ = scale;
  g.has_timestamps_ = records.front().timestamp.has_value();
  g.has_ratings_ = records.front().rating.has_value();
  const bool has_prior = records.front().prior.has_value();

  auto intern = [](std::vector<std::string>& names, std::unordered_map<std::string, std::uint32_t>& index,
                   const std::string& name) {
    auto [it, inserted] = index.try_emplace(name, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };
  for (const auto& name : known_users) intern(g.user_names_, g.user_index_, name);
  for (const auto& name : known_objects) intern(g.object_names_, g.object_index_, name);

  std::vector<Event> events;
  events.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const std::string where = "record " + std::to_string(i + 1) + ": ";
    if (r.user.empty() || r.object.empty()) throw DataError(where + "empty user or object id");
    if (r.timestamp.has_value() != g.has_timestamps_ || r.rating.has_value() != g.has_ratings_ ||
        r.prior.has_value() != has_prior)
      throw DataError(where + "inconsistent arity");
    Event e{};
    e.user = intern(g.user_names_, g.user_index_, r.user);
    e.object = intern(g.object_names_, g.object_index_, r.object);
    e.order = i;
    e.time = 0;
    if (r.timestamp) {
      if (*r.timestamp < 0) throw DataError(where + "negative timestamp");
      e.time = *r.timestamp;
    }
    e.rating = -1;
    if (r.rating) {
      auto c = scale.category(*r.rating);
      if (!c)
        throw DataError(where + "rating " + std::to_string(*r.rating) + " outside scale " +
                        scale.to_string());
      e.rating = *c;
    }
    e.prior = 1.0;
    if (r.prior) {
      if (!(*r.prior > 0.0) || !std::isfinite(*r.prior)) throw DataError(where + "prior must be positive");
      e.prior = *r.prior;
    }
    events.push_back(e);
  }

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.user != b.user) return a.user < b.user;
    if (a.object != b.object) return a.object < b.object;
    return a.time < b.time;
  });

  // Without timestamps event_time_ still holds one (zero) entry per event.
  g.event_time_.reserve(events.size());
  g.event_rating_.reserve(g.has_ratings_ ? events.size() : 0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    const bool new_pair = i == 0 || e.user != events[i - 1].user || e.object != events[i - 1].object;
    if (new_pair) {
      g.pair_user_.push_back(e.user);
      g.pair_object_.push_back(e.object);
      g.pair_event_begin_.push_back(i);
      g.pair_prior_.push_back(0.0);
    }
    g.pair_prior_.back() += e.prior;
    g.event_time_.push_back(e.time);
    if (g.has_ratings_) g.event_rating_.push_back(e.rating);
  }
  g.pair_event_begin_.push_back(events.size());
  for (std::size_t p = 0; p < g.pair_prior_.size(); ++p) g.pair_prior_[p] /= g.multiplicity(static_cast<PairId>(p));

  const std::size_t nu = g.user_names_.size();
  const std::size_t nv = g.object_names_.size();
  const std::size_t np = g.pair_user_.size();

  g.user_begin_.assign(nu + 1, 0);
  g.object_begin_.assign(nv + 1, 0);
  for (std::size_t p = 0; p < np; ++p) {
    ++g.user_begin_[g.pair_user_[p] + 1];
    ++g.object_begin_[g.pair_object_[p] + 1];
  }
  std::partial_sum(g.user_begin_.begin(), g.user_begin_.end(), g.user_begin_.begin());
  std::partial_sum(g.object_begin_.begin(), g.object_begin_.end(), g.object_begin_.begin());

  g.forward_pair_ids_.resize(np);
  std::iota(g.forward_pair_ids_.begin(), g.forward_pair_ids_.end(), PairId{0});
  g.object_pair_ids_.resize(np);
  std::vector<std::size_t> cursor(g.object_begin_.begin(), g.object_begin_.end() - 1);
  for (std::size_t p = 0; p < np; ++p) g.object_pair_ids_[cursor[g.pair_object_[p]]++] = static_cast<PairId>(p);

  g.sigma_.assign(nv, 1.0);
  return g;
}

std::optional<UserId> BipartiteGraph::find_user(const std::string& name) const {
  auto it = user_index_.find(name);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ObjectId> BipartiteGraph::find_object(const std::string& name) const {
  auto it = object_index_.find(name);
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Timestamp> BipartiteGraph::pair_timestamps(PairId p) const {
  if (!has_timestamps_) return {};
  return std::span<const Timestamp>(event_time_).subspan(pair_event_begin_[p], multiplicity(p));
}

std::span<const RatingCategory> BipartiteGraph::pair_ratings(PairId p) const {
  if (!has_ratings_) return {};
  return std::span<const RatingCategory>(event_rating_).subspan(pair_event_begin_[p], multiplicity(p));
}

std::span<const PairId> BipartiteGraph::user_pairs(UserId u) const {
  return std::span<const PairId>(forward_pair_ids_).subspan(user_begin_[u], user_begin_[u + 1] - user_begin_[u]);
}

std::span<const PairId> BipartiteGraph::object_pairs(ObjectId v) const {
  return std::span<const PairId>(object_pair_ids_)
      .subspan(object_begin_[v], object_begin_[v + 1] - object_begin_[v]);
}

void BipartiteGraph::set_sigma(ObjectId v, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("sigma must be positive and finite");
  sigma_.at(v) = value;
}

double BipartiteGraph::user_weight(UserId u) const {
  double total = 0.0;
  for (PairId p : user_pairs(u)) total += pair_weight(p);
  return total;
}

double BipartiteGraph::object_weight(ObjectId v) const {
  double total = 0.0;
  for (PairId p : object_pairs(v)) total += pair_weight(p);
  return total;
}

std::vector<Timestamp> BipartiteGraph::object_timestamps(ObjectId v) const {
  std::vector<Timestamp> out;
  if (!has_timestamps_) return out;
  for (PairId p : object_pairs(v)) {
    auto ts = pair_timestamps(p);
    out.insert(out.end(), ts.begin(), ts.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<Timestamp, Timestamp> BipartiteGraph::time_range() const {
  if (!has_timestamps_ || event_time_.empty()) return {0, 0};
  auto [lo, hi] = std::minmax_element(event_time_.begin(), event_time_.end());
  return {*lo, *hi};
}

std::vector<EdgeRecord> BipartiteGraph::to_records() const {
  std::vector<EdgeRecord> out;
  out.reserve(num_events());
  const bool has_prior = std::any_of(pair_prior_.begin(), pair_prior_.end(), [](double p) { return p != 1.0; });
  for (std::size_t p = 0; p < num_pairs(); ++p) {
    for (std::size_t e = pair_event_begin_[p]; e < pair_event_begin_[p + 1]; ++e) {
      EdgeRecord r;
      r.user = user_names_[pair_user_[p]];
      r.object = object_names_[pair_object_[p]];
      if (has_timestamps_) r.timestamp = event_time_[e];
      if (has_ratings_) r.rating = scale_.value(event_rating_[e]);
      if (has_prior) r.prior = pair_prior_[p];
      out.push_back(std::move(r));
    }
  }
  return out;
}

double engagement(const BipartiteGraph& g, std::span<const UserId> users, ObjectId v) {
  if (v >= g.num_objects()) throw DataError("unknown sink");
  std::vector<UserId> sorted(users.begin(), users.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (PairId p : g.object_pairs(v))
    if (std::binary_search(sorted.begin(), sorted.end(), g.pair_user(p))) total += g.pair_weight(p);
  return total;
}

SubgraphView::SubgraphView(const BipartiteGraph& g, std::span<const UserId> users) : graph_(&g) {
  member_.assign(g.num_users(), 0);
  for (UserId u : users) {
    if (u >= g.num_users()) throw DataError("unknown user id " + std::to_string(u));
    if (!member_[u]) {
      member_[u] = 1;
      users_.push_back(u);
    }
  }
  std::sort(users_.begin(), users_.end());
  std::vector<char> seen(g.num_objects(), 0);
  for (UserId u : users_) {
    for (PairId p : g.user_pairs(u)) {
      pairs_.push_back(p);
      num_events_ += g.multiplicity(p);
      ObjectId v = g.pair_object(p);
      if (!seen[v]) {
        seen[v] = 1;
        objects_.push_back(v);
      }
    }
  }
  std::sort(objects_.begin(), objects_.end());
}

SubgraphView restrict_users(const BipartiteGraph& g, std::span<const UserId> users) {
  if (users.empty()) throw DataError("empty seed");
  return SubgraphView(g, users);
}

}  // namespace holoscope
