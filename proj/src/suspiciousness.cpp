#include "holoscope/suspiciousness.hpp"

#include <algorithm>
#include <cmath>

#include "holoscope/error.hpp"

namespace holoscope {

double alpha(double engagement_subset, double engagement_all) {
  if (!(engagement_all > 0.0)) throw DataError("isolated sink");
  return engagement_subset / engagement_all;
}

double q_scale(double x, double base) {
  if (!(base > 1.0)) throw ConfigError("scaling base must be > 1");
  return std::pow(base, x - 1.0);
}

double contrast(double alpha, double phi, double kappa, double base) {
  if (!(base > 1.0)) throw ConfigError("scaling base must be > 1");
  return std::pow(base, alpha + phi + kappa - 3.0);
}

double smoothed_kl(std::span<const double> subset_counts, std::span<const double> rest_counts, double smoothing) {
  if (subset_counts.size() != rest_counts.size()) throw DataError("rating tables differ in size");
  double na = 0.0, nb = 0.0;
  for (double c : subset_counts) na += c;
  for (double c : rest_counts) nb += c;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const double k = static_cast<double>(subset_counts.size());
  const double za = na + k * smoothing;
  const double zb = nb + k * smoothing;
  double kl = 0.0;
  for (std::size_t c = 0; c < subset_counts.size(); ++c) {
    const double p = (subset_counts[c] + smoothing) / za;
    const double q = (rest_counts[c] + smoothing) / zb;
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

double balance_factor(double engagement_subset, double engagement_rest) {
  if (engagement_subset <= 0.0 || engagement_rest <= 0.0) return 0.0;
  return std::min(engagement_subset / engagement_rest, engagement_rest / engagement_subset);
}

double hs_objective(std::span<const double> engagement, std::span<const double> contrast, std::size_t set_size) {
  if (set_size == 0) throw DataError("empty set");
  if (engagement.size() != contrast.size()) throw DataError("engagement and contrast differ in size");
  double num = 0.0, den = static_cast<double>(set_size);
  for (std::size_t i = 0; i < engagement.size(); ++i) {
    num += engagement[i] * contrast[i];
    den += contrast[i];
  }
  return num / den;
}

// ---------------------------------------------------------------------------

SignalTables::SignalTables(const BipartiteGraph& g, SignalConfig config) : graph_(&g), config_(std::move(config)) {
  if (!(config_.base > 1.0)) throw ConfigError("scaling base must be > 1");
  if (config_.use_phi && !g.has_timestamps()) throw DataError("signal phi requires timestamps");
  if (config_.use_kappa && !g.has_ratings()) throw DataError("signal kappa requires ratings");
  phi_active_ = config_.use_phi;
  kappa_active_ = config_.use_kappa;

  const std::size_t nv = g.num_objects();
  const std::size_t np = g.num_pairs();
  sigma_.resize(nv);
  for (ObjectId v = 0; v < nv; ++v) sigma_[v] = g.sigma(v);

  if (phi_active_) {
    profiles_.resize(nv);
    drop_weight_.assign(nv, 0.0);
    for (ObjectId v = 0; v < nv; ++v) {
      const auto ts = g.object_timestamps(v);
      profiles_[v] = build_spike_profile(ts, config_.burst_keep_fraction);
      drop_weight_[v] = drop_edge_weight(profiles_[v].drop);
    }
    pair_phi_.assign(np, 0.0);
    for (PairId p = 0; p < np; ++p) pair_phi_[p] = profiles_[g.pair_object(p)].phi(g.pair_timestamps(p));
    if (config_.drop_weighting) {
      const double top = *std::max_element(drop_weight_.begin(), drop_weight_.end());
      if (top > 0.0)
        for (ObjectId v = 0; v < nv; ++v) sigma_[v] *= 1.0 + drop_weight_[v] / top;
    }
  }

  pair_weight_.resize(np);
  sink_weight_.assign(nv, 0.0);
  for (PairId p = 0; p < np; ++p) pair_weight_[p] = sigma_[g.pair_object(p)] * g.pair_prior(p) * g.multiplicity(p);
  for (ObjectId v = 0; v < nv; ++v)
    for (PairId p : g.object_pairs(v)) sink_weight_[v] += pair_weight_[p];

  if (kappa_active_) {
    const std::size_t scale_size = g.scale().categories();
    std::vector<char> neutral_flag(scale_size, 0);
    const auto neutral = config_.neutral ? *config_.neutral : g.scale().default_neutral();
    for (RatingCategory c : neutral) {
      if (c < 0 || static_cast<std::size_t>(c) >= scale_size) throw ConfigError("neutral category outside the scale");
      neutral_flag[static_cast<std::size_t>(c)] = 1;
    }
    slot_.assign(scale_size, -1);
    for (std::size_t c = 0; c < scale_size; ++c)
      if (!neutral_flag[c]) slot_[c] = static_cast<int>(categories_++);
    sink_ratings_.assign(nv * categories_, 0.0);
    for (PairId p = 0; p < np; ++p) {
      const std::size_t base = static_cast<std::size_t>(g.pair_object(p)) * categories_;
      for (RatingCategory c : g.pair_ratings(p))
        if (slot_[static_cast<std::size_t>(c)] >= 0)
          sink_ratings_[base + static_cast<std::size_t>(slot_[static_cast<std::size_t>(c)])] += 1.0;
    }
  }
}

SignalConfig SignalTables::available_signals(const BipartiteGraph& g, SignalConfig config) {
  config.use_phi = config.use_phi && g.has_timestamps();
  config.use_kappa = config.use_kappa && g.has_ratings();
  return config;
}

std::vector<double> kappa_values(const SignalTables& tables, std::span<const UserId> users) {
  const auto& g = tables.graph();
  std::vector<double> out(g.num_objects(), 0.0);
  if (!tables.kappa_active()) return out;
  std::vector<char> in_set(g.num_users(), 0);
  for (UserId u : users) in_set.at(u) = 1;
  const std::size_t k = tables.categories();
  std::vector<double> a(k), rest(k);
  double top = 0.0;
  for (ObjectId v = 0; v < g.num_objects(); ++v) {
    std::fill(a.begin(), a.end(), 0.0);
    double fa = 0.0;
    for (PairId p : g.object_pairs(v)) {
      if (!in_set[g.pair_user(p)]) continue;
      fa += tables.pair_weight(p);
      for (RatingCategory c : g.pair_ratings(p))
        if (const int k = tables.slot(c); k >= 0) a[static_cast<std::size_t>(k)] += 1.0;
    }
    const auto total = tables.sink_ratings(v);
    for (std::size_t c = 0; c < k; ++c) rest[c] = total[c] - a[c];
    double fb = tables.sink_weight(v) - fa;
    if (fb <= 1e-12 * tables.sink_weight(v)) fb = 0.0;
    out[v] = smoothed_kl(a, rest, tables.config().kl_smoothing) * balance_factor(fa, fb);
    top = std::max(top, out[v]);
  }
  for (double& x : out) x = top > 0.0 ? x / top : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

void ContrastState::CompensatedSum::add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    carry += (sum - t) + x;
  else
    carry += (x - t) + sum;
  sum = t;
}

ContrastState::ContrastState(const SignalTables& tables, std::span<const UserId> seed) : tables_(&tables) {
  init(seed, seed, std::nullopt);
}

ContrastState::ContrastState(const SignalTables& tables, std::span<const UserId> seed, std::span<const UserId> active,
                             std::optional<double> kappa_scale)
    : tables_(&tables) {
  init(seed, active, kappa_scale);
}

void ContrastState::init(std::span<const UserId> seed, std::span<const UserId> active,
                         std::optional<double> kappa_scale) {
  const auto& g = tables_->graph();
  if (seed.empty()) throw DataError("empty seed");
  seed_.assign(seed.begin(), seed.end());
  std::sort(seed_.begin(), seed_.end());
  seed_.erase(std::unique(seed_.begin(), seed_.end()), seed_.end());
  if (seed_.back() >= g.num_users()) throw DataError("unknown user id " + std::to_string(seed_.back()));

  member_of_.assign(g.num_users(), -1);
  for (std::size_t m = 0; m < seed_.size(); ++m) member_of_[seed_[m]] = static_cast<std::int32_t>(m);
  active_.assign(seed_.size(), 0);
  for (UserId u : active) {
    if (u >= g.num_users() || member_of_[u] < 0) throw DataError("active user outside the seed");
    active_[static_cast<std::size_t>(member_of_[u])] = 1;
  }
  size_ = static_cast<std::size_t>(std::count(active_.begin(), active_.end(), 1));

  sink_of_.assign(g.num_objects(), -1);
  for (UserId u : seed_)
    for (PairId p : g.user_pairs(u)) sink_of_[g.pair_object(p)] = 0;
  sinks_.clear();
  for (ObjectId v = 0; v < g.num_objects(); ++v) {
    if (sink_of_[v] == 0) {
      sink_of_[v] = static_cast<std::int32_t>(sinks_.size());
      sinks_.push_back(v);
    }
  }

  member_begin_.assign(1, 0);
  member_sink_.clear();
  member_pair_.clear();
  std::vector<std::size_t> sink_count(sinks_.size() + 1, 0);
  for (UserId u : seed_) {
    for (PairId p : g.user_pairs(u)) {
      const auto s = static_cast<std::uint32_t>(sink_of_[g.pair_object(p)]);
      member_sink_.push_back(s);
      member_pair_.push_back(p);
      ++sink_count[s + 1];
    }
    member_begin_.push_back(member_sink_.size());
  }
  sink_begin_.assign(sinks_.size() + 1, 0);
  for (std::size_t s = 0; s < sinks_.size(); ++s) sink_begin_[s + 1] = sink_begin_[s] + sink_count[s + 1];
  sink_member_.resize(member_sink_.size());
  sink_pair_.resize(member_sink_.size());
  std::vector<std::size_t> cursor(sink_begin_.begin(), sink_begin_.end() - 1);
  for (std::size_t m = 0; m < seed_.size(); ++m) {
    for (std::size_t e = member_begin_[m]; e < member_begin_[m + 1]; ++e) {
      const std::size_t pos = cursor[member_sink_[e]]++;
      sink_member_[pos] = static_cast<std::uint32_t>(m);
      sink_pair_[pos] = member_pair_[e];
    }
  }

  const std::size_t ns = sinks_.size();
  fa_.assign(ns, 0.0);
  phi_mass_.assign(ns, 0.0);
  alpha_.assign(ns, 0.0);
  phi_.assign(ns, 0.0);
  kappa_raw_.assign(ns, 0.0);
  p_.assign(ns, 0.0);
  ratings_a_.assign(ns * tables_->categories(), 0.0);
  score_.assign(seed_.size(), 0.0);
  stamp_member_.assign(seed_.size(), 0);
  stamp_sink_.assign(ns, 0);
  stamp_ = 0;

  for (std::size_t s = 0; s < ns; ++s) {
    recompute_sink(s);
    refresh_signals(s);
  }
  if (kappa_scale) {
    kappa_scale_ = *kappa_scale;
    kappa_scale_fixed_ = true;
  } else {
    rescan_kappa_max();
    kappa_scale_fixed_ = tables_->config().kappa_scaling == KappaScaling::initial;
  }
  refresh_all();
  touched_users_.clear();
}

void ContrastState::recompute_sink(std::size_t s) {
  const std::size_t k = tables_->categories();
  double fa = 0.0, mass = 0.0;
  double* ratings = k ? &ratings_a_[s * k] : nullptr;
  if (k) std::fill(ratings, ratings + k, 0.0);
  const auto& g = tables_->graph();
  for (std::size_t e = sink_begin_[s]; e < sink_begin_[s + 1]; ++e) {
    if (!active_[sink_member_[e]]) continue;
    const PairId p = sink_pair_[e];
    fa += tables_->pair_weight(p);
    mass += tables_->pair_phi(p);
    if (k)
      for (RatingCategory c : g.pair_ratings(p))
        if (const int slot = tables_->slot(c); slot >= 0) ratings[static_cast<std::size_t>(slot)] += 1.0;
  }
  fa_[s] = fa;
  phi_mass_[s] = mass;
}

void ContrastState::refresh_signals(std::size_t s) {
  const ObjectId v = sinks_[s];
  const double fu = tables_->sink_weight(v);
  alpha_[s] = holoscope::alpha(fa_[s], fu);
  const double phi_total = tables_->phi_total(v);
  phi_[s] = phi_total > 0.0 ? std::min(1.0, phi_mass_[s] / phi_total) : 0.0;
  if (tables_->kappa_active()) {
    const std::size_t k = tables_->categories();
    const auto total = tables_->sink_ratings(v);
    std::vector<double> rest(k);
    for (std::size_t c = 0; c < k; ++c) rest[c] = total[c] - ratings_a_[s * k + c];
    double fb = fu - fa_[s];
    if (fb <= 1e-12 * fu) fb = 0.0;
    kappa_raw_[s] = smoothed_kl(std::span<const double>(ratings_a_).subspan(s * k, k), rest,
                                tables_->config().kl_smoothing) *
                    balance_factor(fa_[s], fb);
  }
}

double ContrastState::contrast_of(std::size_t s) const {
  const auto& cfg = tables_->config();
  const double a = cfg.use_alpha ? alpha_[s] : 1.0;
  const double f = tables_->phi_active() ? phi_[s] : 1.0;
  double k = 1.0;
  if (tables_->kappa_active()) k = kappa_scale_ > 0.0 ? std::min(1.0, kappa_raw_[s] / kappa_scale_) : 0.0;
  return std::pow(cfg.base, a + f + k - 3.0);
}

double ContrastState::score_of(std::size_t m) const {
  double total = 0.0;
  for (std::size_t e = member_begin_[m]; e < member_begin_[m + 1]; ++e)
    total += tables_->pair_weight(member_pair_[e]) * p_[member_sink_[e]];
  return total;
}

void ContrastState::rescan_kappa_max() {
  kappa_scale_ = 0.0;
  kappa_holder_ = 0;
  for (std::size_t s = 0; s < sinks_.size(); ++s) {
    if (kappa_raw_[s] > kappa_scale_) {
      kappa_scale_ = kappa_raw_[s];
      kappa_holder_ = s;
    }
  }
}

void ContrastState::refresh_all() {
  numerator_ = {};
  denominator_ = {};
  for (std::size_t s = 0; s < sinks_.size(); ++s) {
    p_[s] = contrast_of(s);
    numerator_.add(fa_[s] * p_[s]);
    denominator_.add(p_[s]);
  }
  touched_users_.clear();
  for (std::size_t m = 0; m < seed_.size(); ++m) {
    if (!active_[m]) continue;
    score_[m] = score_of(m);
    touched_users_.push_back(seed_[m]);
  }
}

void ContrastState::remove_user(UserId u) {
  if (u >= member_of_.size() || member_of_[u] < 0 || !active_[static_cast<std::size_t>(member_of_[u])])
    throw DataError("user " + std::to_string(u) + " is not in the suspicious set");
  const auto m = static_cast<std::size_t>(member_of_[u]);
  ++stamp_;
  std::vector<std::size_t> touched;
  for (std::size_t e = member_begin_[m]; e < member_begin_[m + 1]; ++e) {
    const std::size_t s = member_sink_[e];
    if (stamp_sink_[s] != stamp_) {
      stamp_sink_[s] = stamp_;
      touched.push_back(s);
    }
  }
  active_[m] = 0;
  --size_;

  std::vector<double> old_fa(touched.size());
  bool holder_touched = false;
  for (std::size_t i = 0; i < touched.size(); ++i) {
    const std::size_t s = touched[i];
    old_fa[i] = fa_[s];
    recompute_sink(s);
    refresh_signals(s);
    holder_touched = holder_touched || s == kappa_holder_;
  }

  if (tables_->kappa_active() && !kappa_scale_fixed_) {
    const double old_scale = kappa_scale_;
    if (holder_touched) {
      rescan_kappa_max();
    } else {
      for (std::size_t s : touched) {
        if (kappa_raw_[s] > kappa_scale_) {
          kappa_scale_ = kappa_raw_[s];
          kappa_holder_ = s;
        }
      }
    }
    if (kappa_scale_ != old_scale) {
      refresh_all();
      return;
    }
  }

  for (std::size_t i = 0; i < touched.size(); ++i) {
    const std::size_t s = touched[i];
    const double p_new = contrast_of(s);
    numerator_.add(fa_[s] * p_new - old_fa[i] * p_[s]);
    denominator_.add(p_new - p_[s]);
    p_[s] = p_new;
  }
  touched_users_.clear();
  for (std::size_t s : touched) {
    for (std::size_t e = sink_begin_[s]; e < sink_begin_[s + 1]; ++e) {
      const std::size_t other = sink_member_[e];
      if (!active_[other] || stamp_member_[other] == stamp_) continue;
      stamp_member_[other] = stamp_;
      score_[other] = score_of(other);
      touched_users_.push_back(seed_[other]);
    }
  }
}

bool ContrastState::contains(UserId u) const {
  return u < member_of_.size() && member_of_[u] >= 0 && active_[static_cast<std::size_t>(member_of_[u])];
}

std::vector<UserId> ContrastState::members() const {
  std::vector<UserId> out;
  out.reserve(size_);
  for (std::size_t m = 0; m < seed_.size(); ++m)
    if (active_[m]) out.push_back(seed_[m]);
  return out;
}

double ContrastState::objective() const {
  if (size_ == 0) throw DataError("empty set");
  return numerator_.value() / (static_cast<double>(size_) + denominator_.value());
}

double ContrastState::score(UserId u) const {
  if (!contains(u)) throw DataError("user " + std::to_string(u) + " is not in the suspicious set");
  return score_[static_cast<std::size_t>(member_of_[u])];
}

int ContrastState::local_sink(ObjectId v) const {
  if (v >= sink_of_.size()) throw DataError("unknown sink");
  return sink_of_[v];
}

double ContrastState::sink_value(const std::vector<double>& values, ObjectId v) const {
  const int s = local_sink(v);
  return s < 0 ? 0.0 : values[static_cast<std::size_t>(s)];
}

double ContrastState::contrast(ObjectId v) const {
  const int s = local_sink(v);
  if (s >= 0) return p_[static_cast<std::size_t>(s)];
  const auto& cfg = tables_->config();
  const double f = tables_->phi_active() ? 0.0 : 1.0;
  const double k = tables_->kappa_active() ? 0.0 : 1.0;
  return std::pow(cfg.base, (cfg.use_alpha ? 0.0 : 1.0) + f + k - 3.0);
}

double ContrastState::kappa(ObjectId v) const {
  const int s = local_sink(v);
  if (s < 0 || !tables_->kappa_active() || kappa_scale_ <= 0.0) return 0.0;
  return std::min(1.0, kappa_raw_[static_cast<std::size_t>(s)] / kappa_scale_);
}

}  // namespace holoscope
