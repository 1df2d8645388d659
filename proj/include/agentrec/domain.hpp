/*
 * Copyright 2026 The agentrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Users, items, ratings and the hidden ground-truth preference model.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "agentrec/core.hpp"
#include "agentrec/rng.hpp"

namespace agentrec {

// How a user picks items: with probability `weight` from the recommendation
// list, otherwise organically. RecFollowing and Organic are Mixed(1) and
// Mixed(0) under different names.
struct ChoiceStrategy {
  enum class Kind { RecFollowing, Organic, Mixed };

  Kind kind = Kind::RecFollowing;
  double weight = 1.0;

  static ChoiceStrategy rec_following() { return {Kind::RecFollowing, 1.0}; }
  static ChoiceStrategy organic() { return {Kind::Organic, 0.0}; }
  static ChoiceStrategy mixed(double w) { return {Kind::Mixed, w}; }

  double rec_probability() const {
    switch (kind) {
      case Kind::RecFollowing: return 1.0;
      case Kind::Organic: return 0.0;
      case Kind::Mixed: return weight;
    }
    return weight;
  }

  bool operator==(const ChoiceStrategy&) const = default;
};

struct UserProfile {
  UserId id;
  Epoch entry_epoch = 0;
  Epoch lifespan = 1;
  double activity_prob = 1.0;
  std::vector<double> preferences;
  ChoiceStrategy choice;
  double feedback_prob = 1.0;
  double anchor_weight = 1.0;  // 1 = unbiased

  bool operator==(const UserProfile&) const = default;
};

struct ItemProfile {
  ItemId id;
  Epoch entry_epoch = 0;
  Epoch lifespan = 1;
  std::vector<double> content;
  double quality_offset = 0.0;

  bool operator==(const ItemProfile&) const = default;
};

namespace detail {

inline bool unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

inline void validate(const UserProfile& u, std::size_t latent_dim) {
  if (!detail::unit_interval(u.activity_prob) || !detail::unit_interval(u.feedback_prob) ||
      !detail::unit_interval(u.anchor_weight) || !detail::unit_interval(u.choice.weight))
    throw ModelError("user " + std::to_string(u.id.value) + ": probability outside [0,1]");
  if (u.lifespan < 1 || u.entry_epoch < 0)
    throw ModelError("user " + std::to_string(u.id.value) + ": invalid lifespan window");
  if (u.preferences.size() != latent_dim || !detail::all_finite(u.preferences))
    throw ModelError("user " + std::to_string(u.id.value) + ": bad preference vector");
}

inline void validate(const ItemProfile& i, std::size_t latent_dim) {
  if (i.lifespan < 1 || i.entry_epoch < 0)
    throw ModelError("item " + std::to_string(i.id.value) + ": invalid lifespan window");
  if (i.content.size() != latent_dim || !detail::all_finite(i.content) ||
      !std::isfinite(i.quality_offset))
    throw ModelError("item " + std::to_string(i.id.value) + ": bad content vector");
}

// Hidden preference model. The per-(user, item) noise term is a pure function
// of (seed, user, item), so the ground truth behaves like a fixed matrix that
// is never materialized.
struct GroundTruth {
  double global_mean = 3.0;
  double noise_std = 0.0;
  RatingScale scale;
  std::size_t latent_dim = 1;
  std::uint64_t noise_seed = 0;

  double noise(UserId u, ItemId i) const {
    if (noise_std == 0.0) return 0.0;
    const auto key = mix_seed({noise_seed, static_cast<std::uint64_t>(Stream::GroundTruthNoise),
                               u.value, i.value});
    return noise_std * normal_from_bits(splitmix64(key), splitmix64(key ^ 0xa5a5a5a5a5a5a5a5ULL));
  }

  bool operator==(const GroundTruth&) const = default;
};

// clamp(mu + p_u . q_i + b_i + noise)
inline double true_rating(const UserProfile& user, const ItemProfile& item, const GroundTruth& gt,
                          double noise_draw) {
  if (user.preferences.size() != item.content.size() ||
      user.preferences.size() != gt.latent_dim)
    throw ModelError("true_rating: latent dimension mismatch");
  double dot = 0.0;
  for (std::size_t k = 0; k < user.preferences.size(); ++k)
    dot += user.preferences[k] * item.content[k];
  return gt.scale.clamp(gt.global_mean + dot + item.quality_offset + noise_draw);
}

inline double true_rating(const UserProfile& user, const ItemProfile& item,
                          const GroundTruth& gt) {
  return true_rating(user, item, gt, gt.noise(user.id, item.id));
}

// Lifespans are floor + Geometric, with the given mean.
struct LifespanDistribution {
  double mean = 100.0;
  Epoch floor = 20;

  Epoch sample(Rng& rng) const {
    const double excess = mean - static_cast<double>(floor);
    if (excess <= 0.0) return floor;
    return floor + static_cast<Epoch>(rng.geometric(1.0 / (excess + 1.0)));
  }

  bool operator==(const LifespanDistribution&) const = default;
};

struct BetaSpread {
  double a = 2.0;
  double b = 2.0;
  bool operator==(const BetaSpread&) const = default;
};

struct PopulationParams {
  std::size_t n_users = 100;
  std::size_t n_items = 200;
  std::size_t latent_dim = 5;
  double factor_std = 0.5;
  double bias_std = 0.3;
  double noise_std = 0.3;
  std::optional<double> global_mean;  // defaults to the scale midpoint
  RatingScale scale;

  // Per-user parameters: a pinned value, or a draw from the spread.
  std::optional<double> activity_prob;
  BetaSpread activity_spread{2.0, 2.0};
  std::optional<double> feedback_prob;
  BetaSpread feedback_spread{8.0, 2.0};
  ChoiceStrategy choice = ChoiceStrategy::rec_following();
  double anchor_weight = 1.0;

  LifespanDistribution user_lifespan{100.0, 20};
  LifespanDistribution item_lifespan{200.0, 40};

  double resolved_global_mean() const { return global_mean.value_or(scale.midpoint()); }

  void validate() const {
    if (n_users < 1) throw ConfigError("n_users must be at least 1");
    if (n_items < 1) throw ConfigError("n_items must be at least 1");
    if (latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
    if (!(factor_std >= 0.0)) throw ConfigError("factor_std must be non-negative");
    if (!(bias_std >= 0.0)) throw ConfigError("bias_std must be non-negative");
    if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
    if (!(scale.min < scale.max)) throw ConfigError("rating_min must be below rating_max");
    if (activity_prob && !detail::unit_interval(*activity_prob))
      throw ConfigError("activity_prob must lie in [0,1]");
    if (feedback_prob && !detail::unit_interval(*feedback_prob))
      throw ConfigError("feedback_prob must lie in [0,1]");
    if (!(activity_spread.a > 0.0 && activity_spread.b > 0.0))
      throw ConfigError("activity_beta_a/activity_beta_b must be positive");
    if (!(feedback_spread.a > 0.0 && feedback_spread.b > 0.0))
      throw ConfigError("feedback_beta_a/feedback_beta_b must be positive");
    if (!detail::unit_interval(choice.weight))
      throw ConfigError("choice_weight must lie in [0,1]");
    if (!detail::unit_interval(anchor_weight))
      throw ConfigError("anchor_weight must lie in [0,1]");
    if (user_lifespan.floor < 1 || !(user_lifespan.mean >= 1.0))
      throw ConfigError("user lifespan must be at least 1 epoch");
    if (item_lifespan.floor < 1 || !(item_lifespan.mean >= 1.0))
      throw ConfigError("item lifespan must be at least 1 epoch");
  }

  bool operator==(const PopulationParams&) const = default;
};

// Each profile is drawn from its own keyed stream so spawning entity n during a
// run yields the same profile no matter what happened before it.
inline UserProfile make_user(const PopulationParams& p, std::uint64_t seed, UserId id,
                             Epoch entry_epoch) {
  Rng rng = substream(seed, Stream::UserProfile, id.value);
  UserProfile u;
  u.id = id;
  u.entry_epoch = entry_epoch;
  u.preferences.resize(p.latent_dim);
  for (auto& x : u.preferences) x = rng.normal(0.0, p.factor_std);
  u.lifespan = p.user_lifespan.sample(rng);
  u.activity_prob =
      p.activity_prob ? *p.activity_prob : rng.beta(p.activity_spread.a, p.activity_spread.b);
  u.feedback_prob =
      p.feedback_prob ? *p.feedback_prob : rng.beta(p.feedback_spread.a, p.feedback_spread.b);
  u.choice = p.choice;
  u.anchor_weight = p.anchor_weight;
  return u;
}

inline ItemProfile make_item(const PopulationParams& p, std::uint64_t seed, ItemId id,
                             Epoch entry_epoch) {
  Rng rng = substream(seed, Stream::ItemProfile, id.value);
  ItemProfile it;
  it.id = id;
  it.entry_epoch = entry_epoch;
  it.content.resize(p.latent_dim);
  for (auto& x : it.content) x = rng.normal(0.0, p.factor_std);
  it.quality_offset = rng.normal(0.0, p.bias_std);
  it.lifespan = p.item_lifespan.sample(rng);
  return it;
}

struct Population {
  std::vector<UserProfile> users;
  std::vector<ItemProfile> items;
  GroundTruth truth;
};

inline Population generate_population(const PopulationParams& p, std::uint64_t seed) {
  p.validate();
  Population pop;
  pop.users.reserve(p.n_users);
  pop.items.reserve(p.n_items);
  for (std::uint32_t u = 0; u < p.n_users; ++u) pop.users.push_back(make_user(p, seed, UserId{u}, 0));
  for (std::uint32_t i = 0; i < p.n_items; ++i) pop.items.push_back(make_item(p, seed, ItemId{i}, 0));
  pop.truth.global_mean = p.resolved_global_mean();
  pop.truth.noise_std = p.noise_std;
  pop.truth.scale = p.scale;
  pop.truth.latent_dim = p.latent_dim;
  pop.truth.noise_seed = seed;
  return pop;
}

struct RatingRecord {
  UserId user;
  ItemId item;
  double observed = 0.0;
  double truth = 0.0;  // for metrics only; engines never read it
  Epoch epoch = 0;
  bool via_recommendation = false;
  std::optional<double> shown_prediction;

  bool operator==(const RatingRecord&) const = default;
};

// What an engine is allowed to see of a record.
struct Observation {
  UserId user;
  ItemId item;
  double value = 0.0;
};

// Append-only rating store indexed by user and by item.
class RatingDb {
 public:
  void append(const RatingRecord& r) {
    if (!pairs_.insert(key(r.user, r.item)).second)
      throw InvariantError("duplicate rating for user " + std::to_string(r.user.value) +
                           ", item " + std::to_string(r.item.value));
    if (r.epoch < 0) throw InvariantError("rating record with negative epoch");
    const auto idx = records_.size();
    records_.push_back(r);
    grow(by_user_, r.user.value).push_back(idx);
    grow(by_item_, r.item.value).push_back(idx);
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool contains(UserId u, ItemId i) const { return pairs_.contains(key(u, i)); }

  std::span<const RatingRecord> records() const { return records_; }

  std::span<const std::size_t> by_user(UserId u) const {
    return u.value < by_user_.size() ? std::span<const std::size_t>(by_user_[u.value])
                                     : std::span<const std::size_t>();
  }
  std::span<const std::size_t> by_item(ItemId i) const {
    return i.value < by_item_.size() ? std::span<const std::size_t>(by_item_[i.value])
                                     : std::span<const std::size_t>();
  }

  std::vector<Observation> observations() const {
    std::vector<Observation> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back({r.user, r.item, r.observed});
    return out;
  }

  bool operator==(const RatingDb& o) const { return records_ == o.records_; }

 private:
  static std::uint64_t key(UserId u, ItemId i) {
    return (static_cast<std::uint64_t>(u.value) << 32) | i.value;
  }
  static std::vector<std::size_t>& grow(std::vector<std::vector<std::size_t>>& index,
                                        std::uint32_t at) {
    if (index.size() <= at) index.resize(at + 1);
    return index[at];
  }

  std::vector<RatingRecord> records_;
  std::vector<std::vector<std::size_t>> by_user_;
  std::vector<std::vector<std::size_t>> by_item_;
  std::unordered_set<std::uint64_t> pairs_;
};

}  // namespace agentrec
