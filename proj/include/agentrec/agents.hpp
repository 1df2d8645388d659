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

// Per-epoch user behaviour: activity, item choice, rating formation, feedback.

#include <concepts>
#include <optional>
#include <span>
#include <vector>

#include "agentrec/core.hpp"
#include "agentrec/domain.hpp"

namespace agentrec {

template <class P>
concept HasLifespan = requires(const P& p) {
  { p.entry_epoch } -> std::convertible_to<Epoch>;
  { p.lifespan } -> std::convertible_to<Epoch>;
};

// Active on the half-open window [entry, entry + lifespan).
template <HasLifespan P>
bool is_active(const P& profile, Epoch epoch) {
  return profile.entry_epoch <= epoch && epoch < profile.entry_epoch + profile.lifespan;
}

// Anything that yields uniforms on [0, 1).
template <class R>
concept UniformSource = requires(R& r) {
  { r.uniform() } -> std::convertible_to<double>;
};

struct RecEntry {
  ItemId item;
  double predicted = 0.0;  // the rating shown next to the item
  bool operator==(const RecEntry&) const = default;
};

using RecList = std::vector<RecEntry>;

struct OrganicCandidate {
  ItemId item;
  std::uint64_t consumption_count = 0;
};

struct ConsumptionEvent {
  UserId user;
  ItemId item;
  Epoch epoch = 0;
  bool via_recommendation = false;
  std::optional<double> shown_prediction;
  bool operator==(const ConsumptionEvent&) const = default;
};

enum class WithinListChoice { RankDiscounted, Uniform };

namespace detail {

// Inverse-CDF pick over non-negative weights; `u` in [0, 1).
inline std::size_t pick_weighted(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (target < acc) return k;
  }
  return weights.size() - 1;
}

}  // namespace detail

// Draw order is fixed: one strategy draw, then one pool draw. The strategy draw
// is consumed even when the strategy is degenerate, which makes RecFollowing
// and Mixed(1) (and Organic and Mixed(0)) identical event for event.
//
// Both pools must already exclude the user's consumed items.
template <UniformSource R>
std::optional<ConsumptionEvent> choose_item(
    const UserProfile& user, std::span<const RecEntry> rec_list,
    std::span<const OrganicCandidate> organic_pool, Epoch epoch, R& rng,
    WithinListChoice within_list = WithinListChoice::RankDiscounted) {
  const double strategy_draw = rng.uniform();
  bool from_recs = strategy_draw < user.choice.rec_probability();
  if (from_recs && rec_list.empty()) from_recs = false;
  if (!from_recs && organic_pool.empty()) from_recs = true;
  if (from_recs && rec_list.empty()) return std::nullopt;

  const double pool_draw = rng.uniform();
  ConsumptionEvent ev;
  ev.user = user.id;
  ev.epoch = epoch;
  ev.via_recommendation = from_recs;
  if (from_recs) {
    std::vector<double> w(rec_list.size());
    for (std::size_t r = 0; r < w.size(); ++r)
      w[r] = within_list == WithinListChoice::RankDiscounted ? 1.0 / static_cast<double>(r + 1)
                                                              : 1.0;
    const auto& picked = rec_list[detail::pick_weighted(w, pool_draw)];
    ev.item = picked.item;
    ev.shown_prediction = picked.predicted;
  } else {
    std::vector<double> w(organic_pool.size());
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] = 1.0 + static_cast<double>(organic_pool[k].consumption_count);
    ev.item = organic_pool[detail::pick_weighted(w, pool_draw)].item;
  }
  return ev;
}

// clamp(a * true + (1 - a) * shown + noise), or clamp(true + noise) when no
// prediction was displayed.
inline double observed_rating(double true_r, std::optional<double> shown, double anchor_weight,
                              double noise_draw, const RatingScale& scale) {
  if (!shown) return scale.clamp(true_r + noise_draw);
  return scale.clamp(anchor_weight * true_r + (1.0 - anchor_weight) * *shown + noise_draw);
}

template <UniformSource R>
bool gives_feedback(const UserProfile& user, R& rng) {
  return rng.uniform() < user.feedback_prob;
}

}  // namespace agentrec
