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

// Discrete-time scheduler: bootstrap, then per epoch
//   consume -> rate -> feedback -> churn -> refit -> recommend -> measure.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentrec/agents.hpp"
#include "agentrec/core.hpp"
#include "agentrec/domain.hpp"
#include "agentrec/metrics.hpp"
#include "agentrec/recommenders.hpp"
#include "agentrec/rng.hpp"

namespace agentrec {

struct Scenario {
  std::uint64_t seed = 1;
  Epoch horizon = 50;
  PopulationParams population;
  EngineConfig engine;  // its rating scale is taken from `population`
  double observation_noise_std = 0.1;
  bool round_ratings = false;
  std::size_t bootstrap_ratings_per_user = 10;
  bool churn_replacement = true;
  std::size_t rec_list_length = 10;
  Epoch retrain_every = 1;
  std::size_t holdout_size = 500;
  std::size_t consumptions_per_epoch = 1;
  WithinListChoice within_list = WithinListChoice::RankDiscounted;

  EngineConfig engine_config() const {
    EngineConfig c = engine;
    c.scale = population.scale;
    return c;
  }

  void validate() const {
    population.validate();
    engine_config().validate();
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (rec_list_length < 1) throw ConfigError("rec_list_length must be at least 1");
    if (retrain_every < 1) throw ConfigError("retrain_every must be at least 1");
    if (consumptions_per_epoch < 1) throw ConfigError("consumptions_per_epoch must be at least 1");
    if (!(observation_noise_std >= 0.0)) throw ConfigError("observation_noise_std must be non-negative");
  }

  bool operator==(const Scenario&) const = default;
};

enum class EventType { Bootstrap, Consume, Feedback, RetireUser, RetireItem, SpawnUser, SpawnItem };

struct Event {
  EventType type = EventType::Consume;
  Epoch epoch = 0;
  std::optional<UserId> user;
  std::optional<ItemId> item;
  bool via_recommendation = false;
  std::optional<double> shown_prediction;
  std::optional<double> observed;
  std::optional<double> truth;

  bool operator==(const Event&) const = default;
};

using EventSink = std::function<void(const Event&)>;

struct ConsumptionHistory {
  ItemSet items;
  std::vector<ItemId> order;
  double pairwise_distance_sum = 0.0;
};

struct SimState {
  Scenario scenario;
  Epoch epoch = 0;
  std::vector<UserProfile> users;  // indexed by id, retired users included
  std::vector<ItemProfile> items;
  GroundTruth truth;
  RatingDb db;
  Engine engine;
  std::vector<RecList> current_recs;  // by user id; empty for inactive users
  std::vector<ConsumptionHistory> history;  // by user id
  std::vector<std::uint64_t> consumption_count;  // by item id
  std::vector<UserId> active_users;  // ascending
  std::vector<ItemId> active_items;  // ascending
  std::vector<Event> bootstrap_events;
};

struct EpochLog {
  Epoch epoch = 0;
  std::vector<Event> events;
  MetricRow metrics;
};

namespace detail {

// Cosine distance, 1 - cos(a, b); zero vectors are at distance 0 from each other
// and 1 from everything else.
inline double content_distance(const ItemProfile& a, const ItemProfile& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.content.size(); ++k) {
    dot += a.content[k] * b.content[k];
    na += a.content[k] * a.content[k];
    nb += b.content[k] * b.content[k];
  }
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot / std::sqrt(na * nb);
}

inline void record_consumption(SimState& s, UserId u, ItemId i) {
  auto& h = s.history[u.value];
  if (!h.items.insert(i).second)
    throw InvariantError("user " + std::to_string(u.value) + " consumed item " +
                         std::to_string(i.value) + " twice");
  for (auto prev : h.order)
    h.pairwise_distance_sum += content_distance(s.items[prev.value], s.items[i.value]);
  h.order.push_back(i);
  ++s.consumption_count[i.value];
}

inline std::vector<OrganicCandidate> organic_pool(const SimState& s, UserId u,
                                                  std::span<const std::uint64_t> counts,
                                                  const ItemSet& also_excluded) {
  std::vector<OrganicCandidate> pool;
  pool.reserve(s.active_items.size());
  const auto& mine = s.history[u.value].items;
  for (auto i : s.active_items)
    if (!mine.contains(i) && !also_excluded.contains(i)) pool.push_back({i, counts[i.value]});
  return pool;
}

inline double finalize_rating(const Scenario& sc, double r) {
  return sc.round_ratings ? sc.population.scale.clamp(std::round(r)) : r;
}

inline void refresh_recommendations(SimState& s) {
  for (auto& l : s.current_recs) l.clear();
  s.current_recs.resize(s.users.size());
  for (auto u : s.active_users)
    s.current_recs[u.value] = s.engine.recommend(u, s.scenario.rec_list_length,
                                                 s.history[u.value].items, s.active_items);
}

inline std::vector<HoldoutEntry> sample_holdout(const SimState& s, Epoch t) {
  std::vector<HoldoutEntry> out;
  if (s.active_users.empty() || s.active_items.empty()) return out;
  Rng rng = substream(s.scenario.seed, Stream::Holdout, static_cast<std::uint64_t>(t));
  const std::size_t want = s.scenario.holdout_size;
  std::size_t attempts = 0;
  while (out.size() < want && attempts < 20 * want) {
    ++attempts;
    const auto u = s.active_users[rng.below(s.active_users.size())];
    const auto i = s.active_items[rng.below(s.active_items.size())];
    if (s.history[u.value].items.contains(i)) continue;
    out.push_back({u, i, true_rating(s.users[u.value], s.items[i.value], s.truth)});
  }
  return out;
}

}  // namespace detail

// `popularity_before` holds per-item consumption counts at the start of the
// measured epoch; recommendation frequency is taken from the lists just built.
inline MetricRow measure(const SimState& s, Epoch t, std::span<const std::uint64_t> popularity_before) {
  MetricRow row;
  row.epoch = t;
  row.db_size = s.db.size();
  row.active_users = s.active_users.size();
  row.active_items = s.active_items.size();

  const auto holdout = detail::sample_holdout(s, t);
  if (!holdout.empty()) {
    const auto acc = s.engine.assess(holdout);
    row.rmse = acc.rmse;
    row.mae = acc.mae;
  }

  std::vector<std::uint64_t> consumed, prev, recs;
  std::vector<std::uint64_t> rec_count(s.items.size(), 0);
  std::vector<std::vector<ItemId>> lists;
  std::vector<ItemId> recommended;
  for (auto u : s.active_users) {
    std::vector<ItemId> l;
    for (const auto& e : s.current_recs[u.value]) {
      l.push_back(e.item);
      ++rec_count[e.item.value];
      recommended.push_back(e.item);
    }
    lists.push_back(std::move(l));
  }
  for (auto i : s.active_items) {
    consumed.push_back(s.consumption_count[i.value]);
    prev.push_back(i.value < popularity_before.size() ? popularity_before[i.value] : 0);
    recs.push_back(rec_count[i.value]);
  }
  auto any_positive = [](const std::vector<std::uint64_t>& v) {
    for (auto x : v)
      if (x > 0) return true;
    return false;
  };
  if (any_positive(consumed)) {
    row.gini_consumption = gini(consumed);
    row.top_share = top_share(consumed, 0.1);
  }
  if (any_positive(recs)) row.gini_recommendation = gini(recs);
  if (!s.active_items.empty()) row.catalog_coverage = catalog_coverage(recommended, s.active_items);
  row.popularity_lift = popularity_lift(prev, recs);
  row.personalization_level = personalization_level(lists);

  double div = 0.0;
  std::size_t n_div = 0;
  for (auto u : s.active_users) {
    const auto& h = s.history[u.value];
    const double m = static_cast<double>(h.order.size());
    if (m < 2) continue;
    div += h.pairwise_distance_sum / (0.5 * m * (m - 1.0));
    ++n_div;
  }
  if (n_div > 0) row.mean_consumption_diversity = div / static_cast<double>(n_div);
  return row;
}

inline SimState initialize(const Scenario& scenario) {
  scenario.validate();
  SimState s;
  s.scenario = scenario;
  auto pop = generate_population(scenario.population, scenario.seed);
  s.users = std::move(pop.users);
  s.items = std::move(pop.items);
  s.truth = pop.truth;
  s.history.resize(s.users.size());
  s.current_recs.resize(s.users.size());
  s.consumption_count.assign(s.items.size(), 0);
  for (const auto& u : s.users)
    if (is_active(u, 0)) s.active_users.push_back(u.id);
  for (const auto& i : s.items)
    if (is_active(i, 0)) s.active_items.push_back(i.id);

  // Organic warm-up; feedback is always given so the engine has data to fit.
  const auto& sc = s.scenario;
  for (auto uid : s.active_users) {
    UserProfile browsing = s.users[uid.value];
    browsing.choice = ChoiceStrategy::organic();
    Rng rng = substream(sc.seed, Stream::Bootstrap, uid.value);
    for (std::size_t b = 0; b < sc.bootstrap_ratings_per_user; ++b) {
      const auto pool = detail::organic_pool(s, uid, s.consumption_count, {});
      const auto ev = choose_item(browsing, {}, pool, 0, rng, sc.within_list);
      if (!ev) break;
      const double truth = true_rating(s.users[uid.value], s.items[ev->item.value], s.truth);
      const double noise = rng.normal(0.0, sc.observation_noise_std);
      const double observed = detail::finalize_rating(
          sc, observed_rating(truth, std::nullopt, browsing.anchor_weight, noise, sc.population.scale));
      detail::record_consumption(s, uid, ev->item);
      s.db.append({uid, ev->item, observed, truth, 0, false, std::nullopt});
      s.bootstrap_events.push_back(
          {EventType::Bootstrap, 0, uid, ev->item, false, std::nullopt, observed, truth});
    }
  }

  Rng engine_rng = substream(sc.seed, Stream::Engine, 0, 1);
  s.engine = Engine::fit(sc.engine_config(), s.db, engine_rng, 0);
  detail::refresh_recommendations(s);
  return s;
}

inline Event lifecycle_event(EventType type, Epoch epoch, std::optional<UserId> user,
                             std::optional<ItemId> item) {
  Event e;
  e.type = type;
  e.epoch = epoch;
  e.user = user;
  e.item = item;
  return e;
}

// Retires users and items whose window closed before `next_epoch` and, with
// replacement on, spawns as many fresh ones entering at `next_epoch`.
inline std::vector<Event> churn(SimState& s, Epoch next_epoch) {
  std::vector<Event> events;
  const auto& sc = s.scenario;

  std::vector<UserId> users;
  std::size_t retired_users = 0;
  for (auto u : s.active_users) {
    if (is_active(s.users[u.value], next_epoch)) {
      users.push_back(u);
    } else {
      ++retired_users;
      events.push_back(lifecycle_event(EventType::RetireUser, next_epoch, u, std::nullopt));
      s.current_recs[u.value].clear();
    }
  }
  std::vector<ItemId> items;
  std::size_t retired_items = 0;
  for (auto i : s.active_items) {
    if (is_active(s.items[i.value], next_epoch)) {
      items.push_back(i);
    } else {
      ++retired_items;
      events.push_back(lifecycle_event(EventType::RetireItem, next_epoch, std::nullopt, i));
    }
  }
  if (sc.churn_replacement) {
    for (std::size_t k = 0; k < retired_users; ++k) {
      const UserId id{static_cast<std::uint32_t>(s.users.size())};
      s.users.push_back(make_user(sc.population, sc.seed, id, next_epoch));
      s.history.emplace_back();
      s.current_recs.emplace_back();
      users.push_back(id);
      events.push_back(lifecycle_event(EventType::SpawnUser, next_epoch, id, std::nullopt));
    }
    for (std::size_t k = 0; k < retired_items; ++k) {
      const ItemId id{static_cast<std::uint32_t>(s.items.size())};
      s.items.push_back(make_item(sc.population, sc.seed, id, next_epoch));
      s.consumption_count.push_back(0);
      items.push_back(id);
      events.push_back(lifecycle_event(EventType::SpawnItem, next_epoch, std::nullopt, id));
    }
  }
  s.active_users = std::move(users);
  s.active_items = std::move(items);
  return events;
}

inline EpochLog step(SimState& s) {
  const Epoch t = s.epoch;
  const auto& sc = s.scenario;
  if (t >= sc.horizon) throw UsageError("step past the horizon");
  EpochLog log;
  log.epoch = t;
  const std::size_t db_before = s.db.size();

  // Agents decide against the popularity snapshot taken at epoch start, each
  // from its own (user, epoch) stream, so decisions do not depend on the
  // order users are visited; commits happen in ascending user id.
  const std::vector<std::uint64_t> popularity_before = s.consumption_count;
  for (auto uid : s.active_users) {
    const auto& user = s.users[uid.value];
    Rng rng = substream(sc.seed, Stream::Agent, uid.value, static_cast<std::uint64_t>(t));
    if (!(rng.uniform() < user.activity_prob)) continue;
    ItemSet taken_now;
    for (std::size_t c = 0; c < sc.consumptions_per_epoch; ++c) {
      RecList recs;
      for (const auto& e : s.current_recs[uid.value])
        if (!taken_now.contains(e.item)) recs.push_back(e);
      const auto pool = detail::organic_pool(s, uid, popularity_before, taken_now);
      const auto ev = choose_item(user, recs, pool, t, rng, sc.within_list);
      if (!ev) break;
      const double truth = true_rating(user, s.items[ev->item.value], s.truth);
      const double noise = rng.normal(0.0, sc.observation_noise_std);
      const double observed = detail::finalize_rating(
          sc, observed_rating(truth, ev->shown_prediction, user.anchor_weight, noise,
                              sc.population.scale));
      const bool feedback = gives_feedback(user, rng);

      taken_now.insert(ev->item);
      detail::record_consumption(s, uid, ev->item);
      log.events.push_back({EventType::Consume, t, uid, ev->item, ev->via_recommendation,
                            ev->shown_prediction, std::nullopt, std::nullopt});
      if (feedback) {
        s.db.append({uid, ev->item, observed, truth, t, ev->via_recommendation, ev->shown_prediction});
        log.events.push_back({EventType::Feedback, t, uid, ev->item, ev->via_recommendation,
                              ev->shown_prediction, observed, truth});
      }
    }
  }

  const Epoch next = t + 1;
  auto churned = churn(s, next);
  log.events.insert(log.events.end(), churned.begin(), churned.end());

  if (t % sc.retrain_every == 0) {
    Rng engine_rng = substream(sc.seed, Stream::Engine, static_cast<std::uint64_t>(t));
    s.engine = Engine::fit(sc.engine_config(), s.db, engine_rng, t);
  }
  detail::refresh_recommendations(s);

  if (s.db.size() < db_before) throw InvariantError("rating database shrank");
  log.metrics = measure(s, t, popularity_before);
  s.epoch = next;
  return log;
}

struct RunResult {
  Scenario scenario;
  std::uint64_t seed = 0;
  std::vector<MetricRow> metrics;
  std::vector<Event> events;

  bool operator==(const RunResult&) const = default;
};

// Runs initialize + horizon steps. With a sink, events are streamed to it and
// not retained in the result.
inline RunResult run(const Scenario& scenario, const EventSink& sink = {}) {
  RunResult result;
  result.scenario = scenario;
  result.seed = scenario.seed;
  auto emit = [&](const Event& e) {
    if (sink) {
      sink(e);
    } else {
      result.events.push_back(e);
    }
  };
  SimState s = initialize(scenario);
  for (const auto& e : s.bootstrap_events) emit(e);
  s.bootstrap_events.clear();
  result.metrics.reserve(static_cast<std::size_t>(scenario.horizon));
  for (Epoch t = 0; t < scenario.horizon; ++t) {
    auto log = step(s);
    for (const auto& e : log.events) emit(e);
    result.metrics.push_back(log.metrics);
  }
  return result;
}

// Consistency checks over a state; returns one message per violation.
inline std::vector<std::string> audit(const SimState& s) {
  std::vector<std::string> problems;
  for (const auto& r : s.db.records()) {
    if (!s.history[r.user.value].items.contains(r.item))
      problems.push_back("rating without consumption: user " + std::to_string(r.user.value));
    if (!s.scenario.population.scale.contains(r.observed) ||
        !s.scenario.population.scale.contains(r.truth))
      problems.push_back("rating outside scale: user " + std::to_string(r.user.value));
  }
  for (std::size_t u = 0; u < s.history.size(); ++u)
    if (s.history[u].items.size() != s.history[u].order.size())
      problems.push_back("repeat consumption by user " + std::to_string(u));
  ItemSet active(s.active_items.begin(), s.active_items.end());
  for (auto u : s.active_users) {
    for (const auto& e : s.current_recs[u.value]) {
      if (!active.contains(e.item))
        problems.push_back("inactive item recommended to user " + std::to_string(u.value));
      if (s.history[u.value].items.contains(e.item))
        problems.push_back("consumed item recommended to user " + std::to_string(u.value));
      if (!s.scenario.population.scale.contains(e.predicted))
        problems.push_back("displayed prediction outside scale");
    }
  }
  return problems;
}

}  // namespace agentrec
