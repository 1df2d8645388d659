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

// The recommender engine: five algorithms behind one fit/predict/recommend
// contract. Engines train on observed ratings only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "agentrec/agents.hpp"
#include "agentrec/core.hpp"
#include "agentrec/domain.hpp"
#include "agentrec/metrics.hpp"
#include "agentrec/rng.hpp"

namespace agentrec {

enum class Algorithm { Random, MostPopular, UserKnn, FunkMf, HybridBlend };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Random: return "random";
    case Algorithm::MostPopular: return "most_popular";
    case Algorithm::UserKnn: return "user_knn";
    case Algorithm::FunkMf: return "funk_mf";
    case Algorithm::HybridBlend: return "hybrid_blend";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_string(std::string_view s) {
  for (auto a : {Algorithm::Random, Algorithm::MostPopular, Algorithm::UserKnn, Algorithm::FunkMf,
                 Algorithm::HybridBlend})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

struct UserKnnParams {
  std::size_t k = 20;
  std::size_t min_overlap = 2;
  bool operator==(const UserKnnParams&) const = default;
};

struct FunkMfParams {
  std::size_t latent_dim = 10;
  double learning_rate = 0.01;
  double regularization = 0.05;
  std::size_t epochs_per_fit = 20;
  double init_std = 0.1;
  bool operator==(const FunkMfParams&) const = default;
};

struct HybridBlendParams {
  double lambda = 0.5;
  Algorithm base = Algorithm::UserKnn;
  bool operator==(const HybridBlendParams&) const = default;
};

struct EngineConfig {
  Algorithm algorithm = Algorithm::UserKnn;
  RatingScale scale;
  double popularity_shrinkage = 5.0;
  UserKnnParams knn;
  FunkMfParams mf;
  HybridBlendParams hybrid;

  void validate() const {
    if (!(scale.min < scale.max)) throw ConfigError("rating scale is empty");
    if (!(popularity_shrinkage >= 0.0)) throw ConfigError("popularity_shrinkage must be non-negative");
    if (knn.k < 1) throw ConfigError("knn_k must be at least 1");
    if (knn.min_overlap < 1) throw ConfigError("knn_min_overlap must be at least 1");
    if (mf.latent_dim < 1) throw ConfigError("mf_latent_dim must be at least 1");
    if (!(mf.learning_rate > 0.0)) throw ConfigError("mf_learning_rate must be positive");
    if (!(mf.regularization >= 0.0)) throw ConfigError("mf_regularization must be non-negative");
    if (mf.epochs_per_fit < 1) throw ConfigError("mf_epochs must be at least 1");
    if (!(mf.init_std >= 0.0)) throw ConfigError("mf_init_std must be non-negative");
    if (!(hybrid.lambda >= 0.0 && hybrid.lambda <= 1.0))
      throw ConfigError("hybrid_lambda must lie in [0,1]");
    if (hybrid.base != Algorithm::UserKnn && hybrid.base != Algorithm::FunkMf)
      throw ConfigError("hybrid_base must be user_knn or funk_mf");
  }

  bool operator==(const EngineConfig&) const = default;
};

namespace detail {

inline double mean_or(std::span<const Observation> obs, double fallback) {
  if (obs.empty()) return fallback;
  double s = 0.0;
  for (const auto& o : obs) s += o.value;
  return s / static_cast<double>(obs.size());
}

template <class T>
T& at_grow(std::vector<T>& v, std::size_t i) {
  if (v.size() <= i) v.resize(i + 1);
  return v[i];
}

}  // namespace detail

// Seeded pseudo-random score per (user, item), fixed for the lifetime of a fit.
class RandomModel {
 public:
  RandomModel() = default;
  RandomModel(RatingScale scale, std::uint64_t salt) : scale_(scale), salt_(salt) {}

  double score(UserId u, ItemId i) const {
    const double unit = unit_from_bits(mix_seed({salt_, u.value, i.value}));
    return scale_.min + (scale_.max - scale_.min) * unit;
  }

 private:
  RatingScale scale_;
  std::uint64_t salt_ = 0;
};

// Item mean rating shrunk toward the global mean with weight n / (n + s).
class PopularityModel {
 public:
  PopularityModel() = default;
  PopularityModel(std::span<const Observation> obs, RatingScale scale, double shrinkage)
      : global_mean_(detail::mean_or(obs, scale.midpoint())), shrinkage_(shrinkage) {
    for (const auto& o : obs) {
      detail::at_grow(sum_, o.item.value) += o.value;
      detail::at_grow(count_, o.item.value) += 1;
    }
  }

  double score(ItemId i) const {
    const double n = static_cast<double>(count(i));
    if (n == 0.0) return global_mean_;
    const double mean = sum_[i.value] / n;
    return (n * mean + shrinkage_ * global_mean_) / (n + shrinkage_);
  }

  std::uint64_t count(ItemId i) const { return i.value < count_.size() ? count_[i.value] : 0; }
  double global_mean() const { return global_mean_; }

 private:
  double global_mean_ = 3.0;
  double shrinkage_ = 5.0;
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
};

// User-based neighbourhood CF. Similarity is Pearson correlation over
// co-rated items (means taken over the co-rated set); a neighbour is valid
// when it shares at least min_overlap items and correlates positively.
// Neighbours are visited by descending similarity, ties by ascending user id,
// and the first k who rated the target item contribute
//   r_u + sum sim * (r_vi - r_v) / sum |sim|.
class UserKnnModel {
 public:
  struct Neighbor {
    std::uint32_t user;
    double sim;
  };

  UserKnnModel() = default;

  UserKnnModel(std::span<const Observation> obs, RatingScale scale, UserKnnParams params)
      : params_(params), global_mean_(detail::mean_or(obs, scale.midpoint())) {
    for (const auto& o : obs) {
      detail::at_grow(ratings_, o.user.value).emplace_back(o.item.value, o.value);
      detail::at_grow(raters_, o.item.value).emplace_back(o.user.value, o.value);
    }
    user_mean_.assign(ratings_.size(), 0.0);
    for (std::size_t u = 0; u < ratings_.size(); ++u) {
      auto& r = ratings_[u];
      std::sort(r.begin(), r.end());
      double s = 0.0;
      for (const auto& [i, v] : r) s += v;
      if (!r.empty()) user_mean_[u] = s / static_cast<double>(r.size());
    }
    deviations_.resize(ratings_.size());
    for (std::size_t u = 0; u < ratings_.size(); ++u)
      for (const auto& [i, v] : ratings_[u]) deviations_[u].emplace_back(i, v - user_mean_[u]);
    item_mean_.assign(raters_.size(), 0.0);
    for (std::size_t i = 0; i < raters_.size(); ++i) {
      std::sort(raters_[i].begin(), raters_[i].end());
      double s = 0.0;
      for (const auto& [u, v] : raters_[i]) s += v;
      if (!raters_[i].empty()) item_mean_[i] = s / static_cast<double>(raters_[i].size());
    }
    build_neighbors();
  }

  double score(UserId u, ItemId i) const {
    if (!has_ratings(u)) return fallback(i);
    double num = 0.0, den = 0.0;
    std::size_t used = 0;
    for (const auto& nb : neighbors_[u.value]) {
      if (used == params_.k) break;
      const auto& r = ratings_[nb.user];
      auto it = std::lower_bound(r.begin(), r.end(), std::pair<std::uint32_t, double>(i.value, -HUGE_VAL));
      if (it == r.end() || it->first != i.value) continue;
      num += nb.sim * (it->second - user_mean_[nb.user]);
      den += nb.sim;
      ++used;
    }
    return used == 0 ? user_mean_[u.value] : user_mean_[u.value] + num / den;
  }

  // Same values as score(), accumulated neighbour by neighbour.
  void score_items(UserId u, std::span<const ItemId> items, std::span<double> out) const {
    if (!has_ratings(u)) {
      for (std::size_t k = 0; k < items.size(); ++k) out[k] = fallback(items[k]);
      return;
    }
    std::size_t max_id = raters_.size();
    for (auto i : items) max_id = std::max<std::size_t>(max_id, i.value + 1);
    std::vector<std::int32_t> slot(max_id, -1);
    for (std::size_t k = 0; k < items.size(); ++k) slot[items[k].value] = static_cast<std::int32_t>(k);
    std::vector<double> num(items.size(), 0.0), den(items.size(), 0.0);
    std::vector<std::size_t> used(items.size(), 0);
    std::size_t open = items.size();
    for (const auto& nb : neighbors_[u.value]) {
      for (const auto& [i, dev] : deviations_[nb.user]) {
        if (i >= max_id) continue;
        const auto s = slot[i];
        if (s < 0 || used[s] == params_.k) continue;
        num[s] += nb.sim * dev;
        den[s] += nb.sim;
        if (++used[s] == params_.k) --open;
      }
      if (open == 0) break;
    }
    const double base = user_mean_[u.value];
    for (std::size_t k = 0; k < items.size(); ++k)
      out[k] = used[k] == 0 ? base : base + num[k] / den[k];
  }

  std::span<const Neighbor> neighbors(UserId u) const {
    return u.value < neighbors_.size() ? std::span<const Neighbor>(neighbors_[u.value])
                                       : std::span<const Neighbor>();
  }

 private:
  bool has_ratings(UserId u) const { return u.value < ratings_.size() && !ratings_[u.value].empty(); }

  double fallback(ItemId i) const {
    if (i.value < raters_.size() && !raters_[i.value].empty()) return item_mean_[i.value];
    return global_mean_;
  }

  // Each pair is scored once, from the lower id, over co-rated items in
  // ascending item order.
  void build_neighbors() {
    neighbors_.assign(ratings_.size(), {});
    const std::size_t n_users = ratings_.size();
    std::vector<std::vector<std::pair<double, double>>> co(n_users);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t u = 0; u < n_users; ++u) {
      if (ratings_[u].empty()) continue;
      touched.clear();
      for (const auto& [i, x] : ratings_[u]) {
        const auto& raters = raters_[i];
        auto it = std::upper_bound(raters.begin(), raters.end(),
                                   std::pair<std::uint32_t, double>(u, HUGE_VAL));
        for (; it != raters.end(); ++it) {
          const auto v = it->first;
          if (co[v].empty()) touched.push_back(v);
          co[v].emplace_back(x, it->second);
        }
      }
      for (auto v : touched) {
        if (co[v].size() >= params_.min_overlap) {
          if (auto sim = pearson_pairs(co[v]); sim && *sim > 0.0) {
            neighbors_[u].push_back({v, *sim});
            neighbors_[v].push_back({u, *sim});
          }
        }
        co[v].clear();
      }
    }
    for (auto& list : neighbors_)
      std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.sim != b.sim ? a.sim > b.sim : a.user < b.user;
      });
  }

  static std::optional<double> pearson_pairs(std::span<const std::pair<double, double>> xy) {
    const double n = static_cast<double>(xy.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
      mx += x;
      my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [x, y] : xy) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
      syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  }

  UserKnnParams params_;
  double global_mean_ = 3.0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> ratings_;  // by user, item-sorted
  std::vector<std::vector<std::pair<std::uint32_t, double>>> raters_;   // by item
  std::vector<std::vector<std::pair<std::uint32_t, double>>> deviations_;  // r_vi - r_v
  std::vector<double> user_mean_;
  std::vector<double> item_mean_;
  std::vector<std::vector<Neighbor>> neighbors_;
};

// Parameters of a biased matrix factorization, indexed by raw id. Ids the
// model has never seen read as zero.
struct FunkMfParameters {
  double global_mean = 0.0;
  std::vector<double> user_bias;
  std::vector<double> item_bias;
  std::vector<std::vector<double>> user_factors;
  std::vector<std::vector<double>> item_factors;

  double predict(UserId u, ItemId i) const {
    double r = global_mean;
    const bool ku = u.value < user_bias.size();
    const bool ki = i.value < item_bias.size();
    if (ku) r += user_bias[u.value];
    if (ki) r += item_bias[i.value];
    if (ku && ki) {
      const auto& p = user_factors[u.value];
      const auto& q = item_factors[i.value];
      for (std::size_t k = 0; k < p.size(); ++k) r += p[k] * q[k];
    }
    return r;
  }
};

// 1/2 sum over observations of e^2 + reg * (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2),
// the objective the SGD below descends one observation at a time.
inline double funk_mf_loss(const FunkMfParameters& m, std::span<const Observation> obs, double reg) {
  double loss = 0.0;
  for (const auto& o : obs) {
    const double e = o.value - m.predict(o.user, o.item);
    double norm = m.user_bias[o.user.value] * m.user_bias[o.user.value] +
                  m.item_bias[o.item.value] * m.item_bias[o.item.value];
    for (double x : m.user_factors[o.user.value]) norm += x * x;
    for (double x : m.item_factors[o.item.value]) norm += x * x;
    loss += 0.5 * (e * e + reg * norm);
  }
  return loss;
}

inline FunkMfParameters funk_mf_gradient(const FunkMfParameters& m, std::span<const Observation> obs,
                                         double reg) {
  FunkMfParameters g = m;
  g.global_mean = 0.0;
  std::fill(g.user_bias.begin(), g.user_bias.end(), 0.0);
  std::fill(g.item_bias.begin(), g.item_bias.end(), 0.0);
  for (auto& f : g.user_factors) std::fill(f.begin(), f.end(), 0.0);
  for (auto& f : g.item_factors) std::fill(f.begin(), f.end(), 0.0);
  for (const auto& o : obs) {
    const auto u = o.user.value;
    const auto i = o.item.value;
    const double e = o.value - m.predict(o.user, o.item);
    g.user_bias[u] += -e + reg * m.user_bias[u];
    g.item_bias[i] += -e + reg * m.item_bias[i];
    const auto& p = m.user_factors[u];
    const auto& q = m.item_factors[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      g.user_factors[u][k] += -e * q[k] + reg * p[k];
      g.item_factors[i][k] += -e * p[k] + reg * q[k];
    }
  }
  return g;
}

class FunkMfModel {
 public:
  FunkMfModel() = default;

  FunkMfModel(std::span<const Observation> obs, RatingScale scale, const FunkMfParams& params, Rng& rng) {
    auto& m = params_;
    m.global_mean = detail::mean_or(obs, scale.midpoint());
    std::size_t n_users = 0, n_items = 0;
    for (const auto& o : obs) {
      n_users = std::max<std::size_t>(n_users, o.user.value + 1);
      n_items = std::max<std::size_t>(n_items, o.item.value + 1);
    }
    std::vector<bool> seen_user(n_users, false), seen_item(n_items, false);
    for (const auto& o : obs) {
      seen_user[o.user.value] = true;
      seen_item[o.item.value] = true;
    }
    m.user_bias.assign(n_users, 0.0);
    m.item_bias.assign(n_items, 0.0);
    m.user_factors.assign(n_users, std::vector<double>(params.latent_dim, 0.0));
    m.item_factors.assign(n_items, std::vector<double>(params.latent_dim, 0.0));
    for (std::size_t u = 0; u < n_users; ++u)
      if (seen_user[u])
        for (auto& x : m.user_factors[u]) x = rng.normal(0.0, params.init_std);
    for (std::size_t i = 0; i < n_items; ++i)
      if (seen_item[i])
        for (auto& x : m.item_factors[i]) x = rng.normal(0.0, params.init_std);

    std::vector<std::size_t> order(obs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const double lr = params.learning_rate;
    const double reg = params.regularization;
    for (std::size_t epoch = 0; epoch < params.epochs_per_fit; ++epoch) {
      rng.shuffle(std::span<std::size_t>(order));
      for (auto idx : order) {
        const auto& o = obs[idx];
        const auto u = o.user.value;
        const auto i = o.item.value;
        const double e = o.value - m.predict(o.user, o.item);
        m.user_bias[u] += lr * (e - reg * m.user_bias[u]);
        m.item_bias[i] += lr * (e - reg * m.item_bias[i]);
        auto& p = m.user_factors[u];
        auto& q = m.item_factors[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
          const double pk = p[k];
          p[k] += lr * (e * q[k] - reg * pk);
          q[k] += lr * (e * pk - reg * q[k]);
        }
      }
      loss_history_.push_back(funk_mf_loss(m, obs, reg));
    }
    for (double l : loss_history_)
      if (!std::isfinite(l)) throw ModelError("funk_mf diverged; lower mf_learning_rate");
  }

  double score(UserId u, ItemId i) const { return params_.predict(u, i); }
  const FunkMfParameters& parameters() const { return params_; }
  std::span<const double> loss_history() const { return loss_history_; }

 private:
  FunkMfParameters params_;
  std::vector<double> loss_history_;
};

// Ranks by lambda * personalized + (1 - lambda) * popularity, both min-max
// normalized over the candidate set; predictions come from the base model.
class HybridModel {
 public:
  HybridModel() = default;
  HybridModel(std::variant<UserKnnModel, FunkMfModel> base, PopularityModel pop, double lambda)
      : base_(std::move(base)), pop_(std::move(pop)), lambda_(lambda) {}

  double score(UserId u, ItemId i) const {
    return std::visit([&](const auto& m) { return m.score(u, i); }, base_);
  }

  void personalized_scores(UserId u, std::span<const ItemId> items, std::span<double> out) const {
    if (const auto* knn = std::get_if<UserKnnModel>(&base_)) {
      knn->score_items(u, items, out);
      return;
    }
    const auto& mf = std::get<FunkMfModel>(base_);
    for (std::size_t k = 0; k < items.size(); ++k) out[k] = mf.score(u, items[k]);
  }

  const PopularityModel& popularity() const { return pop_; }
  double lambda() const { return lambda_; }

 private:
  std::variant<UserKnnModel, FunkMfModel> base_;
  PopularityModel pop_;
  double lambda_ = 0.5;
};

struct AccuracyReport {
  double rmse = 0.0;
  double mae = 0.0;
};

struct HoldoutEntry {
  UserId user;
  ItemId item;
  double truth = 0.0;
};

class Engine {
 public:
  using Model = std::variant<std::monostate, RandomModel, PopularityModel, UserKnnModel, FunkMfModel,
                             HybridModel>;

  // An unfitted engine; every query throws UsageError until fit().
  Engine() = default;

  static Engine fit(const EngineConfig& config, const RatingDb& db, Rng& rng, Epoch fitted_at = 0) {
    config.validate();
    Engine e;
    e.config_ = config;
    e.fitted_at_ = fitted_at;
    e.training_size_ = db.size();
    const auto obs = db.observations();
    auto personalized = [&](Algorithm a) -> std::variant<UserKnnModel, FunkMfModel> {
      if (a == Algorithm::UserKnn) return UserKnnModel(obs, config.scale, config.knn);
      return FunkMfModel(obs, config.scale, config.mf, rng);
    };
    switch (config.algorithm) {
      case Algorithm::Random:
        e.model_ = RandomModel(config.scale, rng.next());
        break;
      case Algorithm::MostPopular:
        e.model_ = PopularityModel(obs, config.scale, config.popularity_shrinkage);
        break;
      case Algorithm::UserKnn:
        e.model_ = UserKnnModel(obs, config.scale, config.knn);
        break;
      case Algorithm::FunkMf:
        e.model_ = FunkMfModel(obs, config.scale, config.mf, rng);
        break;
      case Algorithm::HybridBlend:
        e.model_ = HybridModel(personalized(config.hybrid.base),
                               PopularityModel(obs, config.scale, config.popularity_shrinkage),
                               config.hybrid.lambda);
        break;
    }
    return e;
  }

  bool fitted() const { return !std::holds_alternative<std::monostate>(model_); }
  Algorithm algorithm() const { return config_.algorithm; }
  const EngineConfig& config() const { return config_; }
  Epoch fitted_at_epoch() const { return fitted_at_; }
  std::size_t training_db_size() const { return training_size_; }
  const Model& model() const { return model_; }

  // Predicted rating, clamped to the scale.
  double predict(UserId u, ItemId i) const { return config_.scale.clamp(raw_score(u, i)); }

  // Up to n active, non-excluded items by descending ranking score, ties by
  // ascending item id. The displayed rating is always predict(u, i).
  RecList recommend(UserId u, std::size_t n, const ItemSet& exclusions,
                    std::span<const ItemId> active_items) const {
    require_fitted();
    if (n < 1) throw UsageError("recommend: list length must be at least 1");
    std::vector<ItemId> cand;
    cand.reserve(active_items.size());
    for (auto i : active_items)
      if (!exclusions.contains(i)) cand.push_back(i);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::vector<double> personal(cand.size());
    personalized_scores(u, cand, personal);
    std::vector<double> rank_score = personal;
    if (const auto* h = std::get_if<HybridModel>(&model_)) {
      std::vector<double> pop(cand.size());
      for (std::size_t k = 0; k < cand.size(); ++k) pop[k] = h->popularity().score(cand[k]);
      normalize(personal, rank_score);
      std::vector<double> pop_norm(cand.size());
      normalize(pop, pop_norm);
      for (std::size_t k = 0; k < cand.size(); ++k)
        rank_score[k] = h->lambda() * rank_score[k] + (1.0 - h->lambda()) * pop_norm[k];
    }

    std::vector<std::size_t> order(cand.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    const auto take = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (rank_score[a] != rank_score[b]) return rank_score[a] > rank_score[b];
                        return cand[a] < cand[b];
                      });
    RecList out;
    out.reserve(take);
    for (std::size_t k = 0; k < take; ++k)
      out.push_back({cand[order[k]], config_.scale.clamp(personal[order[k]])});
    return out;
  }

  AccuracyReport assess(std::span<const HoldoutEntry> holdout) const {
    require_fitted();
    if (holdout.empty()) throw UsageError("assess: empty holdout");
    std::vector<PredictionPair> pairs;
    pairs.reserve(holdout.size());
    for (const auto& h : holdout) pairs.push_back({predict(h.user, h.item), h.truth});
    return {agentrec::rmse(pairs), agentrec::mae(pairs)};
  }

 private:
  void require_fitted() const {
    if (!fitted()) throw UsageError("engine used before fit");
  }

  double raw_score(UserId u, ItemId i) const {
    require_fitted();
    return std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, std::monostate>) {
            return 0.0;
          } else if constexpr (std::is_same_v<M, PopularityModel>) {
            return m.score(i);
          } else {
            return m.score(u, i);
          }
        },
        model_);
  }

  void personalized_scores(UserId u, std::span<const ItemId> items, std::span<double> out) const {
    if (const auto* knn = std::get_if<UserKnnModel>(&model_)) {
      knn->score_items(u, items, out);
    } else if (const auto* h = std::get_if<HybridModel>(&model_)) {
      h->personalized_scores(u, items, out);
    } else {
      for (std::size_t k = 0; k < items.size(); ++k) out[k] = raw_score(u, items[k]);
    }
  }

  // Min-max to [0, 1]; a constant vector maps to all zeros.
  static void normalize(std::span<const double> in, std::span<double> out) {
    if (in.empty()) return;
    const auto [lo, hi] = std::minmax_element(in.begin(), in.end());
    const double span = *hi - *lo;
    for (std::size_t k = 0; k < in.size(); ++k) out[k] = span > 0.0 ? (in[k] - *lo) / span : 0.0;
  }

  EngineConfig config_;
  Model model_;
  Epoch fitted_at_ = 0;
  std::size_t training_size_ = 0;
};

}  // namespace agentrec
