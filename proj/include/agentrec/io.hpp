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

// Scenario files and run artifacts: strict JSON scenario parsing, the
// metrics.csv / events.jsonl / manifest.json writers, and RunResult JSON.

#include <charconv>
#include <chrono>
#include <ctime>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "agentrec/simulation.hpp"
#include "json.hpp"

namespace agentrec {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

class ScenarioError : public ConfigError {
 public:
  enum class Kind { MissingFile, Syntax, UnknownKey, MissingKey, BadType, OutOfRange };

  ScenarioError(Kind kind, std::string key, const std::string& what)
      : ConfigError(what), kind_(kind), key_(std::move(key)) {}

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] inline void bad_type(const std::string& key, const char* expected) {
  throw ScenarioError(ScenarioError::Kind::BadType, key, "scenario key '" + key + "': expected " + expected);
}

[[noreturn]] inline void out_of_range(const std::string& key, const std::string& rule) {
  throw ScenarioError(ScenarioError::Kind::OutOfRange, key, "scenario key '" + key + "': " + rule);
}

inline double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) bad_type(key, "a number");
  return v.get<double>();
}

inline std::uint64_t as_count(const std::string& key, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    out_of_range(key, "must be non-negative");
  }
  bad_type(key, "a non-negative integer");
}

inline std::uint64_t as_positive(const std::string& key, const json& v) {
  const auto n = as_count(key, v);
  if (n < 1) out_of_range(key, "must be at least 1");
  return n;
}

inline double as_probability(const std::string& key, const json& v) {
  const double p = as_number(key, v);
  if (!(p >= 0.0 && p <= 1.0)) out_of_range(key, "must lie in [0,1]");
  return p;
}

inline double as_non_negative(const std::string& key, const json& v) {
  const double x = as_number(key, v);
  if (!(x >= 0.0)) out_of_range(key, "must be non-negative");
  return x;
}

inline double as_positive_real(const std::string& key, const json& v) {
  const double x = as_number(key, v);
  if (!(x > 0.0)) out_of_range(key, "must be positive");
  return x;
}

inline bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad_type(key, "true or false");
  return v.get<bool>();
}

inline std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string_view choice_name(ChoiceStrategy::Kind k) {
  switch (k) {
    case ChoiceStrategy::Kind::RecFollowing: return "rec_following";
    case ChoiceStrategy::Kind::Organic: return "organic";
    case ChoiceStrategy::Kind::Mixed: return "mixed";
  }
  return "?";
}

struct ScenarioKey {
  const char* name;
  bool required;
  std::function<void(Scenario&, const std::string&, const json&)> set;
  std::function<json(const Scenario&)> get;
};

inline Algorithm as_algorithm(const std::string& key, const json& v) {
  const auto a = algorithm_from_string(as_string(key, v));
  if (!a)
    out_of_range(key, "must be one of random, most_popular, user_knn, funk_mf, hybrid_blend");
  return *a;
}

// The scenario schema. Order here is the order keys are written back out.
inline const std::vector<ScenarioKey>& scenario_keys() {
  using S = Scenario;
  using K = const std::string&;
  using J = const json&;
  static const std::vector<ScenarioKey> keys = {
      {"seed", true, [](S& s, K k, J v) { s.seed = as_count(k, v); }, [](const S& s) { return json(s.seed); }},
      {"horizon", true, [](S& s, K k, J v) { s.horizon = static_cast<Epoch>(as_positive(k, v)); },
       [](const S& s) { return json(s.horizon); }},
      {"n_users", true, [](S& s, K k, J v) { s.population.n_users = as_positive(k, v); },
       [](const S& s) { return json(s.population.n_users); }},
      {"n_items", true, [](S& s, K k, J v) { s.population.n_items = as_positive(k, v); },
       [](const S& s) { return json(s.population.n_items); }},
      {"engine", true, [](S& s, K k, J v) { s.engine.algorithm = as_algorithm(k, v); },
       [](const S& s) { return json(std::string(to_string(s.engine.algorithm))); }},

      {"latent_dim", false, [](S& s, K k, J v) { s.population.latent_dim = as_positive(k, v); },
       [](const S& s) { return json(s.population.latent_dim); }},
      {"factor_std", false, [](S& s, K k, J v) { s.population.factor_std = as_non_negative(k, v); },
       [](const S& s) { return json(s.population.factor_std); }},
      {"bias_std", false, [](S& s, K k, J v) { s.population.bias_std = as_non_negative(k, v); },
       [](const S& s) { return json(s.population.bias_std); }},
      {"noise_std", false, [](S& s, K k, J v) { s.population.noise_std = as_non_negative(k, v); },
       [](const S& s) { return json(s.population.noise_std); }},
      {"global_mean", false,
       [](S& s, K k, J v) {
         s.population.global_mean = v.is_null() ? std::nullopt : std::optional(as_number(k, v));
       },
       [](const S& s) { return json(s.population.resolved_global_mean()); }},
      {"rating_min", false, [](S& s, K k, J v) { s.population.scale.min = as_number(k, v); },
       [](const S& s) { return json(s.population.scale.min); }},
      {"rating_max", false, [](S& s, K k, J v) { s.population.scale.max = as_number(k, v); },
       [](const S& s) { return json(s.population.scale.max); }},
      {"round_ratings", false, [](S& s, K k, J v) { s.round_ratings = as_bool(k, v); },
       [](const S& s) { return json(s.round_ratings); }},

      {"activity_prob", false,
       [](S& s, K k, J v) {
         s.population.activity_prob = v.is_null() ? std::nullopt : std::optional(as_probability(k, v));
       },
       [](const S& s) { return optional_number(s.population.activity_prob); }},
      {"activity_beta_a", false, [](S& s, K k, J v) { s.population.activity_spread.a = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.activity_spread.a); }},
      {"activity_beta_b", false, [](S& s, K k, J v) { s.population.activity_spread.b = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.activity_spread.b); }},
      {"feedback_prob", false,
       [](S& s, K k, J v) {
         s.population.feedback_prob = v.is_null() ? std::nullopt : std::optional(as_probability(k, v));
       },
       [](const S& s) { return optional_number(s.population.feedback_prob); }},
      {"feedback_beta_a", false, [](S& s, K k, J v) { s.population.feedback_spread.a = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.feedback_spread.a); }},
      {"feedback_beta_b", false, [](S& s, K k, J v) { s.population.feedback_spread.b = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.feedback_spread.b); }},

      {"choice_strategy", false,
       [](S& s, K k, J v) {
         const auto name = as_string(k, v);
         if (name == "rec_following") {
           s.population.choice.kind = ChoiceStrategy::Kind::RecFollowing;
         } else if (name == "organic") {
           s.population.choice.kind = ChoiceStrategy::Kind::Organic;
         } else if (name == "mixed") {
           s.population.choice.kind = ChoiceStrategy::Kind::Mixed;
         } else {
           out_of_range(k, "must be one of rec_following, organic, mixed");
         }
       },
       [](const S& s) { return json(std::string(choice_name(s.population.choice.kind))); }},
      {"choice_weight", false, [](S& s, K k, J v) { s.population.choice.weight = as_probability(k, v); },
       [](const S& s) { return json(s.population.choice.rec_probability()); }},
      {"anchor_weight", false, [](S& s, K k, J v) { s.population.anchor_weight = as_probability(k, v); },
       [](const S& s) { return json(s.population.anchor_weight); }},
      {"observation_noise_std", false, [](S& s, K k, J v) { s.observation_noise_std = as_non_negative(k, v); },
       [](const S& s) { return json(s.observation_noise_std); }},

      {"user_lifespan_mean", false, [](S& s, K k, J v) { s.population.user_lifespan.mean = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.user_lifespan.mean); }},
      {"user_lifespan_min", false,
       [](S& s, K k, J v) { s.population.user_lifespan.floor = static_cast<Epoch>(as_positive(k, v)); },
       [](const S& s) { return json(s.population.user_lifespan.floor); }},
      {"item_lifespan_mean", false, [](S& s, K k, J v) { s.population.item_lifespan.mean = as_positive_real(k, v); },
       [](const S& s) { return json(s.population.item_lifespan.mean); }},
      {"item_lifespan_min", false,
       [](S& s, K k, J v) { s.population.item_lifespan.floor = static_cast<Epoch>(as_positive(k, v)); },
       [](const S& s) { return json(s.population.item_lifespan.floor); }},
      {"churn_replacement", false, [](S& s, K k, J v) { s.churn_replacement = as_bool(k, v); },
       [](const S& s) { return json(s.churn_replacement); }},

      {"within_list_choice", false,
       [](S& s, K k, J v) {
         const auto name = as_string(k, v);
         if (name == "rank") {
           s.within_list = WithinListChoice::RankDiscounted;
         } else if (name == "uniform") {
           s.within_list = WithinListChoice::Uniform;
         } else {
           out_of_range(k, "must be rank or uniform");
         }
       },
       [](const S& s) {
         return json(s.within_list == WithinListChoice::RankDiscounted ? "rank" : "uniform");
       }},
      {"consumptions_per_epoch", false, [](S& s, K k, J v) { s.consumptions_per_epoch = as_positive(k, v); },
       [](const S& s) { return json(s.consumptions_per_epoch); }},
      {"bootstrap_ratings_per_user", false,
       [](S& s, K k, J v) { s.bootstrap_ratings_per_user = as_count(k, v); },
       [](const S& s) { return json(s.bootstrap_ratings_per_user); }},
      {"rec_list_length", false, [](S& s, K k, J v) { s.rec_list_length = as_positive(k, v); },
       [](const S& s) { return json(s.rec_list_length); }},
      {"retrain_every", false,
       [](S& s, K k, J v) { s.retrain_every = static_cast<Epoch>(as_positive(k, v)); },
       [](const S& s) { return json(s.retrain_every); }},
      {"holdout_size", false, [](S& s, K k, J v) { s.holdout_size = as_count(k, v); },
       [](const S& s) { return json(s.holdout_size); }},

      {"knn_k", false, [](S& s, K k, J v) { s.engine.knn.k = as_positive(k, v); },
       [](const S& s) { return json(s.engine.knn.k); }},
      {"knn_min_overlap", false, [](S& s, K k, J v) { s.engine.knn.min_overlap = as_positive(k, v); },
       [](const S& s) { return json(s.engine.knn.min_overlap); }},
      {"popularity_shrinkage", false, [](S& s, K k, J v) { s.engine.popularity_shrinkage = as_non_negative(k, v); },
       [](const S& s) { return json(s.engine.popularity_shrinkage); }},
      {"mf_latent_dim", false, [](S& s, K k, J v) { s.engine.mf.latent_dim = as_positive(k, v); },
       [](const S& s) { return json(s.engine.mf.latent_dim); }},
      {"mf_learning_rate", false, [](S& s, K k, J v) { s.engine.mf.learning_rate = as_positive_real(k, v); },
       [](const S& s) { return json(s.engine.mf.learning_rate); }},
      {"mf_regularization", false, [](S& s, K k, J v) { s.engine.mf.regularization = as_non_negative(k, v); },
       [](const S& s) { return json(s.engine.mf.regularization); }},
      {"mf_epochs", false, [](S& s, K k, J v) { s.engine.mf.epochs_per_fit = as_positive(k, v); },
       [](const S& s) { return json(s.engine.mf.epochs_per_fit); }},
      {"mf_init_std", false, [](S& s, K k, J v) { s.engine.mf.init_std = as_non_negative(k, v); },
       [](const S& s) { return json(s.engine.mf.init_std); }},
      {"hybrid_lambda", false, [](S& s, K k, J v) { s.engine.hybrid.lambda = as_probability(k, v); },
       [](const S& s) { return json(s.engine.hybrid.lambda); }},
      {"hybrid_base", false,
       [](S& s, K k, J v) {
         const auto a = as_algorithm(k, v);
         if (a != Algorithm::UserKnn && a != Algorithm::FunkMf) out_of_range(k, "must be user_knn or funk_mf");
         s.engine.hybrid.base = a;
       },
       [](const S& s) { return json(std::string(to_string(s.engine.hybrid.base))); }},
  };
  return keys;
}

inline const ScenarioKey* find_key(std::string_view name) {
  for (const auto& k : scenario_keys())
    if (name == k.name) return &k;
  return nullptr;
}

}  // namespace detail

inline bool is_scenario_key(std::string_view name) { return detail::find_key(name) != nullptr; }

// Strict: unknown keys, missing required keys, wrong types and out-of-range
// values are all errors naming the key. Omitted optional keys keep the
// defaults of Scenario.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw ScenarioError(ScenarioError::Kind::Syntax, "", "scenario must be a JSON object");
  Scenario s;
  s.population.choice = ChoiceStrategy::mixed(0.5);
  bool choice_given = false;
  for (const auto& [key, value] : doc.items()) {
    const auto* k = detail::find_key(key);
    if (!k) throw ScenarioError(ScenarioError::Kind::UnknownKey, key, "unknown scenario key '" + key + "'");
    if (key == "choice_strategy") choice_given = true;
    k->set(s, key, value);
  }
  for (const auto& k : detail::scenario_keys())
    if (k.required && !doc.contains(k.name))
      throw ScenarioError(ScenarioError::Kind::MissingKey, k.name,
                          std::string("missing required scenario key '") + k.name + "'");
  if (!s.population.global_mean) s.population.global_mean = s.population.resolved_global_mean();
  if (!choice_given) s.population.choice.kind = ChoiceStrategy::Kind::RecFollowing;
  if (s.population.choice.kind != ChoiceStrategy::Kind::Mixed)
    s.population.choice.weight = s.population.choice.rec_probability();
  try {
    s.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ScenarioError(ScenarioError::Kind::OutOfRange, "", e.what());
  }
  return s;
}

// Fully resolved scenario, every key present.
inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& k : detail::scenario_keys()) out[k.name] = k.get(s);
  return out;
}

inline nlohmann::json read_scenario_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioError(ScenarioError::Kind::MissingFile, "", "cannot open scenario file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(ScenarioError::Kind::Syntax, "",
                        "malformed scenario file " + path.string() + ": " + e.what());
  }
}

inline Scenario parse_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_scenario_json(path));
}

// ---- metrics.csv ----------------------------------------------------------

inline constexpr std::string_view kMetricsHeader =
    "epoch,rmse,mae,gini_consumption,gini_recommendation,catalog_coverage,top_share,"
    "popularity_lift,personalization_level,mean_consumption_diversity,db_size,active_users,"
    "active_items";

// Shortest representation that round-trips.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string metrics_csv_row(const MetricRow& r) {
  std::string line = std::to_string(r.epoch);
  for (const auto& col : kRealColumns) {
    line += ',';
    if (const auto& v = r.*col.field) line += format_real(*v);
  }
  line += ',' + std::to_string(r.db_size) + ',' + std::to_string(r.active_users) + ',' +
          std::to_string(r.active_items);
  return line;
}

inline std::string metrics_csv(std::span<const MetricRow> rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& r : rows) out += metrics_csv_row(r) + '\n';
  return out;
}

// ---- events ---------------------------------------------------------------

inline std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::Bootstrap: return "bootstrap";
    case EventType::Consume: return "consume";
    case EventType::Feedback: return "feedback";
    case EventType::RetireUser: return "retire_user";
    case EventType::RetireItem: return "retire_item";
    case EventType::SpawnUser: return "spawn_user";
    case EventType::SpawnItem: return "spawn_item";
  }
  return "?";
}

inline nlohmann::ordered_json event_to_json(const Event& e) {
  nlohmann::ordered_json j;
  j["type"] = event_type_name(e.type);
  j["epoch"] = e.epoch;
  if (e.user) j["user"] = e.user->value;
  if (e.item) j["item"] = e.item->value;
  if (e.type == EventType::Consume || e.type == EventType::Feedback || e.type == EventType::Bootstrap) {
    j["via_recommendation"] = e.via_recommendation;
    j["shown_prediction"] = detail::optional_number(e.shown_prediction);
  }
  if (e.observed) j["observed"] = *e.observed;
  if (e.truth) j["truth"] = *e.truth;
  return j;
}

inline Event event_from_json(const nlohmann::json& j) {
  Event e;
  const auto type = j.at("type").get<std::string>();
  bool known = false;
  for (auto t : {EventType::Bootstrap, EventType::Consume, EventType::Feedback, EventType::RetireUser,
                 EventType::RetireItem, EventType::SpawnUser, EventType::SpawnItem}) {
    if (event_type_name(t) == type) {
      e.type = t;
      known = true;
    }
  }
  if (!known) throw UsageError("unknown event type '" + type + "'");
  e.epoch = j.at("epoch").get<Epoch>();
  if (j.contains("user")) e.user = UserId{j["user"].get<std::uint32_t>()};
  if (j.contains("item")) e.item = ItemId{j["item"].get<std::uint32_t>()};
  if (j.contains("via_recommendation")) e.via_recommendation = j["via_recommendation"].get<bool>();
  if (j.contains("shown_prediction") && !j["shown_prediction"].is_null())
    e.shown_prediction = j["shown_prediction"].get<double>();
  if (j.contains("observed")) e.observed = j["observed"].get<double>();
  if (j.contains("truth")) e.truth = j["truth"].get<double>();
  return e;
}

inline std::string event_jsonl_line(const Event& e) { return event_to_json(e).dump() + '\n'; }

// ---- RunResult ------------------------------------------------------------

inline nlohmann::ordered_json metric_row_to_json(const MetricRow& r) {
  nlohmann::ordered_json j;
  j["epoch"] = r.epoch;
  for (const auto& col : kRealColumns) j[col.name] = detail::optional_number(r.*col.field);
  j["db_size"] = r.db_size;
  j["active_users"] = r.active_users;
  j["active_items"] = r.active_items;
  return j;
}

inline MetricRow metric_row_from_json(const nlohmann::json& j) {
  MetricRow r;
  r.epoch = j.at("epoch").get<Epoch>();
  for (const auto& col : kRealColumns) {
    const auto& v = j.at(col.name);
    r.*col.field = v.is_null() ? std::nullopt : std::optional(v.get<double>());
  }
  r.db_size = j.at("db_size").get<std::uint64_t>();
  r.active_users = j.at("active_users").get<std::uint64_t>();
  r.active_items = j.at("active_items").get<std::uint64_t>();
  return r;
}

inline nlohmann::ordered_json run_result_to_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["scenario"] = scenario_to_json(r.scenario);
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : r.metrics) j["metrics"].push_back(metric_row_to_json(m));
  j["events"] = nlohmann::ordered_json::array();
  for (const auto& e : r.events) j["events"].push_back(event_to_json(e));
  return j;
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scenario = scenario_from_json(j.at("scenario"));
  for (const auto& m : j.at("metrics")) r.metrics.push_back(metric_row_from_json(m));
  for (const auto& e : j.at("events")) r.events.push_back(event_from_json(e));
  return r;
}

// ---- digests and run directories -----------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 0xf];
  }
  return out;
}

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunArtifacts {
  std::filesystem::path dir;
  std::vector<MetricRow> metrics;
  nlohmann::ordered_json manifest;
};

// Runs a scenario into `out_dir`, writing metrics.csv, events.jsonl and
// manifest.json. Files are written under temporary names and renamed only
// once everything succeeded, so a failed run leaves no partial outputs.
inline RunArtifacts write_run(const Scenario& scenario, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const auto metrics_tmp = out_dir / ".metrics.csv.tmp";
  const auto events_tmp = out_dir / ".events.jsonl.tmp";
  const auto manifest_tmp = out_dir / ".manifest.json.tmp";
  auto cleanup = [&] {
    std::error_code ignore;
    fs::remove(metrics_tmp, ignore);
    fs::remove(events_tmp, ignore);
    fs::remove(manifest_tmp, ignore);
  };

  RunArtifacts art;
  art.dir = out_dir;
  try {
    const auto started = utc_timestamp();
    std::ofstream events(events_tmp, std::ios::binary);
    if (!events) throw std::runtime_error("cannot write to " + out_dir.string());
    const auto result = run(scenario, [&](const Event& e) { events << event_jsonl_line(e); });
    events.close();
    if (!events) throw std::runtime_error("failed writing " + events_tmp.string());

    std::ofstream metrics(metrics_tmp, std::ios::binary);
    metrics << metrics_csv(result.metrics);
    metrics.close();
    if (!metrics) throw std::runtime_error("failed writing " + metrics_tmp.string());

    nlohmann::ordered_json m;
    m["artifact"] = "agentrec";
    m["artifact_version"] = kArtifactVersion;
    m["seed"] = scenario.seed;
    m["scenario"] = scenario_to_json(scenario);
    m["started_at"] = started;
    m["finished_at"] = utc_timestamp();
    m["files"] = nlohmann::ordered_json::array();
    for (const auto& [name, tmp] : {std::pair{"metrics.csv", metrics_tmp}, std::pair{"events.jsonl", events_tmp}})
      m["files"].push_back({{"path", name}, {"sha256", sha256_file(tmp)}});
    std::ofstream manifest(manifest_tmp, std::ios::binary);
    manifest << m.dump(2) << '\n';
    manifest.close();
    if (!manifest) throw std::runtime_error("failed writing " + manifest_tmp.string());

    fs::rename(metrics_tmp, out_dir / "metrics.csv");
    fs::rename(events_tmp, out_dir / "events.jsonl");
    fs::rename(manifest_tmp, out_dir / "manifest.json");
    art.metrics = result.metrics;
    art.manifest = std::move(m);
  } catch (...) {
    cleanup();
    throw;
  }
  return art;
}

}  // namespace agentrec
