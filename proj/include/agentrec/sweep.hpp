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

// Parameter sweeps: a Cartesian grid of scenario overrides, R replications
// per cell with seeds base_seed + r, and a per-cell summary.csv.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "agentrec/io.hpp"
#include "agentrec/metrics.hpp"

namespace agentrec {

struct SweepAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

// "key=v1,v2,..." where each value is read as a JSON scalar when it parses as
// one, otherwise as a bare string.
inline SweepAxis parse_sweep_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ScenarioError(ScenarioError::Kind::Syntax, "", "expected key=v1,v2,... got '" + std::string(text) + "'");
  SweepAxis axis;
  axis.key = std::string(text.substr(0, eq));
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto comma = rest.find(',');
    const std::string token(rest.substr(0, comma));
    if (token.empty())
      throw ScenarioError(ScenarioError::Kind::Syntax, axis.key, "empty value for sweep key '" + axis.key + "'");
    auto parsed = nlohmann::json::parse(token, nullptr, false);
    axis.values.push_back(parsed.is_discarded() || parsed.is_structured() ? nlohmann::json(token) : parsed);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return axis;
}

struct SweepCell {
  std::size_t index = 0;
  std::vector<std::pair<std::string, nlohmann::json>> overrides;
  Scenario scenario;  // seed is the cell's base seed
};

// Validates every grid key and every resulting scenario before anything runs.
inline std::vector<SweepCell> plan_sweep(const nlohmann::json& base, std::span<const SweepAxis> grid) {
  for (const auto& axis : grid) {
    if (!is_scenario_key(axis.key))
      throw ScenarioError(ScenarioError::Kind::UnknownKey, axis.key, "unknown sweep key '" + axis.key + "'");
    if (axis.values.empty())
      throw ScenarioError(ScenarioError::Kind::Syntax, axis.key, "no values for sweep key '" + axis.key + "'");
  }
  std::vector<SweepCell> cells;
  std::vector<std::size_t> idx(grid.size(), 0);
  for (;;) {
    SweepCell cell;
    cell.index = cells.size();
    nlohmann::json doc = base;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      cell.overrides.emplace_back(grid[a].key, grid[a].values[idx[a]]);
      doc[grid[a].key] = grid[a].values[idx[a]];
    }
    cell.scenario = scenario_from_json(doc);
    cells.push_back(std::move(cell));
    // odometer, last axis fastest
    std::size_t a = grid.size();
    while (a > 0) {
      --a;
      if (++idx[a] < grid[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return cells;
    }
    if (grid.empty()) return cells;
  }
}

inline std::string cell_dir_name(std::size_t cell) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "cell_%03zu", cell);
  return buf;
}

inline std::string rep_dir_name(std::size_t rep) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%03zu", rep);
  return buf;
}

struct SweepOutcome {
  std::vector<SweepCell> cells;
  std::vector<std::vector<std::vector<MetricRow>>> runs;  // [cell][rep]
};

namespace detail {

inline std::pair<std::optional<double>, std::optional<double>> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nullopt, std::nullopt};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, std::nullopt};
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(xs.size() - 1))};
}

inline std::vector<std::pair<std::string, std::function<std::optional<double>(const MetricRow&)>>>
summary_metrics() {
  std::vector<std::pair<std::string, std::function<std::optional<double>(const MetricRow&)>>> out;
  for (const auto& col : kRealColumns) {
    auto field = col.field;
    out.emplace_back(col.name, [field](const MetricRow& r) { return r.*field; });
  }
  out.emplace_back("db_size", [](const MetricRow& r) { return std::optional<double>(r.db_size); });
  out.emplace_back("active_users", [](const MetricRow& r) { return std::optional<double>(r.active_users); });
  out.emplace_back("active_items", [](const MetricRow& r) { return std::optional<double>(r.active_items); });
  return out;
}

inline std::string csv_cell(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

inline std::string csv_opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace detail

// One row per cell: the overrides, the seeds used, and mean/std over
// replications of each metric's final-epoch value and least-squares slope.
inline std::string sweep_summary_csv(const SweepOutcome& outcome, std::span<const SweepAxis> grid) {
  const auto metrics = detail::summary_metrics();
  std::string out = "cell";
  for (const auto& axis : grid) out += "," + axis.key;
  out += ",replications,seeds";
  for (const auto& [name, _] : metrics)
    out += "," + name + "_final_mean," + name + "_final_std," + name + "_slope_mean," + name + "_slope_std";
  out += '\n';
  for (std::size_t c = 0; c < outcome.cells.size(); ++c) {
    const auto& cell = outcome.cells[c];
    const auto& runs = outcome.runs[c];
    out += std::to_string(cell.index);
    for (const auto& [key, value] : cell.overrides) out += "," + detail::csv_cell(value);
    out += "," + std::to_string(runs.size()) + ",";
    for (std::size_t r = 0; r < runs.size(); ++r)
      out += (r ? ";" : "") + std::to_string(cell.scenario.seed + r);
    for (const auto& [name, get] : metrics) {
      std::vector<double> finals, slopes;
      for (const auto& rows : runs) {
        if (rows.empty()) continue;
        if (auto v = get(rows.back())) finals.push_back(*v);
        std::vector<std::optional<double>> series;
        for (const auto& row : rows) series.push_back(get(row));
        if (auto s = trend_slope(series)) slopes.push_back(*s);
      }
      const auto [fm, fs] = detail::mean_std(finals);
      const auto [sm, ss] = detail::mean_std(slopes);
      out += "," + detail::csv_opt(fm) + "," + detail::csv_opt(fs) + "," + detail::csv_opt(sm) + "," +
             detail::csv_opt(ss);
    }
    out += '\n';
  }
  return out;
}

// Runs every (cell, replication) on a pool of `jobs` threads. Each run is
// deterministic and writes only to its own directory.
inline SweepOutcome run_sweep(const nlohmann::json& base, std::span<const SweepAxis> grid, std::size_t reps,
                              const std::filesystem::path& out_dir, std::size_t jobs = 0) {
  if (reps < 1) throw UsageError("sweep needs at least one replication");
  SweepOutcome outcome;
  outcome.cells = plan_sweep(base, grid);
  outcome.runs.assign(outcome.cells.size(), std::vector<std::vector<MetricRow>>(reps));

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

  const std::size_t total = outcome.cells.size() * reps;
  if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  jobs = std::min(jobs, total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const auto task = next.fetch_add(1);
      if (task >= total) return;
      const auto c = task / reps;
      const auto r = task % reps;
      try {
        Scenario sc = outcome.cells[c].scenario;
        sc.seed = outcome.cells[c].scenario.seed + r;
        auto art = write_run(sc, out_dir / cell_dir_name(c) / rep_dir_name(r));
        outcome.runs[c][r] = std::move(art.metrics);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
  summary << sweep_summary_csv(outcome, grid);
  if (!summary) throw std::runtime_error("failed writing summary.csv");
  return outcome;
}

}  // namespace agentrec
