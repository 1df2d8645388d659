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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agentrec/io.hpp"
#include "agentrec/sweep.hpp"

namespace {

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

nlohmann::json load(const std::string& path, std::optional<std::uint64_t> seed) {
  auto doc = agentrec::read_scenario_json(path);
  if (seed && doc.is_object()) doc["seed"] = *seed;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agentrec: agent-based simulation of recommender feedback loops"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::size_t reps = 1;
  std::size_t jobs = 0;

  auto* run = app.add_subcommand("run", "Run one scenario and write metrics.csv, events.jsonl, manifest.json");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");

  auto* sweep = app.add_subcommand("sweep", "Run a grid of scenario overrides with replications");
  sweep->add_option("--scenario", scenario_path, "Base scenario JSON file")->required();
  sweep->add_option("--set", sets, "key=v1,v2,... (repeatable)");
  sweep->add_option("--reps", reps, "Replications per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Worker threads (default: available cores)");

  auto* validate = app.add_subcommand("validate", "Parse a scenario and print it with defaults expanded");
  validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto s = agentrec::parse_scenario(scenario_path);
      std::cout << agentrec::scenario_to_json(s).dump(2) << '\n';
      return 0;
    }
    if (*run) {
      const auto s = agentrec::scenario_from_json(load(scenario_path, seed));
      const auto art = agentrec::write_run(s, out_dir);
      std::cout << "wrote " << art.metrics.size() << " epochs to " << out_dir << '\n';
      return 0;
    }
    if (*sweep) {
      std::vector<agentrec::SweepAxis> grid;
      for (const auto& text : sets) grid.push_back(agentrec::parse_sweep_axis(text));
      const auto outcome = agentrec::run_sweep(load(scenario_path, std::nullopt), grid, reps, out_dir, jobs);
      std::cout << "ran " << outcome.cells.size() * reps << " runs in " << outcome.cells.size() << " cells into "
                << out_dir << '\n';
      return 0;
    }
  } catch (const agentrec::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailureExit;
  }
  return kFailureExit;
}
