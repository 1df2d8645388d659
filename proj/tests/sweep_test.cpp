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

#include <agentrec/sweep.hpp>

#include <gtest/gtest.h>

#include "testutil.hpp"

namespace agentrec {
namespace {

using nlohmann::json;

json base() {
  return json{{"seed", 10}, {"horizon", 5}, {"n_users", 12}, {"n_items", 30}, {"engine", "most_popular"},
              {"bootstrap_ratings_per_user", 3}, {"holdout_size", 40}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST(SweepAxis, Parsing) {
  const auto a = parse_sweep_axis("anchor_weight=1.0,0.6");
  EXPECT_EQ(a.key, "anchor_weight");
  ASSERT_EQ(a.values.size(), 2u);
  EXPECT_EQ(a.values[0], json(1.0));
  const auto e = parse_sweep_axis("engine=user_knn,funk_mf");
  EXPECT_EQ(e.values[1], json("funk_mf"));
  const auto b = parse_sweep_axis("round_ratings=true");
  EXPECT_EQ(b.values[0], json(true));
  EXPECT_THROW(parse_sweep_axis("anchor_weight"), ScenarioError);
  EXPECT_THROW(parse_sweep_axis("anchor_weight=1,,2"), ScenarioError);
}

TEST(PlanSweep, CartesianOrder) {
  const std::vector<SweepAxis> grid{parse_sweep_axis("anchor_weight=1.0,0.6"),
                                    parse_sweep_axis("engine=user_knn,funk_mf")};
  const auto cells = plan_sweep(base(), grid);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[1].scenario.population.anchor_weight, 1.0);
  EXPECT_EQ(cells[1].scenario.engine.algorithm, Algorithm::FunkMf);
  EXPECT_EQ(cells[2].scenario.population.anchor_weight, 0.6);
  EXPECT_EQ(cells[2].scenario.engine.algorithm, Algorithm::UserKnn);
}

TEST(PlanSweep, InvalidKeyFailsBeforeRunning) {
  testutil::TempDir dir;
  const std::vector<SweepAxis> grid{parse_sweep_axis("anchor_weight=1.0"), parse_sweep_axis("lifspan=3,4")};
  EXPECT_THROW(run_sweep(base(), grid, 2, dir / "out"), ScenarioError);
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(PlanSweep, InvalidValueFailsBeforeRunning) {
  testutil::TempDir dir;
  const std::vector<SweepAxis> grid{parse_sweep_axis("anchor_weight=0.5,1.5")};
  EXPECT_THROW(run_sweep(base(), grid, 1, dir / "out"), ScenarioError);
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(RunSweep, CountsAndSummary) {
  testutil::TempDir dir;
  const std::vector<SweepAxis> grid{parse_sweep_axis("anchor_weight=1.0,0.6"),
                                    parse_sweep_axis("engine=user_knn,funk_mf")};
  const auto outcome = run_sweep(base(), grid, 3, dir / "out", 2);
  std::size_t runs = 0;
  for (const auto& cell : std::filesystem::directory_iterator(dir / "out")) {
    if (!cell.is_directory()) continue;
    for (const auto& rep : std::filesystem::directory_iterator(cell.path())) {
      EXPECT_TRUE(std::filesystem::exists(rep.path() / "manifest.json"));
      ++runs;
    }
  }
  EXPECT_EQ(runs, 12u);

  const auto lines = lines_of(testutil::slurp(dir / "out" / "summary.csv"));
  ASSERT_EQ(lines.size(), 5u);
  const auto header = fields_of(lines[0]);
  EXPECT_EQ(header[0], "cell");
  EXPECT_EQ(header[1], "anchor_weight");
  EXPECT_EQ(header[2], "engine");
  EXPECT_EQ(header[3], "replications");
  EXPECT_EQ(header[4], "seeds");
  EXPECT_EQ(header[5], "rmse_final_mean");
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto row = fields_of(lines[r]);
    ASSERT_EQ(row.size(), header.size());
    EXPECT_EQ(row[3], "3");
    EXPECT_EQ(row[4], "10;11;12");
    EXPECT_FALSE(row[5].empty());
    EXPECT_FALSE(row[6].empty());
  }
}

TEST(RunSweep, SummaryStatisticsMatchRuns) {
  testutil::TempDir dir;
  const std::vector<SweepAxis> grid{parse_sweep_axis("engine=most_popular")};
  const auto outcome = run_sweep(base(), grid, 3, dir / "out", 1);
  double sum = 0.0;
  std::vector<double> finals;
  for (const auto& rows : outcome.runs[0]) finals.push_back(static_cast<double>(rows.back().db_size));
  for (double f : finals) sum += f;
  const double mean = sum / 3.0;
  double var = 0.0;
  for (double f : finals) var += (f - mean) * (f - mean);
  const auto lines = lines_of(testutil::slurp(dir / "out" / "summary.csv"));
  const auto header = fields_of(lines[0]);
  const auto row = fields_of(lines[1]);
  const auto col = std::find(header.begin(), header.end(), "db_size_final_mean") - header.begin();
  EXPECT_NEAR(std::stod(row[col]), mean, 1e-9);
  EXPECT_NEAR(std::stod(row[col + 1]), std::sqrt(var / 2.0), 1e-9);
}

TEST(RunSweep, EmptyGridSingleRun) {
  testutil::TempDir dir;
  const auto outcome = run_sweep(base(), {}, 1, dir / "out", 1);
  ASSERT_EQ(outcome.cells.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / cell_dir_name(0) / rep_dir_name(0) / "metrics.csv"));
  const auto lines = lines_of(testutil::slurp(dir / "out" / "summary.csv"));
  EXPECT_EQ(lines.size(), 2u);
  // a single replication has no spread
  const auto row = fields_of(lines[1]);
  EXPECT_EQ(row[1], "1");
  EXPECT_EQ(row[2], "10");
  EXPECT_FALSE(row[3].empty());
  EXPECT_TRUE(row[4].empty());
}

TEST(RunSweep, ParallelMatchesSerial) {
  testutil::TempDir dir;
  const std::vector<SweepAxis> grid{parse_sweep_axis("engine=user_knn,hybrid_blend")};
  run_sweep(base(), grid, 2, dir / "serial", 1);
  run_sweep(base(), grid, 2, dir / "parallel", 4);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t r = 0; r < 2; ++r)
      for (const char* f : {"metrics.csv", "events.jsonl"}) {
        const auto rel = std::filesystem::path(cell_dir_name(c)) / rep_dir_name(r) / f;
        EXPECT_EQ(sha256_file(dir / "serial" / rel), sha256_file(dir / "parallel" / rel)) << rel;
      }
  EXPECT_EQ(testutil::slurp(dir / "serial" / "summary.csv"), testutil::slurp(dir / "parallel" / "summary.csv"));
}

}  // namespace agentrec
