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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "testutil.hpp"

namespace {

int run_cli(const std::string& args, std::string* out = nullptr) {
  const std::string cmd = std::string(AGENTREC_CLI) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  std::string text;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  const int status = ::pclose(pipe);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kScenario =
    R"({"seed": 5, "horizon": 4, "n_users": 10, "n_items": 30, "engine": "user_knn",
        "bootstrap_ratings_per_user": 3, "holdout_size": 30})";

}  // namespace

TEST(Cli, ValidatePrintsResolvedScenario) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  std::string out;
  EXPECT_EQ(run_cli("validate --scenario " + (dir / "s.json").string(), &out), 0);
  EXPECT_NE(out.find("\"knn_k\": 20"), std::string::npos) << out;
}

TEST(Cli, ValidateReportsUnknownKey) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", R"({"seed": 1, "horizon": 2, "n_users": 2, "n_items": 2,
                                          "engine": "random", "lifspan": 3})");
  std::string out;
  EXPECT_EQ(run_cli("validate --scenario " + (dir / "s.json").string(), &out), 2);
  EXPECT_NE(out.find("lifspan"), std::string::npos);
}

TEST(Cli, RunWritesArtifacts) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  EXPECT_EQ(run_cli("run --scenario " + (dir / "s.json").string() + " --out " + (dir / "out").string()), 0);
  for (const char* f : {"metrics.csv", "events.jsonl", "manifest.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
}

TEST(Cli, SeedOverrideChangesOutput) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  const auto s = (dir / "s.json").string();
  ASSERT_EQ(run_cli("run --scenario " + s + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("run --scenario " + s + " --out " + (dir / "b").string() + " --seed 6"), 0);
  EXPECT_NE(testutil::slurp(dir / "a" / "events.jsonl"), testutil::slurp(dir / "b" / "events.jsonl"));
  EXPECT_NE(testutil::slurp(dir / "b" / "manifest.json").find("\"seed\": 6"), std::string::npos);
}

TEST(Cli, RunFailsOnUnwritableOutput) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  testutil::write_file(dir / "blocker", "x");
  EXPECT_NE(run_cli("run --scenario " + (dir / "s.json").string() + " --out " + (dir / "blocker" / "out").string()),
            0);
  EXPECT_FALSE(std::filesystem::exists(dir / "blocker" / "out" / "metrics.csv"));
}

TEST(Cli, MissingScenarioFile) {
  testutil::TempDir dir;
  EXPECT_EQ(run_cli("run --scenario " + (dir / "nope.json").string() + " --out " + (dir / "o").string()), 2);
}

TEST(Cli, SweepCounts) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  EXPECT_EQ(run_cli("sweep --scenario " + (dir / "s.json").string() +
                    " --set anchor_weight=1.0,0.6 --set engine=most_popular,random --reps 2 --jobs 2 --out " +
                    (dir / "sw").string()),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "sw" / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sw" / "cell_003" / "rep_001" / "manifest.json"));
}

TEST(Cli, SweepRejectsUnknownKey) {
  testutil::TempDir dir;
  testutil::write_file(dir / "s.json", kScenario);
  EXPECT_EQ(run_cli("sweep --scenario " + (dir / "s.json").string() + " --set lifspan=1,2 --reps 1 --out " +
                    (dir / "sw").string()),
            2);
  EXPECT_FALSE(std::filesystem::exists(dir / "sw"));
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(run_cli(""), 0);
  EXPECT_NE(run_cli("run"), 0);
  EXPECT_NE(run_cli("bogus"), 0);
}
