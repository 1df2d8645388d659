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

#include <agentrec/metrics.hpp>
#include <agentrec/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

namespace agentrec {
namespace {

using Counts = std::vector<std::uint64_t>;

double gini_of(const Counts& c) { return gini(std::span<const std::uint64_t>(c)); }
double top_share_of(const Counts& c, double f) { return top_share(std::span<const std::uint64_t>(c), f); }

std::optional<double> lift(const std::vector<double>& a, const std::vector<double>& b) {
  return popularity_lift(std::span<const double>(a), std::span<const double>(b));
}

std::vector<ItemId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<ItemId> out;
  for (auto x : v) out.push_back(ItemId{x});
  return out;
}

}  // namespace

TEST(Accuracy, Examples) {
  const std::vector<PredictionPair> exact{{3, 3}, {4, 4}};
  EXPECT_EQ(rmse(exact), 0.0);
  const std::vector<PredictionPair> one{{3, 4}};
  EXPECT_EQ(rmse(one), 1.0);
  EXPECT_EQ(mae(one), 1.0);
  const std::vector<PredictionPair> two{{1, 4}, {2, 2}};
  EXPECT_NEAR(rmse(two), std::sqrt(4.5), 1e-12);
  EXPECT_NEAR(rmse(two), 2.1213, 1e-4);
  EXPECT_DOUBLE_EQ(mae(two), 1.5);
}

TEST(Accuracy, EmptyIsUsageError) {
  EXPECT_THROW(rmse({}), UsageError);
  EXPECT_THROW(mae({}), UsageError);
}

TEST(Accuracy, RmseDominatesMae) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PredictionPair> v(1 + rng.below(20));
    for (auto& p : v) p = {rng.uniform(1, 5), rng.uniform(1, 5)};
    ASSERT_GE(rmse(v) + 1e-12, mae(v));
  }
}

TEST(Gini, Examples) {
  EXPECT_NEAR(gini_of({1, 1, 1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(gini_of({0, 0, 0, 1}), 0.75, 1e-15);
  EXPECT_NEAR(gini_of({1, 2, 3, 4}), 0.25, 1e-15);
}

TEST(Gini, AllZeroIsUsageError) {
  EXPECT_THROW(gini_of({0, 0, 0}), UsageError);
  EXPECT_THROW(gini_of({}), UsageError);
}

TEST(Gini, ScaleInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Counts c(1 + rng.below(50));
    for (auto& x : c) x = rng.below(100);
    c[0] += 1;
    const std::uint64_t k = 1 + rng.below(9);
    Counts scaled = c;
    for (auto& x : scaled) x *= k;
    ASSERT_NEAR(gini_of(c), gini_of(scaled), 1e-12);
  }
}

TEST(Gini, MatchesPairwiseOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    Counts c(1 + rng.below(50));
    for (auto& x : c) x = rng.below(rng.bernoulli(0.5) ? 3 : 1000);
    c[rng.below(c.size())] += 1;
    ASSERT_NEAR(gini_of(c), oracle::gini(c), 1e-12);
  }
}

TEST(TopShare, Examples) {
  EXPECT_DOUBLE_EQ(top_share_of({7, 1, 1, 1}, 0.25), 0.7);
  EXPECT_DOUBLE_EQ(top_share_of({4, 4, 4, 4}, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(top_share_of({9}, 0.1), 1.0);
}

TEST(TopShare, Errors) {
  EXPECT_THROW(top_share_of({}, 0.1), UsageError);
  EXPECT_THROW(top_share_of({1, 2}, 0.0), UsageError);
  EXPECT_THROW(top_share_of({0, 0}, 0.5), UsageError);
}

TEST(PopularityLift, Examples) {
  EXPECT_NEAR(*lift({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-12);
  EXPECT_NEAR(*lift({1, 2, 3, 4}, {40, 30, 20, 10}), -1.0, 1e-12);
  // Ranks (3,1,2) vs (1,3,2): d = (2,-2,0), 1 - 6*8/(3*8) = -1.
  EXPECT_NEAR(*lift({3, 1, 2}, {10, 30, 20}), -1.0, 1e-12);
  EXPECT_NEAR(*lift({3, 1, 2}, {10, 30, 20}), *oracle::spearman({3, 1, 2}, {10, 30, 20}), 1e-12);
}

TEST(PopularityLift, ZeroVarianceIsMissing) {
  EXPECT_FALSE(lift({1, 1, 1}, {1, 2, 3}));
  EXPECT_FALSE(lift({1, 2, 3}, {5, 5, 5}));
  EXPECT_FALSE(lift({1}, {2}));
}

TEST(PopularityLift, MismatchedUniverses) {
  EXPECT_THROW(lift({1, 2}, {1, 2, 3}), UsageError);
}

TEST(PopularityLift, MatchesOracleWithTies) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(2 + rng.below(30)), b(a.size());
    for (auto& x : a) x = static_cast<double>(rng.below(5));
    for (auto& x : b) x = static_cast<double>(rng.below(5));
    const auto got = lift(a, b);
    const auto want = oracle::spearman(a, b);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) { ASSERT_NEAR(*got, *want, 1e-12); }
  }
}

TEST(PopularityLift, MonotoneTransformInvariance) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(3 + rng.below(30)), b(a.size());
    for (auto& x : a) x = static_cast<double>(rng.below(8));
    for (auto& x : b) x = static_cast<double>(rng.below(8));
    const auto base = lift(a, b);
    auto ta = a, tb = b;
    for (auto& x : ta) x = std::exp(0.7 * x) + 3.0;
    for (auto& x : tb) x = x * x * x - 2.0;
    const auto moved = lift(ta, tb);
    ASSERT_EQ(base.has_value(), moved.has_value());
    if (base) { ASSERT_NEAR(*base, *moved, 1e-12); }
  }
}

TEST(Personalization, Examples) {
  const std::vector<std::vector<ItemId>> same{ids({1, 2}), ids({2, 1}), ids({1, 2})};
  EXPECT_DOUBLE_EQ(*personalization_level(same), 0.0);
  const std::vector<std::vector<ItemId>> disjoint{ids({1, 2}), ids({3, 4})};
  EXPECT_DOUBLE_EQ(*personalization_level(disjoint), 1.0);
  const std::vector<std::vector<ItemId>> overlap{ids({1, 2}), ids({2, 3})};
  EXPECT_NEAR(*personalization_level(overlap), 2.0 / 3.0, 1e-12);
}

TEST(Personalization, FewerThanTwoListsIsMissing) {
  EXPECT_FALSE(personalization_level({}));
  const std::vector<std::vector<ItemId>> one{ids({1})};
  EXPECT_FALSE(personalization_level(one));
  const std::vector<std::vector<ItemId>> one_nonempty{ids({1}), {}};
  EXPECT_FALSE(personalization_level(one_nonempty));
}

TEST(Coverage, Examples) {
  const auto active = ids({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  EXPECT_DOUBLE_EQ(catalog_coverage(ids({0, 1, 2, 3, 4, 4, 2}), active), 0.5);
  EXPECT_DOUBLE_EQ(catalog_coverage({}, active), 0.0);
  EXPECT_DOUBLE_EQ(catalog_coverage(active, active), 1.0);
  EXPECT_DOUBLE_EQ(catalog_coverage(ids({0, 42}), active), 0.1);
  EXPECT_THROW(catalog_coverage(active, {}), UsageError);
}

TEST(TrendSlope, LinearSeries) {
  const std::vector<std::optional<double>> s{1.0, 3.0, std::nullopt, 7.0};
  EXPECT_NEAR(*trend_slope(s), 2.0, 1e-12);
  const std::vector<std::optional<double>> one{std::nullopt, 4.0};
  EXPECT_FALSE(trend_slope(one));
}

TEST(MetricRow, RangeViolation) {
  MetricRow row;
  row.rmse = 1.0;
  row.mae = 0.8;
  row.gini_consumption = 0.3;
  row.popularity_lift = -0.2;
  EXPECT_EQ(range_violation(row), "");
  row.gini_consumption = 1.2;
  EXPECT_EQ(range_violation(row), "gini_consumption");
  row.gini_consumption = 0.3;
  row.mae = 1.5;
  EXPECT_EQ(range_violation(row), "rmse<mae");
}

}  // namespace agentrec
