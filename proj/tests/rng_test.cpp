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

#include <agentrec/rng.hpp>

#include <gtest/gtest.h>

#include <numeric>
#include <vector>

namespace agentrec {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, SubstreamsAreKeyed) {
  auto a = substream(7, Stream::Agent, 3, 10);
  auto b = substream(7, Stream::Agent, 3, 10);
  auto c = substream(7, Stream::Agent, 4, 10);
  auto d = substream(7, Stream::Holdout, 3, 10);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  const int n = 200000;
  double s = 0, ss = 0;
  for (int k = 0; k < n; ++k) {
    const double x = r.normal(1.0, 2.0);
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.0, 0.02);
  EXPECT_NEAR(ss / n - mean * mean, 4.0, 0.05);
}

TEST(Rng, BetaMeanAndRange) {
  Rng r(5);
  const int n = 100000;
  double s = 0;
  for (int k = 0; k < n; ++k) {
    const double x = r.beta(2.0, 6.0);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
    s += x;
  }
  EXPECT_NEAR(s / n, 0.25, 0.005);
}

TEST(Rng, GeometricMean) {
  Rng r(9);
  const int n = 100000;
  double s = 0;
  for (int k = 0; k < n; ++k) s += static_cast<double>(r.geometric(0.2));
  EXPECT_NEAR(s / n, 4.0, 0.1);  // (1 - p) / p
}

TEST(Rng, BelowIsInRange) {
  Rng r(11);
  std::vector<int> hits(7, 0);
  for (int k = 0; k < 70000; ++k) ++hits[r.below(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(13);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < 50; ++k) EXPECT_EQ(sorted[k], k);
}

}  // namespace agentrec
