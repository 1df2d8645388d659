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

// Seeded random streams.
//
// Every stochastic decision in a run draws from a substream whose seed is a
// pure function of (root seed, stream tag, keys). Agents get one substream
// per (user, epoch), so the outcome of a run does not depend on the order in
// which users are evaluated.
//
// The standard library's distributions are implementation defined, so the
// transforms from raw 64-bit words to uniforms, normals and gammas live here.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace agentrec {

enum class Stream : std::uint64_t {
  UserProfile = 1,
  ItemProfile = 2,
  GroundTruthNoise = 3,
  Bootstrap = 4,
  Agent = 5,
  Engine = 6,
  Holdout = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Maps a 64-bit word to [0, 1) using its top 53 bits.
inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard normal from two independent words (Box-Muller, cosine branch).
inline double normal_from_bits(std::uint64_t a, std::uint64_t b) {
  const double u1 = 1.0 - unit_from_bits(a);  // (0, 1]
  const double u2 = unit_from_bits(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return unit_from_bits(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double sd) {
    const auto a = engine_();
    const auto b = engine_();
    return mean + sd * normal_from_bits(a, b);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n) by rejection on the top bits.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Marsaglia-Tsang; shape < 1 handled by the usual boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = 1.0 - uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal(0.0, 1.0);
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = 1.0 - uniform();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

  // Number of failures before the first success, success probability p.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 0;
    const double u = 1.0 - uniform();
    return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
  }

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline Rng substream(std::uint64_t root, Stream stream, std::uint64_t a = 0,
                     std::uint64_t b = 0) {
  return Rng(mix_seed({root, static_cast<std::uint64_t>(stream), a, b}));
}

}  // namespace agentrec
