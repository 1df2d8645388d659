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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace agentrec {

using Epoch = std::int64_t;

struct UserId {
  std::uint32_t value = 0;
  auto operator<=>(const UserId&) const = default;
};

struct ItemId {
  std::uint32_t value = 0;
  auto operator<=>(const ItemId&) const = default;
};

// Scenario values that violate a type or range invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model inputs, e.g. latent vectors of different dimension.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse: predicting with an unfitted engine, empty metric inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the simulator detects a broken internal invariant.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RatingScale {
  double min = 1.0;
  double max = 5.0;

  double clamp(double r) const { return std::clamp(r, min, max); }
  double midpoint() const { return 0.5 * (min + max); }
  bool contains(double r) const { return r >= min && r <= max; }
  bool operator==(const RatingScale&) const = default;
};

}  // namespace agentrec

template <>
struct std::hash<agentrec::UserId> {
  std::size_t operator()(agentrec::UserId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<agentrec::ItemId> {
  std::size_t operator()(agentrec::ItemId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

namespace agentrec {

using ItemSet = std::unordered_set<ItemId>;

}  // namespace agentrec
