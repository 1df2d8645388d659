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

// Longitudinal measurements: accuracy, concentration, popularity
// reinforcement, personalization and consumption diversity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "agentrec/core.hpp"

namespace agentrec {

struct PredictionPair {
  double predicted = 0.0;
  double actual = 0.0;
};

inline double rmse(std::span<const PredictionPair> pairs) {
  if (pairs.empty()) throw UsageError("rmse of an empty list");
  double sq = 0.0;
  for (const auto& p : pairs) sq += (p.predicted - p.actual) * (p.predicted - p.actual);
  return std::sqrt(sq / static_cast<double>(pairs.size()));
}

inline double mae(std::span<const PredictionPair> pairs) {
  if (pairs.empty()) throw UsageError("mae of an empty list");
  double abs = 0.0;
  for (const auto& p : pairs) abs += std::abs(p.predicted - p.actual);
  return abs / static_cast<double>(pairs.size());
}

// sum_ij |x_i - x_j| / (2 n^2 mean), evaluated in O(n log n) on sorted counts.
inline double gini(std::span<const std::uint64_t> counts) {
  std::vector<std::uint64_t> x(counts.begin(), counts.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = static_cast<double>(x[i]);
    total += v;
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * v;
  }
  if (total <= 0.0) throw UsageError("gini needs at least one positive count");
  return weighted / (n * total);
}

// Share held by the top ceil(fraction * n) entries.
inline double top_share(std::span<const std::uint64_t> counts, double fraction) {
  if (counts.empty()) throw UsageError("top_share of an empty list");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("top_share fraction must be in (0,1]");
  std::vector<std::uint64_t> x(counts.begin(), counts.end());
  std::sort(x.begin(), x.end(), std::greater<>());
  const auto take = static_cast<std::size_t>(
      std::min<double>(x.size(), std::ceil(fraction * static_cast<double>(x.size()) - 1e-12)));
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total <= 0.0) throw UsageError("top_share needs at least one positive count");
  const double top = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(take), 0.0);
  return top / total;
}

// 1-based ranks, ties get the average of the ranks they span.
template <class T>
std::vector<double> average_ranks(std::span<const T> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && !(values[order[i]] < values[order[j]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Spearman correlation between prior item popularity and how often each item
// is recommended now. Missing when either side has zero variance.
template <class A, class B>
std::optional<double> popularity_lift(std::span<const A> prev_popularity,
                                      std::span<const B> rec_counts) {
  if (prev_popularity.size() != rec_counts.size())
    throw UsageError("popularity_lift: item universes differ");
  if (prev_popularity.size() < 2) return std::nullopt;
  const auto rx = average_ranks(prev_popularity);
  const auto ry = average_ranks(rec_counts);
  return pearson(rx, ry);
}

inline std::optional<double> popularity_lift(const std::vector<std::uint64_t>& prev,
                                             const std::vector<std::uint64_t>& recs) {
  return popularity_lift(std::span<const std::uint64_t>(prev), std::span<const std::uint64_t>(recs));
}

// Mean pairwise Jaccard distance between recommendation lists. Empty lists
// are skipped; fewer than two non-empty lists gives a missing value.
inline std::optional<double> personalization_level(std::span<const std::vector<ItemId>> lists) {
  std::vector<std::vector<ItemId>> sorted;
  for (const auto& l : lists) {
    if (l.empty()) continue;
    auto s = l;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sorted.push_back(std::move(s));
  }
  if (sorted.size() < 2) return std::nullopt;
  double acc = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t a = 0; a < sorted.size(); ++a) {
    for (std::size_t b = a + 1; b < sorted.size(); ++b) {
      const auto& x = sorted[a];
      const auto& y = sorted[b];
      std::size_t i = 0, j = 0, common = 0;
      while (i < x.size() && j < y.size()) {
        if (x[i] < y[j]) {
          ++i;
        } else if (y[j] < x[i]) {
          ++j;
        } else {
          ++common;
          ++i;
          ++j;
        }
      }
      const double uni = static_cast<double>(x.size() + y.size() - common);
      acc += 1.0 - static_cast<double>(common) / uni;
      ++pairs;
    }
  }
  return acc / static_cast<double>(pairs);
}

inline double catalog_coverage(std::span<const ItemId> recommended, std::span<const ItemId> active) {
  if (active.empty()) throw UsageError("catalog_coverage over an empty catalog");
  ItemSet act(active.begin(), active.end());
  ItemSet hit;
  for (auto i : recommended)
    if (act.contains(i)) hit.insert(i);
  return static_cast<double>(hit.size()) / static_cast<double>(act.size());
}

// Least-squares slope of the present values against their index. Missing
// entries are skipped; fewer than two points gives a missing value.
inline std::optional<double> trend_slope(std::span<const std::optional<double>> series) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (!series[t]) continue;
    const double x = static_cast<double>(t);
    n += 1;
    sx += x;
    sy += *series[t];
    sxx += x * x;
    sxy += x * *series[t];
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

struct MetricRow {
  Epoch epoch = 0;
  std::optional<double> rmse;
  std::optional<double> mae;
  std::optional<double> gini_consumption;
  std::optional<double> gini_recommendation;
  std::optional<double> catalog_coverage;
  std::optional<double> top_share;
  std::optional<double> popularity_lift;
  std::optional<double> personalization_level;
  std::optional<double> mean_consumption_diversity;
  std::uint64_t db_size = 0;
  std::uint64_t active_users = 0;
  std::uint64_t active_items = 0;

  bool operator==(const MetricRow&) const = default;
};

// Real-valued columns of a MetricRow, in output order.
struct MetricColumn {
  const char* name;
  std::optional<double> MetricRow::*field;
};

inline constexpr MetricColumn kRealColumns[] = {
    {"rmse", &MetricRow::rmse},
    {"mae", &MetricRow::mae},
    {"gini_consumption", &MetricRow::gini_consumption},
    {"gini_recommendation", &MetricRow::gini_recommendation},
    {"catalog_coverage", &MetricRow::catalog_coverage},
    {"top_share", &MetricRow::top_share},
    {"popularity_lift", &MetricRow::popularity_lift},
    {"personalization_level", &MetricRow::personalization_level},
    {"mean_consumption_diversity", &MetricRow::mean_consumption_diversity},
};

// Empty string when the row satisfies every range invariant, otherwise the
// name of the first offending column.
inline std::string range_violation(const MetricRow& row) {
  auto in = [](const std::optional<double>& v, double lo, double hi) {
    return !v || (std::isfinite(*v) && *v >= lo && *v <= hi);
  };
  if (row.rmse && !(*row.rmse >= 0.0 && std::isfinite(*row.rmse))) return "rmse";
  if (row.mae && !(*row.mae >= 0.0 && std::isfinite(*row.mae))) return "mae";
  if (row.rmse && row.mae && *row.rmse + 1e-12 < *row.mae) return "rmse<mae";
  if (!in(row.gini_consumption, 0, 1)) return "gini_consumption";
  if (!in(row.gini_recommendation, 0, 1)) return "gini_recommendation";
  if (!in(row.catalog_coverage, 0, 1)) return "catalog_coverage";
  if (!in(row.top_share, 0, 1)) return "top_share";
  if (!in(row.popularity_lift, -1, 1)) return "popularity_lift";
  if (!in(row.personalization_level, 0, 1)) return "personalization_level";
  if (row.mean_consumption_diversity &&
      !(*row.mean_consumption_diversity >= 0.0 && std::isfinite(*row.mean_consumption_diversity)))
    return "mean_consumption_diversity";
  return {};
}

}  // namespace agentrec
