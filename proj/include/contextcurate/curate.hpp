// Copyright 2026 The ContextCurate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "contextcurate/error.hpp"

namespace ctxcur {

struct ScoredEntry {
  std::string id;
  double score = 0.0;
  double gold = 0.0;

  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

/// Scores paired with gold labels. Ids are unique.
struct ScoredSet {
  std::vector<ScoredEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  /// Throws InputError on a duplicate id.
  void validate() const;
};

enum class Decision { use, not_use };

/// Decision statistics at one threshold. Probabilities are conditional on
/// acceptance and NaN when nothing is accepted.
struct SweepRow {
  double threshold = 0.0;
  double p_neg = 0.0;   // P(Y < 0)
  double p_mid = 0.0;   // P(Y in [0, 0.5))
  double p_good = 0.0;  // P(Y >= 1), or Y > 1 with good_strict
  double throwout = 0.0;
  double ratio = 0.0;  // good / bad among accepted; NaN if no bad or none accepted
  std::size_t n_accepted = 0;
};

struct SweepOptions {
  /// Count "good" as y > 1 instead of y >= 1.
  bool good_strict = false;
};

struct RCPoint {
  double throwout = 0.0;
  double ratio = 0.0;
};

/// Retention Competency Curve: good-to-bad ratio against throwout rate.
struct RCCurve {
  std::vector<RCPoint> points;
  double auc = 0.0;
};

/// use iff score > threshold.
Decision decide(double score, double threshold);

/// One row per threshold by exact counting. Thresholds must be ascending.
/// Throws InputError for an empty set or unsorted thresholds.
std::vector<SweepRow> sweep(const ScoredSet& scored, const std::vector<double>& thresholds,
                            const SweepOptions& options = {});

/// Step-0.01 grid on .xx5 offsets bracketing every score:
/// floor_0.01(min) - 0.005 ... ceil_0.01(max) + 0.005.
std::vector<double> default_threshold_grid(const std::vector<double>& scores);

/// lo, lo+step, ... up to hi inclusive (within 1e-9 of a step).
std::vector<double> linear_grid(double lo, double hi, double step);

/// Parses "lo:hi:step". Throws InputError on malformed text.
std::vector<double> parse_grid_spec(const std::string& spec);

/// Drops NaN-ratio rows, collapses equal throwouts to the highest-threshold
/// row, and integrates with the trapezoid rule over the remaining points.
/// Throws InputError when fewer than two finite points remain.
RCCurve rcc(const std::vector<SweepRow>& rows);

double trapezoid_auc(const std::vector<RCPoint>& points);

/// Row with throwout nearest `target`; ties go to the lower threshold.
SweepRow reference_point(const std::vector<SweepRow>& rows, double target_throwout = 0.70);

}  // namespace ctxcur
