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

#include "contextcurate/curate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "contextcurate/error.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_bad(double y) { return y < 0.0; }
bool is_mid(double y) { return y >= 0.0 && y < 0.5; }
bool is_good(double y, bool strict) { return strict ? y > 1.0 : y >= 1.0; }

}  // namespace

void ScoredSet::validate() const {
  std::set<std::string> ids;
  for (const ScoredEntry& e : entries) {
    if (!ids.insert(e.id).second) throw InputError("duplicate scored id '" + e.id + "'");
  }
}

Decision decide(double score, double threshold) {
  return score > threshold ? Decision::use : Decision::not_use;
}

std::vector<SweepRow> sweep(const ScoredSet& scored, const std::vector<double>& thresholds,
                            const SweepOptions& options) {
  if (scored.empty()) throw InputError("cannot sweep an empty scored set");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw InputError("thresholds must be ascending");

  // Sort descending by score; the accepted set at any threshold is a prefix.
  std::vector<const ScoredEntry*> order;
  order.reserve(scored.size());
  for (const ScoredEntry& e : scored.entries) {
    if (std::isnan(e.score)) throw InputError("NaN score for '" + e.id + "'");
    order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](const ScoredEntry* a, const ScoredEntry* b) { return a->score > b->score; });

  const std::size_t n = order.size();
  std::vector<std::size_t> bad(n + 1, 0), mid(n + 1, 0), good(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = order[i]->gold;
    bad[i + 1] = bad[i] + (is_bad(y) ? 1 : 0);
    mid[i + 1] = mid[i] + (is_mid(y) ? 1 : 0);
    good[i + 1] = good[i] + (is_good(y, options.good_strict) ? 1 : 0);
  }

  std::vector<SweepRow> rows;
  rows.reserve(thresholds.size());
  for (double threshold : thresholds) {
    // Count of scores strictly above the threshold.
    const auto it = std::partition_point(order.begin(), order.end(),
                                         [&](const ScoredEntry* e) { return e->score > threshold; });
    const auto k = static_cast<std::size_t>(it - order.begin());
    SweepRow row;
    row.threshold = threshold;
    row.n_accepted = k;
    row.throwout = 1.0 - static_cast<double>(k) / static_cast<double>(n);
    if (k == 0) {
      row.p_neg = row.p_mid = row.p_good = row.ratio = kNaN;
    } else {
      const double dk = static_cast<double>(k);
      row.p_neg = static_cast<double>(bad[k]) / dk;
      row.p_mid = static_cast<double>(mid[k]) / dk;
      row.p_good = static_cast<double>(good[k]) / dk;
      row.ratio = bad[k] == 0 ? kNaN : static_cast<double>(good[k]) / static_cast<double>(bad[k]);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> default_threshold_grid(const std::vector<double>& scores) {
  if (scores.empty()) throw InputError("cannot build a threshold grid without scores");
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  // Tolerance keeps 0.29 * 100 = 28.999999999999996 on the 29 cell.
  const auto lo = static_cast<long long>(std::floor(*lo_it * 100.0 + 1e-9));
  const auto hi = static_cast<long long>(std::ceil(*hi_it * 100.0 - 1e-9));
  std::vector<double> grid;
  for (long long i = lo; i <= hi + 1; ++i) grid.push_back((static_cast<double>(i) - 0.5) / 100.0);
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw InputError("grid needs finite lo <= hi and step > 0");
  }
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> grid;
  for (long long i = 0; i <= count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

std::vector<double> parse_grid_spec(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
  if (second == std::string::npos) throw InputError("grid must look like lo:hi:step, got '" + spec + "'");
  const auto lo = parse_double(spec.substr(0, first));
  const auto hi = parse_double(spec.substr(first + 1, second - first - 1));
  const auto step = parse_double(spec.substr(second + 1));
  if (!lo || !hi || !step) throw InputError("grid must look like lo:hi:step, got '" + spec + "'");
  return linear_grid(*lo, *hi, *step);
}

double trapezoid_auc(const std::vector<RCPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += 0.5 * (points[i].ratio + points[i - 1].ratio) * (points[i].throwout - points[i - 1].throwout);
  }
  return area;
}

RCCurve rcc(const std::vector<SweepRow>& rows) {
  std::vector<const SweepRow*> finite;
  for (const SweepRow& r : rows) {
    if (std::isfinite(r.ratio)) finite.push_back(&r);
  }
  std::stable_sort(finite.begin(), finite.end(), [](const SweepRow* a, const SweepRow* b) {
    if (a->throwout != b->throwout) return a->throwout < b->throwout;
    return a->threshold < b->threshold;
  });
  RCCurve curve;
  for (const SweepRow* r : finite) {
    if (!curve.points.empty() && curve.points.back().throwout == r->throwout) {
      curve.points.back().ratio = r->ratio;
    } else {
      curve.points.push_back({r->throwout, r->ratio});
    }
  }
  if (curve.points.size() < 2) throw InputError(">=2 finite points required for an RCC");
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

SweepRow reference_point(const std::vector<SweepRow>& rows, double target_throwout) {
  if (rows.empty()) throw InputError("no sweep rows");
  const SweepRow* best = &rows.front();
  double best_distance = std::abs(best->throwout - target_throwout);
  for (const SweepRow& r : rows) {
    const double distance = std::abs(r.throwout - target_throwout);
    const bool closer = distance < best_distance - 1e-12;
    const bool tie_lower = std::abs(distance - best_distance) <= 1e-12 && r.threshold < best->threshold;
    if (closer || tie_lower) {
      best = &r;
      best_distance = std::min(distance, best_distance);
    }
  }
  return *best;
}

}  // namespace ctxcur
