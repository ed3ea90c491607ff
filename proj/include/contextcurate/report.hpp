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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contextcurate/corpus.hpp"
#include "contextcurate/curate.hpp"
#include "contextcurate/eval.hpp"

namespace ctxcur {

inline constexpr std::string_view kSweepHeader =
    "threshold,p_y_lt_0,p_y_0_05,p_y_ge_1,throwout_rate,good_to_bad_ratio,n_accepted";

/// Thresholds print with three decimals when that is exact (the .xx5 grid),
/// otherwise in shortest round-trip form.
std::string format_threshold(double threshold);

/// Probabilities, rates and ratios use 4-decimal fixed; NaN is `nan`.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(std::string_view text);

std::string rcc_csv(const RCCurve& curve);

struct LabeledCurve {
  std::string label;
  RCCurve curve;
};

/// Standalone SVG: one polyline per curve, AUC to one decimal in the legend,
/// dashed vertical marker at the reference throwout.
std::string render_rcc_svg(const std::vector<LabeledCurve>& curves, double reference_throwout = 0.70);
std::string render_rcc_svg(const RCCurve& curve, double reference_throwout, const std::string& legend_label);

/// CSV `context_id,score,gold`, shortest round-trip numbers.
std::string predictions_csv(const ScoredSet& scored);
ScoredSet parse_predictions_csv(std::string_view text);

struct NamedMetrics {
  std::string model;
  MetricReport metrics;
};

std::string metrics_csv(const std::vector<NamedMetrics>& rows);

/// Model rows x (RMSE, R^2), plus the static RF baseline reference row.
std::string metrics_markdown(const std::vector<NamedMetrics>& rows);

struct RunReport {
  ModelSpec model_spec = ModelSpec::unsupervised;
  Regime regime = Regime::word_unseen;
  CorpusSummary summary;
  std::vector<SweepRow> sweep;
  RCCurve curve;
  SweepRow reference;
  double reference_throwout = 0.70;
  MetricReport metrics;
  MetricReport null_metrics;
  std::vector<FoldOutcome> folds;
  std::string config_echo;
  std::uint64_t seed = 0;
};

std::string render_report_md(const RunReport& run);

/// Writes `content`, throwing InputError on failure.
void write_artifact(const std::filesystem::path& path, std::string_view content);

}  // namespace ctxcur
