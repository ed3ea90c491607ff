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

#include "contextcurate/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contextcurate/csv.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string sweep_cells(const SweepRow& r) {
  return format_threshold(r.threshold) + "," + format_fixed(r.p_neg, 4) + "," + format_fixed(r.p_mid, 4) + "," +
         format_fixed(r.p_good, 4) + "," + format_fixed(r.throwout, 4) + "," + format_fixed(r.ratio, 4) + "," +
         std::to_string(r.n_accepted);
}

std::string sweep_md_row(const SweepRow& r) {
  return "| " + format_threshold(r.threshold) + " | " + format_fixed(r.p_neg, 4) + " | " + format_fixed(r.p_mid, 4) +
         " | " + format_fixed(r.p_good, 4) + " | " + format_fixed(r.throwout, 4) + " | " + format_fixed(r.ratio, 4) +
         " | " + std::to_string(r.n_accepted) + " |\n";
}

constexpr std::string_view kSweepMdHeader =
    "| threshold | P(Y < 0) | P(Y in [0,0.5)) | P(Y >= 1) | throwout rate | good-to-bad ratio | # accepted |\n"
    "|---|---|---|---|---|---|---|\n";

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

// Rounds up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double value) {
  if (!(value > 0.0)) return 1.0;
  const double magnitude = std::pow(10.0, std::floor(std::log10(value)));
  for (double step : {1.0, 2.0, 5.0, 10.0}) {
    if (step * magnitude >= value) return step * magnitude;
  }
  return 10.0 * magnitude;
}

std::string px(double v) { return format_fixed(v, 2); }

std::string metric_cell(double v, int decimals) { return std::isnan(v) ? "nan" : format_fixed(v, decimals); }

}  // namespace

std::string format_threshold(double threshold) {
  if (std::isnan(threshold)) return "nan";
  const double scaled = threshold * 1000.0;
  if (std::abs(scaled - std::round(scaled)) < 1e-6) return format_fixed(threshold, 3);
  return format_shortest(threshold);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw InputError("no sweep rows to render");
  std::string out(kSweepHeader);
  out.push_back('\n');
  for (const SweepRow& r : rows) out += sweep_cells(r) + "\n";
  return out;
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || csv::join(records.front().fields) != kSweepHeader) {
    throw InputError("sweep file: unexpected header");
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 7) throw InputError("sweep file line " + std::to_string(records[i].line) + ": expected 7 fields");
    std::optional<double> v[6];
    for (int c = 0; c < 6; ++c) v[c] = parse_double(f[static_cast<std::size_t>(c)]);
    const auto n = parse_int(f[6]);
    if (!n || std::any_of(std::begin(v), std::end(v), [](const auto& x) { return !x; })) {
      throw InputError("sweep file line " + std::to_string(records[i].line) + ": malformed number");
    }
    rows.push_back({*v[0], *v[1], *v[2], *v[3], *v[4], *v[5], static_cast<std::size_t>(*n)});
  }
  return rows;
}

std::string rcc_csv(const RCCurve& curve) {
  std::string out = "throwout,ratio\n";
  for (const RCPoint& p : curve.points) out += format_fixed(p.throwout, 4) + "," + format_fixed(p.ratio, 4) + "\n";
  return out;
}

std::string render_rcc_svg(const std::vector<LabeledCurve>& curves, double reference_throwout) {
  if (curves.empty()) throw InputError("no curves to plot");
  double y_max = 0.0;
  for (const LabeledCurve& c : curves) {
    if (c.curve.points.size() < 2) throw InputError("degenerate curve '" + c.label + "': need >= 2 points");
    for (const RCPoint& p : c.curve.points) y_max = std::max(y_max, p.ratio);
  }
  y_max = nice_ceiling(y_max);

  constexpr double width = 720, height = 480;
  constexpr double left = 70, right = 20, top = 20, bottom = 55;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + std::clamp(x, 0.0, 1.0) * plot_w; };
  auto sy = [&](double y) { return top + plot_h - std::clamp(y / y_max, 0.0, 1.0) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  // Axes and ticks.
  svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(top + plot_h) << "\" x2=\"" << px(left + plot_w) << "\" y2=\""
      << px(top + plot_h) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << px(left) << "\" y1=\"" << px(top) << "\" x2=\"" << px(left) << "\" y2=\"" << px(top + plot_h)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 10; i += 2) {
    const double x = i / 10.0;
    svg << "<line x1=\"" << px(sx(x)) << "\" y1=\"" << px(top + plot_h) << "\" x2=\"" << px(sx(x)) << "\" y2=\""
        << px(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(sx(x)) << "\" y=\"" << px(top + plot_h + 18) << "\" text-anchor=\"middle\">"
        << format_fixed(x, 1) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double y = y_max * i / 5.0;
    svg << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(sy(y)) << "\" x2=\"" << px(left) << "\" y2=\""
        << px(sy(y)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(left - 8) << "\" y=\"" << px(sy(y) + 4) << "\" text-anchor=\"end\">"
        << format_shortest(y) << "</text>\n";
  }
  svg << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << px(height - 12)
      << "\" text-anchor=\"middle\">throwout rate</text>\n";
  svg << "<text x=\"16\" y=\"" << px(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << px(top + plot_h / 2) << ")\">good-to-bad ratio</text>\n";

  // Reference marker.
  svg << "<line x1=\"" << px(sx(reference_throwout)) << "\" y1=\"" << px(top) << "\" x2=\""
      << px(sx(reference_throwout)) << "\" y2=\"" << px(top + plot_h)
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  svg << "<text x=\"" << px(sx(reference_throwout) + 4) << "\" y=\"" << px(top + 12) << "\" fill=\"gray\">"
      << format_fixed(reference_throwout * 100.0, 0) << "% throwout</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < curves[i].curve.points.size(); ++p) {
      const RCPoint& pt = curves[i].curve.points[p];
      svg << (p ? " " : "") << px(sx(pt.throwout)) << "," << px(sy(pt.ratio));
    }
    svg << "\"/>\n";
  }

  // Legend, top left inside the plot.
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const double y = top + 14 + 18.0 * static_cast<double>(i);
    svg << "<g class=\"legend-entry\"><line x1=\"" << px(left + 10) << "\" y1=\"" << px(y - 4) << "\" x2=\""
        << px(left + 30) << "\" y2=\"" << px(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << px(left + 36) << "\" y=\"" << px(y) << "\">" << xml_escape(curves[i].label)
        << " (AUC=" << format_fixed(curves[i].curve.auc, 1) << ")</text></g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_rcc_svg(const RCCurve& curve, double reference_throwout, const std::string& legend_label) {
  return render_rcc_svg(std::vector<LabeledCurve>{{legend_label, curve}}, reference_throwout);
}

std::string predictions_csv(const ScoredSet& scored) {
  std::string out = "context_id,score,gold\n";
  for (const ScoredEntry& e : scored.entries) {
    out += csv::escape(e.id) + "," + format_shortest(e.score) + "," + format_shortest(e.gold) + "\n";
  }
  return out;
}

ScoredSet parse_predictions_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front().fields != std::vector<std::string>{"context_id", "score", "gold"}) {
    throw InputError("predictions file: expected header context_id,score,gold");
  }
  ScoredSet scored;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    const auto score = f.size() == 3 ? parse_double(f[1]) : std::nullopt;
    const auto gold = f.size() == 3 ? parse_double(f[2]) : std::nullopt;
    if (!score || !gold || !std::isfinite(*score) || !std::isfinite(*gold)) {
      throw InputError("predictions file line " + std::to_string(records[i].line) + ": malformed row");
    }
    scored.entries.push_back({f[0], *score, *gold});
  }
  scored.validate();
  return scored;
}

std::string metrics_csv(const std::vector<NamedMetrics>& rows) {
  std::string out = "model,n,rmse,r2,pearson_r,spearman_rho\n";
  for (const NamedMetrics& r : rows) {
    out += csv::escape(r.model) + "," + std::to_string(r.metrics.n) + "," + metric_cell(r.metrics.rmse, 6) + "," +
           metric_cell(r.metrics.r2, 6) + "," + metric_cell(r.metrics.pearson_r, 6) + "," +
           metric_cell(r.metrics.spearman_rho, 6) + "\n";
  }
  return out;
}

std::string metrics_markdown(const std::vector<NamedMetrics>& rows) {
  std::string out = "| Model | RMSE | R^2 |\n|---|---|---|\n";
  for (const NamedMetrics& r : rows) {
    out += "| " + r.model + " | " + metric_cell(r.metrics.rmse, 4) + " | " + metric_cell(r.metrics.r2, 4) + " |\n";
  }
  // Published random-forest baseline; its model is not part of this tool.
  out += "| RF baseline (published reference, not recomputed) | 0.36 | 0.18 |\n";
  return out;
}

std::string render_report_md(const RunReport& run) {
  std::ostringstream md;
  md << "# Context curation run: " << to_string(run.model_spec) << " (" << to_string(run.regime) << ")\n\n";

  md << "## Configuration\n\n";
  md << "Seed: " << run.seed << "\n\n";
  md << "```toml\n" << run.config_echo << "```\n\n";

  md << "## Corpus\n\n";
  md << "Standard deviations use the sample (n-1) estimator.\n\n";
  md << "```\n" << format_summary(run.summary) << "```\n\n";

  if (!run.folds.empty()) {
    md << "## Folds\n\n| fold | train contexts | test contexts | training gold mean | final epoch loss |\n";
    md << "|---|---|---|---|---|\n";
    for (const FoldOutcome& f : run.folds) {
      md << "| " << f.fold << " | " << f.n_train << " | " << f.n_test << " | " << format_fixed(f.train_gold_mean, 4)
         << " | " << (f.epoch_losses.empty() ? std::string("-") : format_fixed(f.epoch_losses.back(), 6)) << " |\n";
    }
    md << "\nAssignments: [folds.csv](folds.csv)\n\n";
  }

  md << "## Reference point (" << format_fixed(run.reference_throwout * 100.0, 0) << "% throwout)\n\n";
  md << kSweepMdHeader << sweep_md_row(run.reference) << "\n";

  md << "## Threshold sweep (excerpt)\n\n" << kSweepMdHeader;
  const std::size_t n = run.sweep.size();
  std::size_t ref_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (run.sweep[i].threshold == run.reference.threshold) ref_index = i;
  }
  std::vector<bool> shown(n, false);
  for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) shown[i] = true;
  for (std::size_t i = n >= 2 ? n - 2 : 0; i < n; ++i) shown[i] = true;
  for (std::size_t i = ref_index >= 3 ? ref_index - 3 : 0; i <= std::min(n - 1, ref_index + 3); ++i) shown[i] = true;
  bool gap = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (shown[i]) {
      if (gap) md << "| ... | | | | | | |\n";
      md << sweep_md_row(run.sweep[i]);
      gap = false;
    } else {
      gap = true;
    }
  }
  md << "\nFull table: [sweep.csv](sweep.csv)\n\n";

  md << "## Retention Competency Curve\n\n";
  md << "AUC (trapezoidal, " << run.curve.points.size() << " finite points): " << format_fixed(run.curve.auc, 4)
     << "\n\n";
  md << "Plot: [rcc.svg](rcc.svg). Points: [rcc.csv](rcc.csv)\n\n";

  md << "## Correlation with gold labels\n\n";
  md << "Pearson r = " << metric_cell(run.metrics.pearson_r, 4) << ", Spearman rho = "
     << metric_cell(run.metrics.spearman_rho, 4) << " (n = " << run.metrics.n << ")\n\n";

  md << "## Regression metrics\n\n";
  md << metrics_markdown({{"Null model", run.null_metrics}, {std::string(to_string(run.model_spec)), run.metrics}});
  md << "\nAll rows except the RF baseline are out-of-sample over the pooled holdout predictions. "
        "Details: [metrics.csv](metrics.csv). Predictions: [predictions.csv](predictions.csv)\n";
  return md.str();
}

void write_artifact(const std::filesystem::path& path, std::string_view content) { write_file(path, content); }

}  // namespace ctxcur
