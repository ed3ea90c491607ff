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

#include <doctest.h>

#include <cmath>

#include "contextcurate/report.hpp"
#include "contextcurate/text_io.hpp"

using namespace ctxcur;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

SweepRow table_row() {
  SweepRow r;
  r.threshold = 0.845;
  r.p_neg = 0.0077;
  r.p_mid = 0.0815;
  r.p_good = 0.5313;
  r.throwout = 0.7138;
  r.ratio = 69.1462;
  r.n_accepted = 16920;
  return r;
}

RCCurve line_curve(double a, double b) {
  RCCurve c;
  c.points = {{0.0, a}, {1.0, b}};
  c.auc = 0.5 * (a + b);
  return c;
}

}  // namespace

TEST_CASE("sweep csv formatting") {
  const double nan = std::nan("");
  SweepRow empty;
  empty.threshold = 0.995;
  empty.p_neg = empty.p_mid = empty.p_good = empty.ratio = nan;
  empty.throwout = 1.0;
  empty.n_accepted = 0;
  const std::string csv = sweep_csv({table_row(), empty});
  CHECK(csv == std::string(kSweepHeader) +
                   "\n0.845,0.0077,0.0815,0.5313,0.7138,69.1462,16920\n"
                   "0.995,nan,nan,nan,1.0000,nan,0\n");
  CHECK_THROWS_AS(sweep_csv({}), InputError);
  CHECK(format_threshold(-0.415) == "-0.415");
  CHECK(format_threshold(2.005) == "2.005");
  CHECK(format_threshold(0.1) == "0.100");
  CHECK(format_threshold(0.12345) == "0.12345");
  CHECK(format_fixed(-0.00001, 4) == "0.0000");
  CHECK(format_fixed(440.19049, 4) == "440.1905");
}

TEST_CASE("sweep csv reparses within formatting precision") {
  const auto rows = parse_sweep_csv(sweep_csv({table_row()}));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].threshold == 0.845);
  CHECK(rows[0].ratio == doctest::Approx(69.1462).epsilon(1e-12));
  CHECK(rows[0].n_accepted == 16920);
  CHECK_THROWS_AS(parse_sweep_csv("nope\n1,2\n"), InputError);
}

TEST_CASE("rcc svg structure") {
  const std::string one = render_rcc_svg(line_curve(1, 3), 0.70, "unsupervised");
  CHECK(one.rfind("<svg", 0) == 0);
  CHECK(count(one, "<polyline") == 1);
  CHECK(one.find("AUC=2.0") != std::string::npos);
  CHECK(one.find("70% throwout") != std::string::npos);
  CHECK(one.find("throwout rate") != std::string::npos);
  CHECK(one.find("good-to-bad ratio") != std::string::npos);
  CHECK(one.find("</svg>") != std::string::npos);

  RCCurve sixty_six = line_curve(66, 66);
  CHECK(render_rcc_svg(sixty_six, 0.70, "m").find("AUC=66.0") != std::string::npos);

  const std::string three = render_rcc_svg({{"a", line_curve(1, 2)}, {"b", line_curve(3, 5)}, {"c <&>", line_curve(0, 9)}});
  CHECK(count(three, "<polyline") == 3);
  CHECK(count(three, "class=\"legend-entry\"") == 3);
  CHECK(three.find("c &lt;&amp;&gt;") != std::string::npos);

  RCCurve degenerate;
  degenerate.points = {{0.5, 1.0}};
  CHECK_THROWS_AS(render_rcc_svg(degenerate, 0.7, "x"), InputError);
  CHECK(render_rcc_svg(line_curve(1, 3), 0.70, "unsupervised") == one);
}

TEST_CASE("rcc csv") {
  CHECK(rcc_csv(line_curve(1, 3)) == "throwout,ratio\n0.0000,1.0000\n1.0000,3.0000\n");
}

TEST_CASE("predictions csv round trip") {
  ScoredSet s{{{"a,b", 0.1, -1.0 / 3.0}, {"c", -2.5e-7, 2.0}}};
  CHECK(parse_predictions_csv(predictions_csv(s)).entries == s.entries);
  CHECK(predictions_csv(s).rfind("context_id,score,gold\n", 0) == 0);
  CHECK_THROWS_AS(parse_predictions_csv("context_id,score,gold\na,x,1\n"), InputError);
  CHECK_THROWS_AS(parse_predictions_csv("context_id,score,gold\na,1,1\na,2,1\n"), InputError);
}

TEST_CASE("metrics tables") {
  MetricReport m{0.5, 0.25, 0.6, 0.55, 10};
  MetricReport null{0.6, 0.0, std::nan(""), std::nan(""), 10};
  const std::string csv = metrics_csv({{"supervised", m}, {"null_model", null}});
  CHECK(csv ==
        "model,n,rmse,r2,pearson_r,spearman_rho\n"
        "supervised,10,0.500000,0.250000,0.600000,0.550000\n"
        "null_model,10,0.600000,0.000000,nan,nan\n");
  const std::string md = metrics_markdown({{"supervised", m}});
  CHECK(md.find("| Model | RMSE | R^2 |") != std::string::npos);
  CHECK(md.find("0.36") != std::string::npos);
}

TEST_CASE("run report") {
  RunReport run;
  run.model_spec = ModelSpec::unsupervised;
  run.summary.n_contexts = 4;
  run.summary.n_words = 2;
  run.sweep = {table_row(), table_row()};
  run.sweep[0].threshold = 0.835;
  run.curve = line_curve(10, 20);
  run.reference = table_row();
  run.metrics = {0.4, 0.1, 0.0979, 0.1046, 4};
  run.null_metrics = {0.5, 0.0, 0.0, 0.0, 4};
  run.config_echo = "seed = 31\n";
  run.seed = 31;
  const std::string md = render_report_md(run);
  CHECK(md.find("seed = 31") != std::string::npos);
  CHECK(md.find("0.0979") != std::string::npos);
  CHECK(md.find("0.1046") != std::string::npos);
  CHECK(md.find("70% throwout") != std::string::npos);
  CHECK(md.find("sweep.csv") != std::string::npos);
  CHECK(md.find("rcc.svg") != std::string::npos);
  CHECK(md.find("| 0.845 | 0.0077 | 0.0815 | 0.5313 | 0.7138 | 69.1462 | 16920 |") != std::string::npos);
  CHECK(render_report_md(run) == md);
}
