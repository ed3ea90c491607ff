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

#include <chrono>
#include <cstdlib>
#include <sstream>

#include "contextcurate/cli.hpp"
#include "contextcurate/report.hpp"
#include "contextcurate/run_config.hpp"
#include "contextcurate/synth.hpp"
#include "contextcurate/text_io.hpp"
#include "test_util.hpp"

using namespace ctxcur;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "contextcurate");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Writes a small synthetic dataset once per directory name.
fs::path dataset(const std::string& name, std::size_t words = 8) {
  const fs::path dir = ctxcur::testing::scratch_dir(name);
  SynthOptions so;
  so.n_words = words;
  so.contexts_per_word = 5;
  so.dim = 8;
  const SynthData data = make_synthetic_dataset(so);
  save_corpus(data.corpus, dir / "corpus.jsonl");
  write_file(dir / "features.csv", to_csv(data.features));
  write_bundles(data.bundles, BundlePaths::from_prefix(dir / "bundles"));
  return dir;
}

std::vector<std::string> inputs(const fs::path& d) {
  return {"--corpus", (d / "corpus.jsonl").string(), "--bundles", (d / "bundles").string()};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_run_config(
      "# comment\n"
      "model = \"hybrid\"  # trailing\n"
      "seed = 12\n"
      "hidden_dims = [64, 32]\n"
      "good_strict = true\n"
      "grid = \"0:1:0.5\"\n");
  CHECK(c.model == ModelSpec::hybrid);
  CHECK(c.seed == 12);
  CHECK(c.head.hidden_dims == std::vector<std::size_t>{64, 32});
  CHECK(c.good_strict);
  CHECK(parse_run_config(c.to_toml()).to_toml() == c.to_toml());
  CHECK_THROWS_AS(parse_run_config("colour = 3\n"), InputError);
  CHECK_THROWS_AS(parse_run_config("seed = 1\nseed = 2\n"), InputError);
  CHECK_THROWS_AS(parse_run_config("seed = -1\n"), InputError);
  CHECK_THROWS_AS(parse_run_config("model = hybrid\n"), InputError);
  CHECK_THROWS_AS(parse_run_config("just text\n"), InputError);
}

TEST_CASE("validate") {
  const fs::path d = dataset("cli_validate");
  Outcome ok = run(cat({"validate", "--features", (d / "features.csv").string()}, inputs(d)));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("contexts: 40") != std::string::npos);

  std::string text = read_file(d / "corpus.jsonl");
  const std::size_t second = text.find('\n') + 1;
  text.insert(second, "{broken\n");
  write_file(d / "bad.jsonl", text);
  Outcome bad = run({"validate", "--corpus", (d / "bad.jsonl").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 2") != std::string::npos);

  std::string features = read_file(d / "features.csv");
  features.erase(features.rfind('\n', features.size() - 2) + 1);
  write_file(d / "short.csv", features);
  Outcome warn = run({"validate", "--corpus", (d / "corpus.jsonl").string(), "--features", (d / "short.csv").string()});
  CHECK(warn.code == 0);
  CHECK(warn.err.find("feature table is missing 1 context id") != std::string::npos);

  CHECK(run({"validate"}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"validate", "--corpus", (d / "nope.jsonl").string()}).code == 1);
}

TEST_CASE("score") {
  const fs::path d = dataset("cli_score");
  const std::string out = (d / "s1").string();
  Outcome a = run(cat({"score", "--out", out}, inputs(d)));
  REQUIRE(a.code == 0);
  const ScoredSet s = parse_predictions_csv(read_file(d / "s1" / "predictions.csv"));
  CHECK(s.size() == 40);
  for (const auto& e : s.entries) {
    CHECK(e.score >= -1.0);
    CHECK(e.score <= 1.0);
  }
  REQUIRE(run(cat({"score", "--out", (d / "s2").string()}, inputs(d))).code == 0);
  CHECK(read_file(d / "s1" / "predictions.csv") == read_file(d / "s2" / "predictions.csv"));

  Outcome hybrid = run(cat({"score", "--model", "hybrid", "--out", out}, inputs(d)));
  CHECK(hybrid.code == 1);
  CHECK(hybrid.err.find("features required") != std::string::npos);
  Outcome sup = run(cat({"score", "--model", "supervised", "--out", out}, inputs(d)));
  CHECK(sup.code == 1);
  CHECK(sup.err.find("checkpoint required") != std::string::npos);

  // A bundle missing for one context.
  BundleSet b = read_bundles(BundlePaths::from_prefix(d / "bundles"));
  b.erase(b.begin());
  write_bundles(b, BundlePaths::from_prefix(d / "partial"));
  Outcome missing = run({"score", "--corpus", (d / "corpus.jsonl").string(), "--bundles", (d / "partial").string(),
                         "--out", out});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("bundle") != std::string::npos);
}

TEST_CASE("train then score") {
  const fs::path d = dataset("cli_train");
  const std::string run_dir = (d / "t").string();
  Outcome t = run(cat({"train", "--model", "hybrid", "--features", (d / "features.csv").string(), "--hidden", "8,4",
                       "--epochs", "3", "--out", run_dir},
                      inputs(d)));
  REQUIRE(t.code == 0);
  for (const char* f : {"head.ckpt", "loss.csv", "norm_stats.csv", "config.toml"}) CHECK(fs::exists(d / "t" / f));
  CHECK(read_file(d / "t" / "loss.csv").rfind("epoch,mean_loss\n", 0) == 0);

  Outcome s = run(cat({"score", "--model", "hybrid", "--features", (d / "features.csv").string(), "--checkpoint",
                       run_dir + "/head.ckpt", "--norm-stats", run_dir + "/norm_stats.csv", "--out", run_dir},
                      inputs(d)));
  CHECK(s.code == 0);
  CHECK(parse_predictions_csv(read_file(d / "t" / "predictions.csv")).size() == 40);

  Outcome wrong = run(cat({"score", "--model", "supervised", "--checkpoint", run_dir + "/head.ckpt", "--out", run_dir},
                          inputs(d)));
  CHECK(wrong.code == 1);
}

TEST_CASE("cv writes a complete run directory") {
  const fs::path d = dataset("cli_cv");
  const std::string out = (d / "run").string();
  Outcome r = run(cat({"cv", "--k", "2", "--seed", "4", "--out", out}, inputs(d)));
  REQUIRE(r.code == 0);
  for (const char* f : {"config.toml", "folds.csv", "predictions.csv", "sweep.csv", "rcc.csv", "rcc.svg", "metrics.csv",
                        "report.md"}) {
    CHECK(fs::exists(d / "run" / f));
  }
  CHECK_FALSE(fs::exists(d / "run" / "FAILED"));
  CHECK(read_file(d / "run" / "config.toml").find("seed = 4\n") != std::string::npos);
  const FoldPlan plan = parse_folds_csv(read_file(d / "run" / "folds.csv"));
  CHECK(plan.assignment.size() == 40);

  // The standalone sweep reproduces the pipeline's sweep.
  Outcome s = run({"sweep", "--predictions", out + "/predictions.csv", "--out", (d / "resweep").string()});
  REQUIRE(s.code == 0);
  CHECK(read_file(d / "resweep" / "sweep.csv") == read_file(d / "run" / "sweep.csv"));

  // Environment seed applies, the flag wins over it.
  ::setenv("CONTEXTCURATE_SEED", "77", 1);
  REQUIRE(run(cat({"cv", "--k", "2", "--out", (d / "env").string()}, inputs(d))).code == 0);
  REQUIRE(run(cat({"cv", "--k", "2", "--seed", "5", "--out", (d / "flag").string()}, inputs(d))).code == 0);
  ::unsetenv("CONTEXTCURATE_SEED");
  CHECK(read_file(d / "env" / "config.toml").find("seed = 77\n") != std::string::npos);
  CHECK(read_file(d / "flag" / "config.toml").find("seed = 5\n") != std::string::npos);

  // Config file plus report overlay.
  write_file(d / "sup.toml", "model = \"supervised\"\nk = 2\nhidden_dims = [8]\nepochs = 3\n");
  REQUIRE(run(cat({"cv", "--config", (d / "sup.toml").string(), "--out", (d / "sup").string()}, inputs(d))).code == 0);
  Outcome rep = run({"report", "--run", out, "--run", (d / "sup").string(), "--out", (d / "cmp").string()});
  REQUIRE(rep.code == 0);
  const std::string svg = read_file(d / "cmp" / "rcc.svg");
  CHECK(svg.find("unsupervised (AUC=") != std::string::npos);
  CHECK(svg.find("supervised (AUC=") != std::string::npos);
}

TEST_CASE("cv failure leaves a FAILED marker") {
  const fs::path d = dataset("cli_fail");
  Outcome r = run(cat({"cv", "--model", "hybrid", "--features", (d / "missing.csv").string(), "--out",
                       (d / "run").string()},
                      inputs(d)));
  CHECK(r.code == 1);
  CHECK(fs::exists(d / "run" / "FAILED"));
}

TEST_CASE("sweep command edge cases") {
  const fs::path d = ctxcur::testing::scratch_dir("cli_sweep");
  write_file(d / "one.csv", "context_id,score,gold\na,0.5,1\n");
  Outcome one = run({"sweep", "--predictions", (d / "one.csv").string(), "--out", (d / "o").string()});
  CHECK(one.code == 1);
  CHECK(one.err.find(">=2 finite points required") != std::string::npos);
  CHECK(fs::exists(d / "o" / "sweep.csv"));

  write_file(d / "many.csv", "context_id,score,gold\na,0.05,-1\nb,0.35,1\nc,0.55,2\nd,0.75,-0.5\ne,0.95,1.5\n");
  Outcome grid = run({"sweep", "--predictions", (d / "many.csv").string(), "--grid", "0.0:1.0:0.1", "--out",
                      (d / "g").string()});
  CHECK(grid.code == 0);
  const auto rows = parse_sweep_csv(read_file(d / "g" / "sweep.csv"));
  CHECK(rows.size() == 11);

  write_file(d / "bad.csv", "context_id,score\na,1\n");
  CHECK(run({"sweep", "--predictions", (d / "bad.csv").string(), "--out", (d / "b").string()}).code == 1);
}

TEST_CASE("cv on toy and learnable corpora") {
  const fs::path toy = dataset("cli_toy", 16);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome r = run(cat({"cv", "--k", "2", "--out", (toy / "run").string()}, inputs(toy)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.code == 0);
  CHECK(secs < 10.0);

  const fs::path d = ctxcur::testing::scratch_dir("cli_learnable");
  SynthOptions so;
  so.n_words = 60;
  so.contexts_per_word = 10;
  const SynthData data = make_synthetic_dataset(so);
  save_corpus(data.corpus, d / "corpus.jsonl");
  write_bundles(data.bundles, BundlePaths::from_prefix(d / "bundles"));
  Outcome sup = run(cat({"cv", "--model", "supervised", "--hidden", "64,64", "--epochs", "100", "--k", "5", "--seed", "1",
                         "--out", (d / "run").string()},
                        inputs(d)));
  REQUIRE(sup.code == 0);
  const std::string metrics = read_file(d / "run" / "metrics.csv");
  const auto line = metrics.substr(metrics.find("\nsupervised,") + 1);
  std::vector<std::string> cells;
  std::stringstream ss(line.substr(0, line.find('\n')));
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  REQUIRE(cells.size() == 6);
  CHECK(std::stod(cells[3]) >= 0.9);
}
