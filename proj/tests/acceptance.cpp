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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contextcurate/cli.hpp"
#include "contextcurate/curate.hpp"
#include "contextcurate/embed.hpp"
#include "contextcurate/eval.hpp"
#include "contextcurate/features.hpp"
#include "contextcurate/head.hpp"
#include "contextcurate/report.hpp"
#include "contextcurate/rng.hpp"
#include "contextcurate/synth.hpp"
#include "contextcurate/text_io.hpp"

using namespace ctxcur;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

bool same(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol;
}

ScoredSet random_scored(Rng& rng, std::size_t n) {
  ScoredSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const double score = rng.uniform(-1.5, 2.5);
    // Gold on the 1/10 lattice of ten-rater means, covering every category.
    const double gold = static_cast<double>(static_cast<int>(rng.below(31)) - 10) / 10.0;
    s.entries.push_back({"c" + std::to_string(i), score, gold});
  }
  return s;
}

std::vector<double> scores_of(const ScoredSet& s) {
  std::vector<double> out;
  for (const auto& e : s.entries) out.push_back(e.score);
  return out;
}

// ---------------------------------------------------------------- sweep

Verdict sweep_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  Rng rng(20261017);
  std::size_t rows_checked = 0;
  for (std::size_t n : {1000u, 2500u, 10000u}) {
    const ScoredSet s = random_scored(rng, n);
    const auto grid = default_threshold_grid(scores_of(s));
    const auto rows = sweep(s, grid);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::size_t acc = 0, neg = 0, mid = 0, good = 0;
      for (const auto& e : s.entries) {
        if (!(e.score > grid[i])) continue;
        ++acc;
        neg += e.gold < 0;
        mid += e.gold >= 0 && e.gold < 0.5;
        good += e.gold >= 1;
      }
      const double nan = std::nan("");
      const double p_neg = acc ? double(neg) / double(acc) : nan;
      const double p_mid = acc ? double(mid) / double(acc) : nan;
      const double p_good = acc ? double(good) / double(acc) : nan;
      const double ratio = acc && neg ? double(good) / double(neg) : nan;
      const double throwout = 1.0 - double(acc) / double(n);
      if (rows[i].n_accepted != acc) v.fail("n_accepted mismatch at " + format_threshold(grid[i]));
      if (!same(rows[i].p_neg, p_neg, 1e-12) || !same(rows[i].p_mid, p_mid, 1e-12) ||
          !same(rows[i].p_good, p_good, 1e-12) || !same(rows[i].ratio, ratio, 1e-12) ||
          !same(rows[i].throwout, throwout, 1e-12)) {
        v.fail("ratio mismatch at " + format_threshold(grid[i]));
      }
      ++rows_checked;
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 5.0) v.fail("took " + fmt("%.2f", secs) + " s");
  if (v.pass) v.detail = std::to_string(rows_checked) + " rows over 13500 pairs, " + fmt("%.2f", secs) + " s";
  return v;
}

Verdict accept_all() {
  Verdict v;
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ScoredSet s = random_scored(rng, 200 + rng.below(800));
    const auto rows = sweep(s, default_threshold_grid(scores_of(s)));
    std::size_t good = 0, bad = 0;
    for (const auto& e : s.entries) {
      good += e.gold >= 1;
      bad += e.gold < 0;
    }
    const SweepRow& first = rows.front();
    if (first.throwout != 0.0) v.fail("throwout " + format_fixed(first.throwout, 4));
    if (first.n_accepted != s.size()) v.fail("n_accepted != n_total");
    if (!same(first.ratio, double(good) / double(bad), 1e-12)) v.fail("ratio != count(y>=1)/count(y<0)");
  }
  if (v.pass) v.detail = "20 sets: throwout 0, all accepted, whole-set good/bad ratio";
  return v;
}

Verdict monotonicity() {
  Verdict v;
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    ScoredSet s = random_scored(rng, 50 + rng.below(500));
    // Every fourth set uses coarse scores so ties and grid hits occur.
    if (trial % 4 == 0)
      for (auto& e : s.entries) e.score = std::round(e.score * 20) / 20;
    const auto rows = sweep(s, default_threshold_grid(scores_of(s)));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].throwout < rows[i - 1].throwout) v.fail("throwout decreased");
      if (rows[i].n_accepted > rows[i - 1].n_accepted) v.fail("n_accepted increased");
    }
  }
  if (v.pass) v.detail = "100 random scored sets";
  return v;
}

Verdict auc_fixtures() {
  Verdict v;
  SweepRow a, b, c;
  a.threshold = 0.1, a.throwout = 0.0, a.ratio = 10.0, a.n_accepted = 10;
  b.threshold = 0.2, b.throwout = 0.4, b.ratio = 10.0, b.n_accepted = 6;
  c.threshold = 0.3, c.throwout = 1.0, c.ratio = 10.0, c.n_accepted = 1;
  const double rect = rcc({a, b, c}).auc;
  a.ratio = 0.0;
  b.throwout = 1.0, b.ratio = 100.0;
  const double tri = rcc({a, b}).auc;
  if (std::abs(rect - 10.0) > 1e-9) v.fail("constant curve gave " + format_shortest(rect));
  if (std::abs(tri - 50.0) > 1e-9) v.fail("ramp gave " + format_shortest(tri));
  if (v.pass) v.detail = "constant-10 -> " + format_shortest(rect) + ", (0,0)-(1,100) -> " + format_shortest(tri);
  return v;
}

// ---------------------------------------------------------------- head

Verdict gradient_check() {
  Verdict v;
  Rng rng(31337);
  double worst = 0.0;
  std::size_t params_checked = 0;
  for (int draw = 0; draw < 20; ++draw) {
    MLPHead head = init_head(HeadConfig{4, {5, 3}, 0.2}, static_cast<std::uint64_t>(draw));
    std::vector<double*> params;
    for (auto& layer : head.layers) {
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) params.push_back(layer.weight.data() + i);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) params.push_back(layer.bias.data() + i);
    }
    if (params.size() > 64) v.fail("head has more than 64 parameters");
    for (double* p : params) *p = rng.uniform(-1, 1);
    Batch batch{Eigen::MatrixXd(6, 4), Eigen::VectorXd(6)};
    for (Eigen::Index i = 0; i < batch.inputs.size(); ++i) batch.inputs.data()[i] = rng.uniform(-2, 2);
    for (Eigen::Index i = 0; i < batch.targets.size(); ++i) batch.targets[i] = rng.uniform(-1, 2);
    const bool train_mode = draw % 2 == 1;
    const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(draw);
    const BackwardResult res = backward(head, batch, 1.0, train_mode, seed);
    std::vector<double> analytic;
    for (const auto& g : res.grads) {
      for (Eigen::Index i = 0; i < g.weight.size(); ++i) analytic.push_back(g.weight.data()[i]);
      for (Eigen::Index i = 0; i < g.bias.size(); ++i) analytic.push_back(g.bias.data()[i]);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + 1e-5;
      const double up = batch_loss(head, batch, 1.0, train_mode, seed);
      *params[i] = saved - 1e-5;
      const double down = batch_loss(head, batch, 1.0, train_mode, seed);
      *params[i] = saved;
      const double numeric = (up - down) / 2e-5;
      const double rel = std::abs(numeric - analytic[i]) / std::max(1e-8, std::abs(numeric) + std::abs(analytic[i]));
      worst = std::max(worst, rel);
      ++params_checked;
    }
  }
  if (worst >= 1e-4) v.fail("max relative error " + fmt("%.3g", worst));
  if (v.pass) v.detail = "20 draws, " + std::to_string(params_checked) + " parameters, max rel err " + fmt("%.2e", worst);
  return v;
}

Verdict learnability() {
  Verdict v;
  constexpr std::size_t kFeatures = 5;
  Rng rng(4242);
  std::vector<double> w(kFeatures);
  for (double& wi : w) wi = rng.uniform(-1, 1);
  VectorMap inputs;
  LabelMap labels;
  std::vector<std::string> train_ids, test_ids;
  for (std::size_t i = 0; i < 2500; ++i) {
    const std::string id = "s" + std::to_string(10000 + i);
    std::vector<double> x(kFeatures);
    double y = 0.0;
    for (std::size_t j = 0; j < kFeatures; ++j) {
      x[j] = rng.normal();
      y += w[j] * x[j];
    }
    labels[id] = y + 0.05 * rng.normal();
    inputs[id] = x;
    (i < 2000 ? train_ids : test_ids).push_back(id);
  }
  // Two hidden layers at width 128: the 512-wide default needs well over a
  // minute for 200 single-threaded epochs at batch 16.
  const HeadConfig hc{kFeatures, {128, 128}, 0.1};
  TrainConfig tc;
  tc.epochs = 200;
  tc.seed = 1;
  const auto t0 = Clock::now();
  const TrainResult trained = train(inputs, labels, train_ids, hc, tc);
  const double secs = seconds_since(t0);

  VectorMap test_inputs;
  for (const auto& id : test_ids) test_inputs[id] = inputs.at(id);
  const auto preds = predict_batch(trained.head, test_inputs);
  ScoredSet model, null;
  std::vector<double> train_golds;
  for (const auto& id : train_ids) train_golds.push_back(labels.at(id));
  const NullModel nm = null_model(train_golds);
  for (const auto& id : test_ids) {
    model.entries.push_back({id, preds.at(id), labels.at(id)});
    null.entries.push_back({id, nm.predict(), labels.at(id)});
  }
  const double r2_model = r2(model);
  const double r2_null = r2(null);
  if (r2_model < 0.9) v.fail("R^2 " + fmt("%.4f", r2_model));
  if (secs >= 60.0) v.fail("training took " + fmt("%.1f", secs) + " s");
  if (std::abs(r2_null) > 0.02) v.fail("null model R^2 " + fmt("%.4f", r2_null));
  if (v.pass) {
    v.detail = "hidden [128,128], 200 epochs in " + fmt("%.1f", secs) + " s, R^2 " + fmt("%.4f", r2_model) +
               ", null R^2 " + fmt("%.4f", r2_null);
  }
  return v;
}

// ---------------------------------------------------------------- eval

Corpus random_toy_corpus(Rng& rng) {
  std::vector<ContextRecord> records;
  const std::size_t n_bands = 1 + rng.below(10);
  std::size_t word_id = 0;
  for (std::size_t b = 0; b < n_bands; ++b) {
    const int band = static_cast<int>(1 + rng.below(10));
    bool used = false;
    for (const auto& r : records) used = used || r.word.band == band;
    if (used) continue;
    const std::size_t words = 1 + rng.below(40);
    for (std::size_t w = 0; w < words; ++w, ++word_id) {
      const std::string lemma = "lem" + std::to_string(word_id);
      const std::size_t contexts = 1 + rng.below(6);
      for (std::size_t c = 0; c < contexts; ++c) {
        ContextRecord r;
        r.id = lemma + "_" + std::to_string(c);
        r.word = {lemma, band};
        r.snippet = "a " + lemma + " b";
        r.occurrences = {{2, 2 + lemma.size()}};
        r.ratings = {static_cast<int>(rng.below(4)) - 1};
        r.gold = r.ratings[0];
        records.push_back(r);
      }
    }
  }
  return Corpus(records);
}

Verdict fold_integrity() {
  Verdict v;
  Rng rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus corpus = random_toy_corpus(rng);
    const std::size_t k = 2 + rng.below(9);
    const FoldPlan plan = make_word_unseen_folds(corpus, k, rng.next());
    if (plan.assignment.size() != corpus.size()) v.fail("plan does not cover the corpus");
    std::map<std::string, int> word_fold;
    std::map<int, std::size_t> band_words;
    std::map<std::pair<int, int>, std::size_t> fold_band_words;
    for (const auto& r : corpus.records()) {
      auto it = plan.assignment.find(r.id);
      if (it == plan.assignment.end() || it->second < 0 || it->second >= int(k)) {
        v.fail("context without a valid fold");
        continue;
      }
      auto [wf, inserted] = word_fold.emplace(r.word.lemma, it->second);
      if (!inserted && wf->second != it->second) v.fail("word split across folds");
    }
    for (const auto& tw : corpus.words()) {
      ++band_words[tw.band];
      ++fold_band_words[{word_fold[tw.lemma], tw.band}];
    }
    for (const auto& [band, n] : band_words) {
      const double share = double(n) / double(k);
      for (int f = 0; f < int(k); ++f) {
        const double got = double(fold_band_words[{f, band}]);
        if (std::abs(got - share) > 1.0) {
          v.fail("band " + std::to_string(band) + " fold " + std::to_string(f) + " off balance");
        }
      }
    }
    std::set<std::string> seen;
    for (int f : plan.folds()) {
      for (const auto& id : plan.test_ids(f))
        if (!seen.insert(id).second) v.fail("context in two test folds");
      check_no_leakage(corpus, plan, plan.train_ids(f), plan.test_ids(f));
    }
    if (seen.size() != corpus.size()) v.fail("test folds do not partition the corpus");

    // Corrupt the plan: one context of a test word moves to another fold.
    FoldPlan bad = plan;
    const std::string victim = plan.test_ids(0).front();
    bad.assignment[victim] = 1;
    bool tripped = false;
    try {
      check_no_leakage(corpus, bad, bad.train_ids(0), plan.test_ids(0));
    } catch (const LeakageError&) {
      tripped = true;
    }
    if (!tripped) v.fail("leakage guard did not trip");
  }
  if (v.pass) v.detail = "50 toy corpora partitioned, no split words, bands within +-1, guard trips";
  return v;
}

// ---------------------------------------------------------------- embed

Verdict proximity_properties() {
  Verdict v;
  const std::vector<double> e1{1, 0}, e2{0, 1}, d{1, 1};
  if (cosine(e1, e1) != 1.0) v.fail("identity");
  if (cosine(e1, e2) != 0.0) v.fail("orthogonality");
  if (cosine(d, e1) != -cosine(d, std::vector<double>{-1, 0})) v.fail("antisymmetry");
  if (cosine(e1, std::vector<double>{-1, 0}) != -1.0) v.fail("opposite");

  Rng rng(100);
  double worst_scale = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::string lemma = "target";
    std::string snippet;
    const std::size_t n = 3 + rng.below(30);
    const std::size_t at = rng.below(n);
    for (std::size_t t = 0; t < n; ++t) {
      if (t) snippet += ' ';
      snippet += t == at ? lemma : "tok" + std::to_string(rng.below(1000));
    }
    ContextRecord rec;
    rec.id = "b" + std::to_string(i);
    rec.word = {lemma, 1};
    rec.snippet = snippet;
    rec.occurrences = find_occurrences(snippet, lemma);
    rec.ratings = {1};
    rec.gold = 1;
    const EmbeddingBundle bundle = synthetic_embed(rec.id, snippet, 2 + rng.below(32), 9);
    const double base = proximity(rec, bundle);
    if (std::abs(base) > 1.0) v.fail("|proximity| > 1");

    EmbeddingBundle scaled = bundle;
    const double c = std::exp(rng.uniform(-5, 5));
    for (double& x : scaled.matrix) x *= c;
    worst_scale = std::max(worst_scale, std::abs(proximity(rec, scaled) - base));

    std::set<std::size_t> word;
    for (const CharSpan& s : rec.occurrences)
      for (std::size_t idx : align_span(bundle, s)) word.insert(idx);
    std::vector<std::size_t> context;
    for (std::size_t t = 0; t < bundle.n_tokens(); ++t)
      if (!word.count(t)) context.push_back(t);
    std::vector<std::size_t> shuffled = context;
    rng.shuffle(shuffled);
    EmbeddingBundle permuted = bundle;
    for (std::size_t j = 0; j < context.size(); ++j) {
      std::copy_n(bundle.matrix.begin() + long(shuffled[j] * bundle.dim), bundle.dim,
                  permuted.matrix.begin() + long(context[j] * bundle.dim));
    }
    if (proximity(rec, permuted) != base) v.fail("permutation changed proximity");
  }
  if (worst_scale > 1e-12) v.fail("scaling changed proximity by " + fmt("%.3g", worst_scale));
  if (v.pass) v.detail = "cosine cases exact; 100 bundles, max scale drift " + fmt("%.1e", worst_scale) + ", permutation exact";
  return v;
}

// ---------------------------------------------------------------- features

Verdict normalization() {
  Verdict v;
  Rng rng(9);
  SynthOptions so;
  so.n_words = 20;
  so.contexts_per_word = 6;
  so.dim = 4;
  so.informative_dims = 2;
  const SynthData data = make_synthetic_dataset(so);
  std::ostringstream csv;
  csv << "id,f_1,f_2,f_3,f_4\n";
  for (const auto& r : data.corpus.records()) {
    csv << r.id << ',' << format_shortest(rng.normal() * 1000.0 + 5e4) << ',' << format_shortest(rng.uniform(-1e-3, 1e-3))
        << ",7," << format_shortest(std::round(rng.uniform(0, 4))) << '\n';
  }
  const FeatureTable table = parse_features(csv.str());
  const FoldPlan plan = make_word_unseen_folds(data.corpus, 5, 3);
  double worst_mean = 0.0, worst_sd = 0.0;
  for (int f : plan.folds()) {
    const auto train_ids = plan.train_ids(f);
    const NormStats stats = fit_normalizer(table, train_ids);
    for (std::size_t j = 0; j < table.width(); ++j) {
      double sum = 0.0;
      std::vector<double> col;
      for (const auto& id : train_ids) col.push_back(normalized_row(stats, table, id)[j]);
      for (double x : col) sum += x;
      const double mean = sum / double(col.size());
      double ss = 0.0;
      for (double x : col) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / double(col.size() - 1));
      if (stats.zero_variance(j)) {
        if (sd != 0.0 || mean != 0.0) v.fail("constant column not mapped to 0");
        continue;
      }
      worst_mean = std::max(worst_mean, std::abs(mean));
      worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
    }
  }
  if (worst_mean >= 1e-9) v.fail("|mean| " + fmt("%.3g", worst_mean));
  if (worst_sd >= 1e-9) v.fail("|sd-1| " + fmt("%.3g", worst_sd));
  if (v.pass) v.detail = "5 folds, max |mean| " + fmt("%.1e", worst_mean) + ", max |sd-1| " + fmt("%.1e", worst_sd);
  return v;
}

// ---------------------------------------------------------------- cli

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = read_file(entry.path());
  return files;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::path(CTXCUR_TEST_TMP) / "acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  SynthOptions so;
  so.n_words = 16;
  so.contexts_per_word = 6;
  const SynthData data = make_synthetic_dataset(so);
  save_corpus(data.corpus, root / "corpus.jsonl");
  write_file(root / "features.csv", to_csv(data.features));
  write_bundles(data.bundles, BundlePaths::from_prefix(root / "bundles"));

  std::size_t files = 0;
  for (const char* model : {"unsupervised", "hybrid"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* jobs : {"1", "4", "1"}) {
      const fs::path out = root / (std::string(model) + "_j" + jobs + "_" + std::to_string(runs.size()));
      std::vector<std::string> args{"contextcurate", "cv", "--corpus", (root / "corpus.jsonl").string(), "--bundles",
                                    (root / "bundles").string(), "--features", (root / "features.csv").string(),
                                    "--model", model, "--k", "4", "--seed", "11", "--hidden", "32,32", "--epochs", "5",
                                    "--jobs", jobs, "--out", out.string()};
      std::ostringstream sink_out, sink_err;
      if (run_cli(args, sink_out, sink_err) != 0) {
        v.fail(std::string(model) + " cv failed: " + sink_err.str());
        return v;
      }
      runs.push_back(snapshot(out));
    }
    if (runs[0].size() != 8) v.fail("run directory has " + std::to_string(runs[0].size()) + " files");
    if (runs[0] != runs[1]) v.fail(std::string(model) + ": --jobs 1 and --jobs 4 differ");
    if (runs[0] != runs[2]) v.fail(std::string(model) + ": repeated runs differ");
    files += runs[0].size();
  }
  if (v.pass) v.detail = "unsupervised and hybrid cv, " + std::to_string(files) + " files byte-identical across jobs 1/4 and reruns";
  return v;
}

Verdict format_fidelity() {
  Verdict v;
  SweepRow row;
  row.threshold = 0.845;
  row.p_neg = 0.0077;
  row.p_mid = 0.0815;
  row.p_good = 0.5313;
  row.throwout = 0.7138;
  row.ratio = 69.1462;
  row.n_accepted = 16920;
  SweepRow empty;
  empty.threshold = 0.995;
  empty.p_neg = empty.p_mid = empty.p_good = empty.ratio = std::nan("");
  empty.throwout = 1.0;
  empty.n_accepted = 0;
  const std::string csv = sweep_csv({row, empty});
  const std::string expected = std::string(kSweepHeader) +
                               "\n0.845,0.0077,0.0815,0.5313,0.7138,69.1462,16920\n"
                               "0.995,nan,nan,nan,1.0000,nan,0\n";
  if (csv != expected) v.fail("rendered:\n" + csv);
  if (v.pass) v.detail = "0.845,0.0077,0.0815,0.5313,0.7138,69.1462,16920 and nan cells byte-exact";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"sweep oracle", sweep_oracle},
      {"accept-all identity", accept_all},
      {"monotonicity", monotonicity},
      {"AUC fixtures", auc_fixtures},
      {"gradient check", gradient_check},
      {"synthetic learnability", learnability},
      {"fold integrity", fold_integrity},
      {"proximity properties", proximity_properties},
      {"normalization", normalization},
      {"determinism", determinism},
      {"format fidelity", format_fidelity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
