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

#include "contextcurate/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "contextcurate/csv.hpp"
#include "contextcurate/rng.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_pairs(const ScoredSet& scored, std::string_view metric) {
  if (scored.size() < 2) throw InputError(std::string(metric) + " needs at least 2 pairs");
}

double pearson_of(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw InputError("correlation undefined for a constant input");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void split_columns(const ScoredSet& scored, std::vector<double>& pred, std::vector<double>& gold) {
  for (const ScoredEntry& e : scored.entries) {
    pred.push_back(e.score);
    gold.push_back(e.gold);
  }
}

// Holdout predictions for one fold.
struct FoldWork {
  FoldOutcome outcome;
  std::vector<ScoredEntry> predictions;
  std::vector<ScoredEntry> null_predictions;
};

FoldWork run_fold(const CvInputs& in, const ModelOptions& options, const FoldPlan& plan, int fold) {
  const Corpus& corpus = *in.corpus;
  const std::vector<std::string> train_ids = plan.train_ids(fold);
  const std::vector<std::string> test_ids = plan.test_ids(fold);
  check_no_leakage(corpus, plan, train_ids, test_ids);

  FoldWork work;
  work.outcome.fold = fold;
  work.outcome.n_train = train_ids.size();
  work.outcome.n_test = test_ids.size();

  std::vector<double> train_golds;
  LabelMap labels;
  for (const std::string& id : train_ids) {
    const double y = corpus.at(id).gold;
    train_golds.push_back(y);
    labels.emplace(id, y);
  }
  const NullModel null = null_model(train_golds);
  work.outcome.train_gold_mean = null.mean;

  if (options.spec == ModelSpec::unsupervised) {
    work.predictions = score_unsupervised(corpus, *in.bundles, test_ids).entries;
  } else {
    const NormStats* stats = nullptr;
    if (options.spec == ModelSpec::hybrid) {
      work.outcome.norm = fit_normalizer(*in.features, train_ids);
      stats = &*work.outcome.norm;
    }
    HeadConfig head_config = options.head;
    head_config.input_dim = head_input_dim(options.spec, *in.bundles, in.features);
    TrainConfig train_config = options.train;
    train_config.seed = derive_seed(options.train.seed, static_cast<std::uint64_t>(fold) + 1);

    const VectorMap train_inputs = build_head_inputs(options.spec, *in.bundles, in.features, stats, train_ids);
    TrainResult trained = train(train_inputs, labels, train_ids, head_config, train_config);
    work.outcome.epoch_losses = std::move(trained.epoch_losses);

    const VectorMap test_inputs = build_head_inputs(options.spec, *in.bundles, in.features, stats, test_ids);
    for (const auto& [id, yhat] : predict_batch(trained.head, test_inputs)) {
      work.predictions.push_back({id, yhat, corpus.at(id).gold});
    }
  }
  for (const std::string& id : test_ids) work.null_predictions.push_back({id, null.predict(), corpus.at(id).gold});
  return work;
}

}  // namespace

std::string_view to_string(Regime regime) {
  return regime == Regime::word_unseen ? "word_unseen" : "word_seen";
}

std::string_view to_string(ModelSpec spec) {
  switch (spec) {
    case ModelSpec::unsupervised:
      return "unsupervised";
    case ModelSpec::supervised:
      return "supervised";
    case ModelSpec::hybrid:
      return "hybrid";
  }
  return "?";
}

Regime parse_regime(std::string_view text) {
  if (text == "word_unseen" || text == "word-unseen") return Regime::word_unseen;
  if (text == "word_seen" || text == "word-seen") return Regime::word_seen;
  throw InputError("unknown regime '" + std::string(text) + "'");
}

ModelSpec parse_model_spec(std::string_view text) {
  if (text == "unsupervised") return ModelSpec::unsupervised;
  if (text == "supervised") return ModelSpec::supervised;
  if (text == "hybrid") return ModelSpec::hybrid;
  throw InputError("unknown model spec '" + std::string(text) + "'");
}

std::vector<int> FoldPlan::folds() const {
  std::set<int> distinct;
  for (const auto& [id, fold] : assignment) {
    if (fold != kTrainOnly) distinct.insert(fold);
  }
  return {distinct.begin(), distinct.end()};
}

std::vector<std::string> FoldPlan::test_ids(int fold) const {
  std::vector<std::string> ids;
  for (const auto& [id, f] : assignment) {
    if (f == fold) ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> FoldPlan::train_ids(int fold) const {
  std::vector<std::string> ids;
  for (const auto& [id, f] : assignment) {
    if (f != fold) ids.push_back(id);
  }
  return ids;
}

FoldPlan make_word_unseen_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed, Diagnostics* diag) {
  if (k < 2) throw InputError("word-unseen folds need k >= 2");
  if (corpus.empty()) throw InputError("cannot split an empty corpus");
  std::map<int, std::vector<std::string>> by_band;
  for (const TargetWord& w : corpus.words()) by_band[w.band].push_back(w.lemma);

  std::map<std::string, int> word_fold;
  std::size_t dealer = 0;
  for (auto& [band, words] : by_band) {
    if (words.size() < k && diag) {
      diag->warn("band " + std::to_string(band) + " has " + std::to_string(words.size()) +
                 " words, fewer than k=" + std::to_string(k) + "; some folds get none of it");
    }
    Rng(derive_seed(seed, static_cast<std::uint64_t>(band))).shuffle(words);
    for (const std::string& lemma : words) word_fold[lemma] = static_cast<int>(dealer++ % k);
  }

  FoldPlan plan;
  plan.regime = Regime::word_unseen;
  plan.k = k;
  plan.seed = seed;
  for (const ContextRecord& r : corpus.records()) plan.assignment[r.id] = word_fold.at(r.word.lemma);
  return plan;
}

FoldPlan make_word_seen_split(const Corpus& corpus, double fraction, std::uint64_t seed, Diagnostics* diag) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("holdout fraction must be in (0,1)");
  std::map<std::string, std::vector<std::string>> by_word;
  for (const ContextRecord& r : corpus.records()) by_word[r.word.lemma].push_back(r.id);

  FoldPlan plan;
  plan.regime = Regime::word_seen;
  plan.k = 1;
  plan.holdout_fraction = fraction;
  plan.seed = seed;
  for (auto& [lemma, ids] : by_word) {
    std::sort(ids.begin(), ids.end());
    const std::size_t n = ids.size();
    std::size_t holdout = 0;
    if (n < 2) {
      if (diag) diag->warn("word '" + lemma + "' has a single context; it stays in training");
    } else {
      holdout = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
      holdout = std::clamp<std::size_t>(holdout, 1, n - 1);
    }
    Rng(derive_seed(seed, fnv1a64(lemma))).shuffle(ids);
    for (std::size_t i = 0; i < n; ++i) plan.assignment[ids[i]] = i < holdout ? 0 : FoldPlan::kTrainOnly;
  }
  return plan;
}

std::string folds_csv(const FoldPlan& plan) {
  std::string out = "context_id,fold\n";
  for (const auto& [id, fold] : plan.assignment) out += csv::escape(id) + "," + std::to_string(fold) + "\n";
  return out;
}

FoldPlan parse_folds_csv(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front().fields != std::vector<std::string>{"context_id", "fold"}) {
    throw InputError("fold file: expected header context_id,fold");
  }
  FoldPlan plan;
  bool train_only = false;
  int max_fold = -1;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    const auto fold = f.size() == 2 ? parse_int(f[1]) : std::nullopt;
    if (!fold || *fold < FoldPlan::kTrainOnly) {
      throw InputError("fold file line " + std::to_string(records[i].line) + ": malformed row");
    }
    if (!plan.assignment.emplace(f[0], static_cast<int>(*fold)).second) {
      throw InputError("fold file line " + std::to_string(records[i].line) + ": duplicate id");
    }
    train_only |= *fold == FoldPlan::kTrainOnly;
    max_fold = std::max(max_fold, static_cast<int>(*fold));
  }
  plan.regime = train_only ? Regime::word_seen : Regime::word_unseen;
  plan.k = static_cast<std::size_t>(std::max(max_fold + 1, 1));
  return plan;
}

void check_no_leakage(const Corpus& corpus, const FoldPlan& plan, const std::vector<std::string>& train_ids,
                      const std::vector<std::string>& test_ids) {
  const std::set<std::string> test(test_ids.begin(), test_ids.end());
  std::set<std::string> test_words;
  if (plan.regime == Regime::word_unseen) {
    for (const std::string& id : test_ids) test_words.insert(corpus.at(id).word.lemma);
  }
  for (const std::string& id : train_ids) {
    if (test.count(id)) throw LeakageError("holdout context '" + id + "' is in the training set");
    if (!test_words.empty()) {
      const std::string& lemma = corpus.at(id).word.lemma;
      if (test_words.count(lemma)) {
        throw LeakageError("holdout word '" + lemma + "' has training context '" + id + "'");
      }
    }
  }
}

void check_plan_covers(const Corpus& corpus, const FoldPlan& plan) {
  for (const ContextRecord& r : corpus.records()) {
    if (!plan.assignment.count(r.id)) throw InputError("fold plan does not assign context '" + r.id + "'");
  }
  for (const auto& [id, fold] : plan.assignment) {
    if (!corpus.contains(id)) throw InputError("fold plan names unknown context '" + id + "'");
  }
  if (plan.folds().empty()) throw InputError("fold plan has no test folds");
}

ScoredSet score_unsupervised(const Corpus& corpus, const BundleSet& bundles, const std::vector<std::string>& ids) {
  ScoredSet scored;
  for (const std::string& id : ids) {
    const ContextRecord& record = corpus.at(id);
    auto it = bundles.find(id);
    if (it == bundles.end()) throw InputError("missing embedding bundle for '" + id + "'");
    scored.entries.push_back({id, proximity(record, it->second), record.gold});
  }
  return scored;
}

std::size_t head_input_dim(ModelSpec spec, const BundleSet& bundles, const FeatureTable* features) {
  if (spec == ModelSpec::unsupervised) throw InvariantError("the unsupervised model has no head");
  if (bundles.empty()) throw InputError("no embedding bundles");
  const std::size_t dim = bundles.begin()->second.dim;
  if (spec == ModelSpec::supervised) return dim;
  if (!features) throw InputError("features required for the hybrid model");
  return dim + features->width();
}

VectorMap build_head_inputs(ModelSpec spec, const BundleSet& bundles, const FeatureTable* features,
                            const NormStats* stats, const std::vector<std::string>& ids) {
  if (spec == ModelSpec::hybrid && (!features || !stats)) throw InputError("features required for the hybrid model");
  VectorMap inputs;
  std::size_t dim = 0;
  for (const std::string& id : ids) {
    auto it = bundles.find(id);
    if (it == bundles.end()) throw InputError("missing embedding bundle for '" + id + "'");
    if (!it->second.eos_vector) throw InputError("bundle '" + id + "' has no end-of-sequence vector");
    if (dim == 0) dim = it->second.dim;
    if (it->second.dim != dim) throw InputError("bundle '" + id + "' has a different dim");
    std::vector<double> x = *it->second.eos_vector;
    if (spec == ModelSpec::hybrid) {
      const std::vector<double> f = normalized_row(*stats, *features, id);
      x.insert(x.end(), f.begin(), f.end());
    }
    inputs.emplace(id, std::move(x));
  }
  return inputs;
}

CvResult cross_validate(const CvInputs& inputs, const ModelOptions& options, const FoldPlan& plan,
                        std::size_t jobs) {
  if (!inputs.corpus || !inputs.bundles) throw InvariantError("cross_validate needs a corpus and bundles");
  if (options.spec == ModelSpec::hybrid && !inputs.features) throw InputError("features required for the hybrid model");
  check_plan_covers(*inputs.corpus, plan);

  const std::vector<int> folds = plan.folds();
  std::vector<FoldWork> results(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < folds.size(); i = next++) {
      try {
        results[i] = run_fold(inputs, options, plan, folds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, folds.size());
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CvResult result;
  for (FoldWork& w : results) {
    result.predictions.entries.insert(result.predictions.entries.end(), w.predictions.begin(), w.predictions.end());
    result.null_predictions.entries.insert(result.null_predictions.entries.end(), w.null_predictions.begin(),
                                           w.null_predictions.end());
    result.folds.push_back(std::move(w.outcome));
  }
  auto by_id = [](const ScoredEntry& a, const ScoredEntry& b) { return a.id < b.id; };
  std::sort(result.predictions.entries.begin(), result.predictions.entries.end(), by_id);
  std::sort(result.null_predictions.entries.begin(), result.null_predictions.entries.end(), by_id);
  result.predictions.validate();
  return result;
}

double rmse(const ScoredSet& scored) {
  require_pairs(scored, "rmse");
  double ss = 0.0;
  for (const ScoredEntry& e : scored.entries) ss += (e.score - e.gold) * (e.score - e.gold);
  return std::sqrt(ss / static_cast<double>(scored.size()));
}

double r2(const ScoredSet& scored) {
  require_pairs(scored, "r2");
  double mean = 0.0;
  for (const ScoredEntry& e : scored.entries) mean += e.gold;
  mean /= static_cast<double>(scored.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const ScoredEntry& e : scored.entries) {
    ss_res += (e.score - e.gold) * (e.score - e.gold);
    ss_tot += (e.gold - mean) * (e.gold - mean);
  }
  if (ss_tot == 0.0) throw InputError("r2 undefined: gold labels have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double pearson(const ScoredSet& scored) {
  require_pairs(scored, "pearson");
  std::vector<double> pred, gold;
  split_columns(scored, pred, gold);
  return pearson_of(pred, gold);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const ScoredSet& scored) {
  require_pairs(scored, "spearman");
  std::vector<double> pred, gold;
  split_columns(scored, pred, gold);
  return pearson_of(average_ranks(pred), average_ranks(gold));
}

MetricReport evaluate(const ScoredSet& scored) {
  MetricReport report;
  report.n = scored.size();
  auto guarded = [&](double (*metric)(const ScoredSet&)) {
    try {
      return metric(scored);
    } catch (const InputError&) {
      return kNaN;
    }
  };
  report.rmse = guarded(&rmse);
  report.r2 = guarded(&r2);
  report.pearson_r = guarded(&pearson);
  report.spearman_rho = guarded(&spearman);
  return report;
}

NullModel null_model(std::span<const double> train_golds) {
  if (train_golds.empty()) throw InputError("null model needs training labels");
  double sum = 0.0;
  for (double y : train_golds) sum += y;
  return {sum / static_cast<double>(train_golds.size())};
}

}  // namespace ctxcur
