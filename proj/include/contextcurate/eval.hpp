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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contextcurate/corpus.hpp"
#include "contextcurate/curate.hpp"
#include "contextcurate/embed.hpp"
#include "contextcurate/features.hpp"
#include "contextcurate/head.hpp"

namespace ctxcur {

enum class Regime { word_unseen, word_seen };
enum class ModelSpec { unsupervised, supervised, hybrid };

std::string_view to_string(Regime regime);
std::string_view to_string(ModelSpec spec);
Regime parse_regime(std::string_view text);
ModelSpec parse_model_spec(std::string_view text);

/// Context id -> test fold. For word-seen splits the holdout is fold 0 and
/// contexts that only ever train carry kTrainOnly.
struct FoldPlan {
  static constexpr int kTrainOnly = -1;

  Regime regime = Regime::word_unseen;
  std::size_t k = 10;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 0;
  std::map<std::string, int, std::less<>> assignment;

  /// Distinct test folds, ascending.
  std::vector<int> folds() const;
  std::vector<std::string> test_ids(int fold) const;
  std::vector<std::string> train_ids(int fold) const;
};

/// Words are shuffled within each band and dealt round-robin into k groups;
/// the dealing position carries over between bands so remainders spread
/// across folds. A band with fewer than k words only warns.
FoldPlan make_word_unseen_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed,
                                Diagnostics* diag = nullptr);

/// Per word, round(fraction * n) contexts go to the holdout, at least 1 and
/// at most n - 1 when the word has two or more contexts. Single-context
/// words stay in training with a warning.
FoldPlan make_word_seen_split(const Corpus& corpus, double fraction, std::uint64_t seed,
                              Diagnostics* diag = nullptr);

/// CSV `context_id,fold`, rows sorted by id.
std::string folds_csv(const FoldPlan& plan);
/// Regime is word_seen when any row is train-only, word_unseen otherwise.
FoldPlan parse_folds_csv(std::string_view text);

/// Throws LeakageError when a test id is in the training ids, or, for
/// word-unseen plans, when a test word has any context in training.
void check_no_leakage(const Corpus& corpus, const FoldPlan& plan, const std::vector<std::string>& train_ids,
                      const std::vector<std::string>& test_ids);

/// Throws InputError unless the plan assigns exactly the corpus ids.
void check_plan_covers(const Corpus& corpus, const FoldPlan& plan);

struct ModelOptions {
  ModelSpec spec = ModelSpec::unsupervised;
  HeadConfig head;  // input_dim is filled in from the data
  TrainConfig train;
};

struct CvInputs {
  const Corpus* corpus = nullptr;
  const BundleSet* bundles = nullptr;
  const FeatureTable* features = nullptr;  // required for hybrid
};

/// Proximity score for each id.
ScoredSet score_unsupervised(const Corpus& corpus, const BundleSet& bundles, const std::vector<std::string>& ids);

/// Head inputs: the EOS vector, with normalized features appended for hybrid.
VectorMap build_head_inputs(ModelSpec spec, const BundleSet& bundles, const FeatureTable* features,
                            const NormStats* stats, const std::vector<std::string>& ids);

/// input_dim the head needs for `spec` on this data.
std::size_t head_input_dim(ModelSpec spec, const BundleSet& bundles, const FeatureTable* features);

struct FoldOutcome {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double train_gold_mean = 0.0;
  std::vector<double> epoch_losses;
  std::optional<NormStats> norm;
};

struct CvResult {
  ScoredSet predictions;       // pooled out-of-sample, sorted by id
  ScoredSet null_predictions;  // per-fold training mean, pooled the same way
  std::vector<FoldOutcome> folds;
};

/// Fits per fold on training ids only and pools holdout predictions. Folds
/// run on up to `jobs` threads; the result does not depend on `jobs`.
CvResult cross_validate(const CvInputs& inputs, const ModelOptions& options, const FoldPlan& plan,
                        std::size_t jobs = 1);

struct MetricReport {
  double rmse = 0.0;
  double r2 = 0.0;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n = 0;
};

/// All four require n >= 2 and throw InputError otherwise. r2 throws on
/// constant gold; pearson and spearman throw on a constant side.
double rmse(const ScoredSet& scored);
double r2(const ScoredSet& scored);
double pearson(const ScoredSet& scored);
double spearman(const ScoredSet& scored);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Every metric, NaN where undefined.
MetricReport evaluate(const ScoredSet& scored);

/// Constant predictor equal to the mean training gold.
struct NullModel {
  double mean = 0.0;
  double predict() const { return mean; }
};

NullModel null_model(std::span<const double> train_golds);

}  // namespace ctxcur
