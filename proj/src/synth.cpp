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

#include "contextcurate/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "contextcurate/rng.hpp"

namespace ctxcur {
namespace {

constexpr const char* kFiller[] = {
    "the",   "river",  "was",    "quiet", "when",  "she",   "walked", "into",   "town",   "and",
    "found", "an",     "old",    "map",   "under", "a",     "broken", "lamp",   "which",  "seemed",
    "to",    "point",  "toward", "hills", "where", "few",   "people", "ever",   "went",   "after",
    "dark",  "though", "nobody", "could", "say",   "why",   "it",     "felt",   "so",     "strange",
    "of",    "in",     "on",     "with",  "their", "small", "garden", "market", "letter", "morning"};

constexpr const char* kSyllables[] = {"zor", "quel", "vint", "brax", "mip", "dro", "sule", "kef",
                                      "jav", "tun",  "plo",  "gry",  "wex", "fim", "hask", "yol"};

std::string make_lemma(Rng& rng, const std::set<std::string>& taken) {
  for (;;) {
    std::string lemma;
    const std::size_t parts = 3 + rng.below(2);
    for (std::size_t i = 0; i < parts; ++i) lemma += kSyllables[rng.below(std::size(kSyllables))];
    if (!taken.count(lemma)) return lemma;
  }
}

}  // namespace

std::vector<int> ratings_for_mean(double target, std::size_t raters) {
  const auto r = static_cast<long long>(raters);
  long long total = std::llround(std::clamp(target, -1.0, 2.0) * static_cast<double>(raters));
  total = std::clamp(total, -r, 2 * r);
  std::vector<int> ratings(raters, -1);
  long long increments = total + r;  // each step raises one rating by 1
  for (std::size_t i = 0; increments > 0; i = (i + 1) % raters) {
    if (ratings[i] < 2) {
      ++ratings[i];
      --increments;
    }
  }
  return ratings;
}

SynthData make_synthetic_dataset(const SynthOptions& options) {
  if (options.bands.empty() || options.n_words == 0 || options.contexts_per_word == 0) {
    throw InputError("synthetic dataset needs words, bands and contexts");
  }
  if (options.informative_dims == 0 || options.informative_dims > options.dim) {
    throw InputError("informative_dims must be in [1, dim]");
  }
  Rng rng(derive_seed(options.seed, 1));
  const double w_norm = std::sqrt(static_cast<double>(options.informative_dims));

  std::set<std::string> lemmas;
  std::vector<ContextRecord> records;
  BundleSet bundles;
  for (std::size_t w = 0; w < options.n_words; ++w) {
    const std::string lemma = make_lemma(rng, lemmas);
    lemmas.insert(lemma);
    const int band = options.bands[w % options.bands.size()];
    for (std::size_t c = 0; c < options.contexts_per_word; ++c) {
      ContextRecord record;
      record.id = lemma + "-" + std::to_string(c);
      record.word = {lemma, band};

      const std::size_t n_tokens = 42 + rng.below(24);
      std::vector<std::string> tokens;
      for (std::size_t t = 0; t < n_tokens; ++t) tokens.emplace_back(kFiller[rng.below(std::size(kFiller))]);
      const std::size_t n_occ = 1 + rng.below(2);
      std::set<std::size_t> slots;
      while (slots.size() < n_occ) slots.insert(rng.below(n_tokens));
      for (std::size_t s : slots) tokens[s] = lemma;
      // Sentence-initial capitalization exercises case-insensitive matching.
      tokens[0][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tokens[0][0])));

      for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (t) record.snippet.push_back(' ');
        if (slots.count(t)) record.occurrences.push_back({record.snippet.size(), record.snippet.size() + lemma.size()});
        record.snippet += tokens[t];
      }
      record.snippet.push_back('.');

      std::vector<double> eos(options.dim);
      for (double& v : eos) v = static_cast<double>(static_cast<float>(rng.normal()));
      double z = 0.0;
      for (std::size_t d = 0; d < options.informative_dims; ++d) z += eos[d];
      z /= w_norm;
      record.ratings = ratings_for_mean(0.6 + 0.45 * z, options.raters);
      record.gold = aggregate_label(record.ratings);

      EmbeddingBundle bundle = synthetic_embed(record.id, record.snippet, options.dim, options.seed);
      bundle.eos_vector = std::move(eos);
      bundle.prompt_variant = PromptVariant::instruction;
      bundles.emplace(record.id, std::move(bundle));
      records.push_back(std::move(record));
    }
  }
  SynthData data{Corpus(std::move(records)), std::move(bundles), {}};
  data.features = demo_features(data.corpus);
  return data;
}

}  // namespace ctxcur
