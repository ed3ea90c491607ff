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
#include <vector>

#include "contextcurate/corpus.hpp"
#include "contextcurate/embed.hpp"
#include "contextcurate/features.hpp"

namespace ctxcur {

/// Offline fixture generator. Gold labels are a clipped linear function of
/// each context's EOS vector over its first `informative_dims` coordinates,
/// quantized through `raters` integer ratings, so the supervised head has
/// something learnable and word-unseen CV still generalizes.
struct SynthOptions {
  std::size_t n_words = 16;
  std::vector<int> bands{1, 2};
  std::size_t contexts_per_word = 5;
  std::size_t dim = 16;
  std::size_t informative_dims = 5;
  std::size_t raters = 10;
  std::uint64_t seed = 7;
};

struct SynthData {
  Corpus corpus;
  BundleSet bundles;
  FeatureTable features;
};

SynthData make_synthetic_dataset(const SynthOptions& options);

/// Ratings in {-1,0,1,2} whose mean is the nearest multiple of 1/raters to
/// `target`, clipped to [-1, 2].
std::vector<int> ratings_for_mean(double target, std::size_t raters);

}  // namespace ctxcur
