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
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contextcurate/error.hpp"

namespace ctxcur {

class Corpus;

/// Handcrafted per-context features. Missing input cells are imputed to the
/// file-wide column mean at load time and remembered in `missing`, so that
/// normalization can substitute the training mean instead.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::map<std::string, std::vector<double>, std::less<>> rows;
  std::map<std::string, std::set<std::size_t>, std::less<>> missing;

  std::size_t width() const { return feature_names.size(); }
  bool is_missing(std::string_view id, std::size_t column) const;
};

/// Per-feature z-score parameters fitted on training rows only.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> sd;  // sample (n-1); 0 marks a zero-variance feature
  std::size_t fitted_on = 0;

  std::size_t width() const { return mean.size(); }
  bool zero_variance(std::size_t j) const { return sd[j] == 0.0; }
};

/// CSV with header `id,f_1,...,f_F`; an empty cell is missing.
FeatureTable load_features(const std::filesystem::path& path, Diagnostics* diag = nullptr);
FeatureTable parse_features(std::string_view text, Diagnostics* diag = nullptr);
std::string to_csv(const FeatureTable& table);

/// Mean and sample sd over `train_ids` only. Cells that were missing in the
/// input are skipped. Throws InputError for fewer than two training rows or
/// ids not in the table.
NormStats fit_normalizer(const FeatureTable& table, const std::vector<std::string>& train_ids);

/// (v_j - mean_j) / sd_j, with zero-variance features mapped to 0.
std::vector<double> apply_normalizer(const NormStats& stats, std::span<const double> vector);

/// Normalized row for `id`; cells missing in the input become 0 (the
/// training mean after centering).
std::vector<double> normalized_row(const NormStats& stats, const FeatureTable& table,
                                   std::string_view id);

/// CSV `feature,mean,sd,fitted_on` so hybrid checkpoints can score later.
std::string to_csv(const NormStats& stats, const std::vector<std::string>& names);
NormStats parse_norm_stats(std::string_view text);

/// Trivial plumbing features: snippet word count, occurrence count, snippet
/// byte length. Not meant to be informative.
FeatureTable demo_features(const Corpus& corpus);

}  // namespace ctxcur
