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

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contextcurate/error.hpp"

namespace ctxcur {

inline constexpr int kMinBand = 1;
inline constexpr int kMaxBand = 10;

/// A vocabulary item. `lemma` is the exact inflection as it appears in the
/// snippets, so "run" and "ran" are different target words.
struct TargetWord {
  std::string lemma;
  int band = kMinBand;

  friend bool operator==(const TargetWord&, const TargetWord&) = default;
};

/// Half-open byte range [start, end) into a snippet.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct ContextRecord {
  std::string id;
  TargetWord word;
  std::string snippet;
  std::vector<CharSpan> occurrences;
  std::vector<int> ratings;
  double gold = 0.0;

  friend bool operator==(const ContextRecord&, const ContextRecord&) = default;
};

enum class Category { misdirective, middle, directive };

std::string_view to_string(Category category);

class Corpus {
 public:
  Corpus() = default;

  /// Validates every invariant and throws LoadError listing each failure.
  explicit Corpus(std::vector<ContextRecord> records);

  const std::vector<ContextRecord>& records() const { return records_; }
  /// Distinct target words sorted by lemma.
  const std::vector<TargetWord>& words() const { return words_; }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Throws InputError for an unknown id.
  const ContextRecord& at(std::string_view id) const;
  bool contains(std::string_view id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.records_ == b.records_;
  }

 private:
  std::vector<ContextRecord> records_;
  std::vector<TargetWord> words_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct CorpusSummary {
  std::size_t n_contexts = 0;
  std::size_t n_words = 0;
  std::array<std::size_t, kMaxBand + 1> words_per_band{};  // index 1..10
  double gold_mean = 0.0;
  double gold_sd = 0.0;  // sample (n-1) estimator; 0 for a single record
  double fraction_misdirective = 0.0;
  double fraction_directive = 0.0;
};

/// Arithmetic mean of ordinal ratings, no rounding.
/// Throws InputError on an empty list or a rating outside {-1,0,1,2}.
double aggregate_label(std::span<const int> ratings);

/// misdirective iff gold < 0, directive iff gold > 1, otherwise middle.
Category categorize(double gold);

CorpusSummary summarize(const Corpus& corpus);

/// Human-readable block for `validate` and reports.
std::string format_summary(const CorpusSummary& summary);

/// Finds every case-insensitive (ASCII) occurrence of `word` in `snippet`.
std::vector<CharSpan> find_occurrences(std::string_view snippet, std::string_view word);

/// Counts whitespace-separated words.
std::size_t word_count(std::string_view snippet);

/// Loads JSON-lines (any extension but .csv) or CSV (.csv). Records that fail
/// validation are all reported together in a LoadError. Snippet-length
/// findings go to `diag` as warnings.
Corpus load_corpus(const std::filesystem::path& path, Diagnostics* diag = nullptr);

Corpus parse_corpus_jsonl(std::string_view text, Diagnostics* diag = nullptr);
Corpus parse_corpus_csv(std::string_view text, Diagnostics* diag = nullptr);

std::string to_jsonl(const Corpus& corpus);
std::string to_csv(const Corpus& corpus);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace ctxcur
