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

#include "contextcurate/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "contextcurate/rng.hpp"

namespace ctxcur {
namespace {

// Summing in sorted order makes the pooled mean independent of row order,
// bit for bit.
void mean_rows_into(const EmbeddingBundle& bundle, const std::vector<std::size_t>& rows,
                    std::vector<double>& out) {
  out.assign(bundle.dim, 0.0);
  std::vector<double> column(rows.size());
  for (std::size_t d = 0; d < bundle.dim; ++d) {
    for (std::size_t i = 0; i < rows.size(); ++i) column[i] = bundle.matrix[rows[i] * bundle.dim + d];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    out[d] = sum / static_cast<double>(rows.size());
  }
}

}  // namespace

std::string_view to_string(PromptVariant variant) {
  switch (variant) {
    case PromptVariant::plain:
      return "plain";
    case PromptVariant::instruction:
      return "instruction";
    case PromptVariant::hybrid:
      return "hybrid";
  }
  return "?";
}

PromptVariant parse_prompt_variant(std::string_view text) {
  if (text == "plain") return PromptVariant::plain;
  if (text == "instruction") return PromptVariant::instruction;
  if (text == "hybrid") return PromptVariant::hybrid;
  throw InputError("unknown prompt variant '" + std::string(text) + "'");
}

std::string build_prompt(PromptVariant variant, std::string_view target_word) {
  if (target_word.empty()) throw InputError("prompt needs a target word");
  const std::string word(target_word);
  switch (variant) {
    case PromptVariant::plain:
      return word;
    case PromptVariant::instruction:
      return "Rate how contextually informative the context is about " + word;
    case PromptVariant::hybrid:
      return "What is the definition of " + word + "?";
  }
  throw InputError("unknown prompt variant");
}

void EmbeddingBundle::validate() const {
  const std::string at = "bundle '" + context_id + "': ";
  if (dim == 0) throw InputError(at + "dim must be positive");
  if (matrix.size() != tokens.size() * dim) {
    throw InputError(at + "matrix has " + std::to_string(matrix.size()) + " values, expected " +
                     std::to_string(tokens.size()) + " x " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].end < tokens[i].start) throw InputError(at + "token " + std::to_string(i) + " has end < start");
    if (i > 0 && (tokens[i].start < tokens[i - 1].start || tokens[i].start < tokens[i - 1].end)) {
      throw InputError(at + "token offsets overlap or decrease at token " + std::to_string(i));
    }
  }
  if (eos_vector && eos_vector->size() != dim) throw InputError(at + "eos vector length differs from dim");
  for (double v : matrix) {
    if (!std::isfinite(v)) throw InputError(at + "non-finite value in token matrix");
  }
}

std::vector<std::size_t> align_span(const EmbeddingBundle& bundle, CharSpan span) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < bundle.tokens.size(); ++i) {
    const CharSpan& t = bundle.tokens[i];
    if (std::max(t.start, span.start) < std::min(t.end, span.end)) hits.push_back(i);
  }
  if (hits.empty()) {
    throw InputError("bundle '" + bundle.context_id + "': no token overlaps span [" +
                     std::to_string(span.start) + "," + std::to_string(span.end) + ")");
  }
  return hits;
}

PooledPair pool_pair(const EmbeddingBundle& bundle, std::span<const std::size_t> word_token_indices) {
  std::vector<bool> is_word(bundle.n_tokens(), false);
  for (std::size_t i : word_token_indices) {
    if (i >= bundle.n_tokens()) throw InputError("word token index out of range");
    is_word[i] = true;
  }
  std::vector<std::size_t> word_rows, context_rows;
  for (std::size_t i = 0; i < is_word.size(); ++i) (is_word[i] ? word_rows : context_rows).push_back(i);
  if (word_rows.empty()) throw InputError("bundle '" + bundle.context_id + "': no word tokens selected");
  if (context_rows.empty()) {
    throw InputError("bundle '" + bundle.context_id + "': word tokens cover the whole context");
  }
  PooledPair pair;
  mean_rows_into(bundle, word_rows, pair.word_vec);
  mean_rows_into(bundle, context_rows, pair.context_vec);
  return pair;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("cosine: length mismatch");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw InputError("cosine: zero-norm vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

double proximity(const ContextRecord& record, const EmbeddingBundle& bundle) {
  if (bundle.context_id != record.id) {
    throw InputError("bundle '" + bundle.context_id + "' does not belong to record '" + record.id + "'");
  }
  std::vector<std::size_t> word_tokens;
  for (const CharSpan& span : record.occurrences) {
    const auto hits = align_span(bundle, span);
    word_tokens.insert(word_tokens.end(), hits.begin(), hits.end());
  }
  std::sort(word_tokens.begin(), word_tokens.end());
  word_tokens.erase(std::unique(word_tokens.begin(), word_tokens.end()), word_tokens.end());
  const PooledPair pair = pool_pair(bundle, word_tokens);
  return cosine(pair.word_vec, pair.context_vec);
}

EmbeddingBundle synthetic_embed(std::string_view context_id, std::string_view snippet,
                                std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw InputError("synthetic_embed: dim must be at least 2");
  EmbeddingBundle bundle;
  bundle.context_id = std::string(context_id);
  bundle.dim = dim;
  std::size_t i = 0;
  while (i < snippet.size()) {
    while (i < snippet.size() && std::isspace(static_cast<unsigned char>(snippet[i]))) ++i;
    if (i == snippet.size()) break;
    const std::size_t start = i;
    while (i < snippet.size() && !std::isspace(static_cast<unsigned char>(snippet[i]))) ++i;
    bundle.tokens.push_back({start, i});
    Rng rng(derive_seed(seed, fnv1a64(snippet.substr(start, i - start))));
    for (std::size_t d = 0; d < dim; ++d) {
      bundle.matrix.push_back(static_cast<double>(static_cast<float>(rng.uniform(-1.0, 1.0))));
    }
  }
  if (bundle.tokens.empty()) throw InputError("synthetic_embed: empty snippet");
  return bundle;
}

}  // namespace ctxcur
