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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contextcurate/corpus.hpp"

namespace ctxcur {

enum class PromptVariant { plain, instruction, hybrid };

std::string_view to_string(PromptVariant variant);
PromptVariant parse_prompt_variant(std::string_view text);

/// Query-side text an exporter pairs with the plain snippet when producing
/// EOS vectors for `variant`.
std::string build_prompt(PromptVariant variant, std::string_view target_word);

/// Final-hidden-layer token states for one context, plus an optional
/// end-of-sequence vector. Rows hold real-text tokens only; special tokens
/// are stripped before a bundle is written.
///
/// Values are kept as doubles but every value read from or written to a
/// CTXEMB1 file is a float32, so file round trips are bit-exact.
struct EmbeddingBundle {
  std::string context_id;
  std::size_t dim = 0;
  std::vector<CharSpan> tokens;
  std::vector<double> matrix;  // tokens.size() x dim, row-major
  std::optional<std::vector<double>> eos_vector;
  std::optional<PromptVariant> prompt_variant;

  std::size_t n_tokens() const { return tokens.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(matrix).subspan(i * dim, dim);
  }

  /// Throws InputError naming the first broken invariant.
  void validate() const;

  friend bool operator==(const EmbeddingBundle&, const EmbeddingBundle&) = default;
};

struct PooledPair {
  std::vector<double> word_vec;
  std::vector<double> context_vec;
};

using BundleSet = std::map<std::string, EmbeddingBundle, std::less<>>;

/// Indices of every token overlapping `span` by at least one byte, ascending.
/// Throws InputError when nothing overlaps.
std::vector<std::size_t> align_span(const EmbeddingBundle& bundle, CharSpan span);

/// word_vec is the mean of the selected rows, context_vec the mean of all the
/// others. Duplicate indices are ignored. Throws InputError when the
/// selection is empty, out of range, or covers every token.
PooledPair pool_pair(const EmbeddingBundle& bundle, std::span<const std::size_t> word_token_indices);

/// Cosine similarity clipped into [-1, 1]. Throws InputError on a zero-norm
/// input or a length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

/// Cosine of the pooled word and context vectors, with every occurrence
/// span's tokens pooled into the word side.
double proximity(const ContextRecord& record, const EmbeddingBundle& bundle);

/// Offline stand-in for an encoder: whitespace tokens with exact byte
/// offsets, and per-token vectors drawn uniformly from [-1, 1] by a PRNG
/// keyed on (token text, seed). Values are float32-representable.
EmbeddingBundle synthetic_embed(std::string_view context_id, std::string_view snippet,
                                std::size_t dim, std::uint64_t seed);

/// CTXEMB1 storage: `<prefix>.jsonl` index plus `<prefix>.bin` payload of
/// little-endian float32, row-major, token rows then the optional EOS row.
struct BundlePaths {
  std::filesystem::path index;
  std::filesystem::path payload;

  static BundlePaths from_prefix(const std::filesystem::path& prefix);
};

void write_bundles(const BundleSet& bundles, const BundlePaths& paths);
BundleSet read_bundles(const BundlePaths& paths);

/// In-memory forms of the two files, for tests and tools.
struct EncodedBundles {
  std::string index;
  std::string payload;
};
EncodedBundles encode_bundles(const BundleSet& bundles);
BundleSet decode_bundles(std::string_view index, std::string_view payload);

}  // namespace ctxcur
