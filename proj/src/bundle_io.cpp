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

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "contextcurate/embed.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_f32(std::string& out, double value) {
  const float f = static_cast<float>(value);
  if (static_cast<double>(f) != value && std::isfinite(value)) {
    // Anything not float32-representable would not survive a round trip.
    throw InvariantError("bundle value is not representable as float32");
  }
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

double get_f32(std::string_view in, std::size_t offset) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return static_cast<double>(std::bit_cast<float>(bits));
}

}  // namespace

BundlePaths BundlePaths::from_prefix(const std::filesystem::path& prefix) {
  std::string base = prefix.string();
  for (std::string_view ext : {".jsonl", ".bin"}) {
    if (base.size() > ext.size() && base.compare(base.size() - ext.size(), ext.size(), ext) == 0) {
      base.erase(base.size() - ext.size());
    }
  }
  return {base + ".jsonl", base + ".bin"};
}

EncodedBundles encode_bundles(const BundleSet& bundles) {
  using nlohmann::ordered_json;
  EncodedBundles out;
  for (const auto& [id, bundle] : bundles) {
    bundle.validate();
    ordered_json rec;
    rec["id"] = bundle.context_id;
    rec["dim"] = bundle.dim;
    rec["n_tokens"] = bundle.n_tokens();
    ordered_json offsets = ordered_json::array();
    for (const CharSpan& t : bundle.tokens) offsets.push_back({t.start, t.end});
    rec["offsets"] = std::move(offsets);
    rec["byte_offset"] = out.payload.size();
    rec["has_eos"] = bundle.eos_vector.has_value();
    rec["prompt_variant"] =
        bundle.prompt_variant ? ordered_json(std::string(to_string(*bundle.prompt_variant))) : ordered_json(nullptr);
    out.index += rec.dump();
    out.index.push_back('\n');
    for (double v : bundle.matrix) put_f32(out.payload, v);
    if (bundle.eos_vector) {
      for (double v : *bundle.eos_vector) put_f32(out.payload, v);
    }
  }
  return out;
}

BundleSet decode_bundles(std::string_view index, std::string_view payload) {
  using nlohmann::json;
  BundleSet bundles;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < index.size()) {
    std::size_t next = index.find('\n', pos);
    if (next == std::string_view::npos) next = index.size();
    const std::string_view line = trim(index.substr(pos, next - pos));
    pos = next + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string at = "bundle index line " + std::to_string(line_no) + ": ";

    EmbeddingBundle bundle;
    std::size_t byte_offset = 0;
    bool has_eos = false;
    try {
      const json rec = json::parse(line);
      bundle.context_id = rec.at("id").get<std::string>();
      bundle.dim = rec.at("dim").get<std::size_t>();
      const auto n_tokens = rec.at("n_tokens").get<std::size_t>();
      for (const json& o : rec.at("offsets")) {
        if (!o.is_array() || o.size() != 2) throw InputError("offset must be [start,end]");
        bundle.tokens.push_back({o[0].get<std::size_t>(), o[1].get<std::size_t>()});
      }
      if (bundle.tokens.size() != n_tokens) throw InputError("n_tokens does not match offsets");
      byte_offset = rec.at("byte_offset").get<std::size_t>();
      has_eos = rec.at("has_eos").get<bool>();
      if (rec.contains("prompt_variant") && !rec["prompt_variant"].is_null()) {
        bundle.prompt_variant = parse_prompt_variant(rec["prompt_variant"].get<std::string>());
      }
    } catch (const json::exception& e) {
      throw InputError(at + e.what());
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
    if (bundle.dim == 0) throw InputError(at + "dim must be positive");

    const std::size_t rows = bundle.n_tokens() + (has_eos ? 1 : 0);
    const std::size_t bytes = rows * bundle.dim * 4;
    if (byte_offset > payload.size() || payload.size() - byte_offset < bytes) {
      throw InputError(at + "payload range exceeds binary file size");
    }
    bundle.matrix.resize(bundle.n_tokens() * bundle.dim);
    std::size_t cursor = byte_offset;
    for (double& v : bundle.matrix) {
      v = get_f32(payload, cursor);
      cursor += 4;
    }
    if (has_eos) {
      std::vector<double> eos(bundle.dim);
      for (double& v : eos) {
        v = get_f32(payload, cursor);
        cursor += 4;
      }
      bundle.eos_vector = std::move(eos);
    }
    try {
      bundle.validate();
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
    const std::string id = bundle.context_id;
    if (!bundles.emplace(id, std::move(bundle)).second) throw InputError(at + "duplicate id '" + id + "'");
  }
  return bundles;
}

void write_bundles(const BundleSet& bundles, const BundlePaths& paths) {
  const EncodedBundles encoded = encode_bundles(bundles);
  write_file(paths.index, encoded.index);
  write_file(paths.payload, encoded.payload);
}

BundleSet read_bundles(const BundlePaths& paths) {
  return decode_bundles(read_file(paths.index), read_file(paths.payload));
}

}  // namespace ctxcur
