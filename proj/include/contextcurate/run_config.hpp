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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "contextcurate/eval.hpp"
#include "contextcurate/head.hpp"

namespace ctxcur {

/// Everything a run needs. Read from a flat `key = value` file (a TOML
/// subset: strings, numbers, booleans, integer arrays, `#` comments), then
/// overridden by CONTEXTCURATE_SEED, then by command-line flags.
struct RunConfig {
  std::string corpus;
  std::string features;
  std::string bundles;  // CTXEMB1 prefix, index or payload path
  std::string checkpoint;
  std::string norm_stats;
  std::string out;  // not echoed: the run directory is the output itself

  ModelSpec model = ModelSpec::unsupervised;
  Regime regime = Regime::word_unseen;
  std::size_t k = 10;
  double fraction = 0.1;
  std::uint64_t seed = 0;

  HeadConfig head;
  TrainConfig train;

  std::string grid = "auto";  // or lo:hi:step
  bool good_strict = false;
  double reference_throwout = 0.70;

  /// Applies one key. Throws InputError on an unknown key or bad value.
  void set(std::string_view key, std::string_view raw_value);

  /// Resolved settings, one per line, keys sorted.
  std::string to_toml() const;
};

/// Raw `key -> value text` pairs. Throws InputError naming the line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

RunConfig parse_run_config(std::string_view text);

}  // namespace ctxcur
