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

#include "contextcurate/run_config.hpp"

#include <cmath>
#include <sstream>

#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

std::string unquote(std::string_view raw, std::string_view key) {
  raw = trim(raw);
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
    throw InputError("config key '" + std::string(key) + "' expects a quoted string");
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
    out.push_back(raw[i]);
  }
  return out;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

double as_double(std::string_view raw, std::string_view key) {
  const auto v = parse_double(raw);
  if (!v || !std::isfinite(*v)) throw InputError("config key '" + std::string(key) + "' expects a number");
  return *v;
}

std::uint64_t as_count(std::string_view raw, std::string_view key) {
  const auto v = parse_int(raw);
  if (!v || *v < 0) throw InputError("config key '" + std::string(key) + "' expects a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

bool as_bool(std::string_view raw, std::string_view key) {
  raw = trim(raw);
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw InputError("config key '" + std::string(key) + "' expects true or false");
}

std::vector<std::size_t> as_count_list(std::string_view raw, std::string_view key) {
  raw = trim(raw);
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    throw InputError("config key '" + std::string(key) + "' expects a list like [512, 512]");
  }
  raw = trim(raw.substr(1, raw.size() - 2));
  std::vector<std::size_t> values;
  while (!raw.empty()) {
    const auto comma = raw.find(',');
    values.push_back(as_count(raw.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    raw = trim(raw.substr(comma + 1));
  }
  return values;
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    const std::string_view line = trim(strip_comment(text.substr(pos, next - pos)));
    pos = next + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw InputError("config line " + std::to_string(line_no) + ": empty key");
    if (!values.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw InputError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return values;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  if (key == "corpus") corpus = unquote(raw, key);
  else if (key == "features") features = unquote(raw, key);
  else if (key == "bundles") bundles = unquote(raw, key);
  else if (key == "checkpoint") checkpoint = unquote(raw, key);
  else if (key == "norm_stats") norm_stats = unquote(raw, key);
  else if (key == "out") out = unquote(raw, key);
  else if (key == "model") model = parse_model_spec(unquote(raw, key));
  else if (key == "regime") regime = parse_regime(unquote(raw, key));
  else if (key == "k") k = as_count(raw, key);
  else if (key == "fraction") fraction = as_double(raw, key);
  else if (key == "seed") seed = as_count(raw, key);
  else if (key == "hidden_dims") head.hidden_dims = as_count_list(raw, key);
  else if (key == "dropout") head.dropout_rate = as_double(raw, key);
  else if (key == "learning_rate") train.learning_rate = as_double(raw, key);
  else if (key == "weight_decay") train.weight_decay = as_double(raw, key);
  else if (key == "batch_size") train.batch_size = as_count(raw, key);
  else if (key == "epochs") train.epochs = as_count(raw, key);
  else if (key == "huber_beta") train.huber_beta = as_double(raw, key);
  else if (key == "shuffle") train.shuffle = as_bool(raw, key);
  else if (key == "grid") grid = unquote(raw, key);
  else if (key == "good_strict") good_strict = as_bool(raw, key);
  else if (key == "reference_throwout") reference_throwout = as_double(raw, key);
  else throw InputError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::to_toml() const {
  std::map<std::string, std::string> kv;
  kv["corpus"] = quote(corpus);
  kv["features"] = quote(features);
  kv["bundles"] = quote(bundles);
  kv["checkpoint"] = quote(checkpoint);
  kv["norm_stats"] = quote(norm_stats);
  kv["model"] = quote(to_string(model));
  kv["regime"] = quote(to_string(regime));
  kv["k"] = std::to_string(k);
  kv["fraction"] = format_shortest(fraction);
  kv["seed"] = std::to_string(seed);
  std::string dims = "[";
  for (std::size_t i = 0; i < head.hidden_dims.size(); ++i) {
    dims += (i ? ", " : "") + std::to_string(head.hidden_dims[i]);
  }
  kv["hidden_dims"] = dims + "]";
  kv["dropout"] = format_shortest(head.dropout_rate);
  kv["learning_rate"] = format_shortest(train.learning_rate);
  kv["weight_decay"] = format_shortest(train.weight_decay);
  kv["batch_size"] = std::to_string(train.batch_size);
  kv["epochs"] = std::to_string(train.epochs);
  kv["huber_beta"] = format_shortest(train.huber_beta);
  kv["shuffle"] = train.shuffle ? "true" : "false";
  kv["grid"] = quote(grid);
  kv["good_strict"] = good_strict ? "true" : "false";
  kv["reference_throwout"] = format_shortest(reference_throwout);

  std::ostringstream out;
  for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
  return out.str();
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  for (const auto& [key, value] : parse_key_values(text)) config.set(key, value);
  return config;
}

}  // namespace ctxcur
