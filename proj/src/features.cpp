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

#include "contextcurate/features.hpp"

#include <cmath>

#include "contextcurate/corpus.hpp"
#include "contextcurate/csv.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {

bool FeatureTable::is_missing(std::string_view id, std::size_t column) const {
  auto it = missing.find(id);
  return it != missing.end() && it->second.count(column) != 0;
}

FeatureTable parse_features(std::string_view text, Diagnostics* diag) {
  const std::vector<csv::Record> records = csv::parse(text);
  if (records.empty()) throw InputError("empty feature file");
  const auto& header = records.front().fields;
  if (header.size() < 2 || header.front() != "id") {
    throw InputError("line 1: expected header id,f_1,...,f_F");
  }

  FeatureTable table;
  table.feature_names.assign(header.begin() + 1, header.end());
  const std::size_t width = table.width();

  std::vector<std::string> problems;
  std::vector<double> column_sum(width, 0.0);
  std::vector<std::size_t> column_count(width, 0);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const csv::Record& rec = records[i];
    const std::string at = "line " + std::to_string(rec.line) + ": ";
    if (rec.fields.size() != width + 1) {
      problems.push_back(at + "ragged row: expected " + std::to_string(width + 1) + " fields, got " +
                         std::to_string(rec.fields.size()));
      continue;
    }
    const std::string& id = rec.fields[0];
    if (table.rows.count(id)) {
      problems.push_back(at + "duplicate id '" + id + "'");
      continue;
    }
    std::vector<double> row(width, 0.0);
    bool ok = true;
    for (std::size_t j = 0; j < width; ++j) {
      const std::string_view cell = trim(rec.fields[j + 1]);
      if (cell.empty()) {
        table.missing[id].insert(j);
        continue;
      }
      const auto value = parse_double(cell);
      if (!value || !std::isfinite(*value)) {
        problems.push_back(at + "non-numeric cell '" + std::string(cell) + "' in column " +
                           table.feature_names[j]);
        ok = false;
        break;
      }
      row[j] = *value;
      column_sum[j] += *value;
      ++column_count[j];
    }
    if (ok) {
      table.rows.emplace(id, std::move(row));
    } else {
      table.missing.erase(id);
    }
  }
  if (!problems.empty()) throw LoadError("invalid feature table", problems);

  for (const auto& [id, columns] : table.missing) {
    for (std::size_t j : columns) {
      const double fill = column_count[j] ? column_sum[j] / static_cast<double>(column_count[j]) : 0.0;
      table.rows[id][j] = fill;
      if (diag) {
        diag->warn("feature '" + table.feature_names[j] + "' missing for '" + id +
                   "', imputed to column mean " + format_shortest(fill));
      }
    }
  }
  return table;
}

FeatureTable load_features(const std::filesystem::path& path, Diagnostics* diag) {
  return parse_features(read_file(path), diag);
}

std::string to_csv(const FeatureTable& table) {
  std::vector<std::string> header{"id"};
  header.insert(header.end(), table.feature_names.begin(), table.feature_names.end());
  std::string out = csv::join(header) + "\n";
  for (const auto& [id, row] : table.rows) {
    std::vector<std::string> fields{id};
    for (std::size_t j = 0; j < row.size(); ++j) {
      fields.push_back(table.is_missing(id, j) ? std::string() : format_shortest(row[j]));
    }
    out += csv::join(fields) + "\n";
  }
  return out;
}

NormStats fit_normalizer(const FeatureTable& table, const std::vector<std::string>& train_ids) {
  if (train_ids.size() < 2) throw InputError("normalizer needs at least 2 training rows");
  const std::size_t width = table.width();
  std::vector<const std::vector<double>*> rows;
  rows.reserve(train_ids.size());
  for (const std::string& id : train_ids) {
    auto it = table.rows.find(id);
    if (it == table.rows.end()) throw InputError("no feature row for training id '" + id + "'");
    rows.push_back(&it->second);
  }

  NormStats stats;
  stats.mean.assign(width, 0.0);
  stats.sd.assign(width, 0.0);
  stats.fitted_on = train_ids.size();
  for (std::size_t j = 0; j < width; ++j) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (table.is_missing(train_ids[r], j)) continue;
      sum += (*rows[r])[j];
      ++n;
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (table.is_missing(train_ids[r], j)) continue;
      const double d = (*rows[r])[j] - mean;
      ss += d * d;
    }
    stats.mean[j] = mean;
    stats.sd[j] = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  }
  return stats;
}

std::vector<double> apply_normalizer(const NormStats& stats, std::span<const double> vector) {
  if (vector.size() != stats.width()) {
    throw InputError("feature vector has length " + std::to_string(vector.size()) +
                     ", normalizer expects " + std::to_string(stats.width()));
  }
  std::vector<double> out(vector.size(), 0.0);
  for (std::size_t j = 0; j < vector.size(); ++j) {
    if (!stats.zero_variance(j)) out[j] = (vector[j] - stats.mean[j]) / stats.sd[j];
  }
  return out;
}

std::vector<double> normalized_row(const NormStats& stats, const FeatureTable& table,
                                   std::string_view id) {
  auto it = table.rows.find(id);
  if (it == table.rows.end()) throw InputError("no feature row for '" + std::string(id) + "'");
  std::vector<double> out = apply_normalizer(stats, it->second);
  if (auto m = table.missing.find(id); m != table.missing.end()) {
    for (std::size_t j : m->second) out[j] = 0.0;
  }
  return out;
}

std::string to_csv(const NormStats& stats, const std::vector<std::string>& names) {
  if (names.size() != stats.width()) throw InvariantError("feature names do not match normalizer width");
  std::string out = "feature,mean,sd,fitted_on\n";
  for (std::size_t j = 0; j < stats.width(); ++j) {
    out += csv::join({names[j], format_shortest(stats.mean[j]), format_shortest(stats.sd[j]),
                      std::to_string(stats.fitted_on)});
    out += "\n";
  }
  return out;
}

NormStats parse_norm_stats(std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty() || records.front().fields != std::vector<std::string>{"feature", "mean", "sd", "fitted_on"}) {
    throw InputError("normalizer file: expected header feature,mean,sd,fitted_on");
  }
  NormStats stats;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    const auto mean = f.size() == 4 ? parse_double(f[1]) : std::nullopt;
    const auto sd = f.size() == 4 ? parse_double(f[2]) : std::nullopt;
    const auto n = f.size() == 4 ? parse_int(f[3]) : std::nullopt;
    if (!mean || !sd || !n || *sd < 0) {
      throw InputError("normalizer file line " + std::to_string(records[i].line) + ": malformed row");
    }
    stats.mean.push_back(*mean);
    stats.sd.push_back(*sd);
    stats.fitted_on = static_cast<std::size_t>(*n);
  }
  return stats;
}

FeatureTable demo_features(const Corpus& corpus) {
  FeatureTable table;
  table.feature_names = {"f_1", "f_2", "f_3"};
  for (const ContextRecord& r : corpus.records()) {
    table.rows.emplace(r.id, std::vector<double>{static_cast<double>(word_count(r.snippet)),
                                                 static_cast<double>(r.occurrences.size()),
                                                 static_cast<double>(r.snippet.size())});
  }
  return table;
}

}  // namespace ctxcur
