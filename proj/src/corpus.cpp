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

#include "contextcurate/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "contextcurate/csv.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

constexpr std::size_t kMinSnippetWords = 42;
constexpr std::size_t kMaxSnippetWords = 65;

bool valid_rating(int r) { return r >= -1 && r <= 2; }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

// Fields shared by both input formats before validation.
struct RawRow {
  std::size_t line = 0;
  std::string id;
  std::string word;
  long long band = 0;
  std::string snippet;
  std::optional<std::vector<CharSpan>> spans;
  std::vector<long long> ratings;
};

// Appends problems for `row`; returns the record only when it is valid.
std::optional<ContextRecord> validate_row(const RawRow& row, std::vector<std::string>& problems,
                                          Diagnostics* diag) {
  const std::string at = line_prefix(row.line);
  const std::size_t before = problems.size();

  if (row.id.empty()) problems.push_back(at + "empty id");
  if (row.word.empty()) problems.push_back(at + "empty target word");
  if (row.band < kMinBand || row.band > kMaxBand) {
    problems.push_back(at + "band " + std::to_string(row.band) + " outside 1-10");
  }
  if (row.ratings.empty()) problems.push_back(at + "no ratings");
  for (long long r : row.ratings) {
    if (r < -1 || r > 2) {
      problems.push_back(at + "rating " + std::to_string(r) + " outside {-1,0,1,2}");
      break;
    }
  }

  std::vector<CharSpan> occurrences;
  if (!row.word.empty()) {
    if (row.spans && !row.spans->empty()) {
      occurrences = *row.spans;
      for (const CharSpan& s : occurrences) {
        if (s.end <= s.start || s.end > row.snippet.size()) {
          problems.push_back(at + "span [" + std::to_string(s.start) + "," +
                             std::to_string(s.end) + "] outside snippet");
        } else if (!iequals(std::string_view(row.snippet).substr(s.start, s.length()), row.word)) {
          problems.push_back(at + "span [" + std::to_string(s.start) + "," +
                             std::to_string(s.end) + "] does not match '" + row.word + "'");
        }
      }
    } else {
      occurrences = find_occurrences(row.snippet, row.word);
      if (occurrences.empty()) {
        problems.push_back(at + "occurrence not found: '" + row.word + "'");
      }
    }
  }

  if (problems.size() != before) return std::nullopt;

  if (diag) {
    const std::size_t words = word_count(row.snippet);
    if (words < kMinSnippetWords || words > kMaxSnippetWords) {
      diag->warn(at + "snippet '" + row.id + "' has " + std::to_string(words) +
                 " words (expected 42-65)");
    }
  }

  ContextRecord record;
  record.id = row.id;
  record.word = TargetWord{row.word, static_cast<int>(row.band)};
  record.snippet = row.snippet;
  std::sort(occurrences.begin(), occurrences.end(),
            [](const CharSpan& a, const CharSpan& b) { return a.start < b.start; });
  record.occurrences = std::move(occurrences);
  record.ratings.assign(row.ratings.begin(), row.ratings.end());
  record.gold = aggregate_label(record.ratings);
  return record;
}

// Cross-record checks that need line numbers, then the Corpus itself.
Corpus finish(std::vector<std::pair<std::size_t, ContextRecord>> rows,
              std::vector<std::string> problems) {
  std::map<std::string, std::size_t> seen_ids;
  std::map<std::string, int> bands;
  std::vector<ContextRecord> records;
  records.reserve(rows.size());
  for (auto& [line, record] : rows) {
    const std::string at = line_prefix(line);
    bool ok = true;
    if (auto [it, inserted] = seen_ids.emplace(record.id, line); !inserted) {
      problems.push_back(at + "duplicate id '" + record.id + "' (first on line " +
                         std::to_string(it->second) + ")");
      ok = false;
    }
    if (auto [it, inserted] = bands.emplace(record.word.lemma, record.word.band);
        !inserted && it->second != record.word.band) {
      problems.push_back(at + "word '" + record.word.lemma + "' has band " +
                         std::to_string(record.word.band) + " but earlier rows say " +
                         std::to_string(it->second));
      ok = false;
    }
    if (ok) records.push_back(std::move(record));
  }
  if (!problems.empty()) {
    std::sort(problems.begin(), problems.end(), [](const std::string& a, const std::string& b) {
      auto num = [](const std::string& s) { return std::stoull(s.substr(5)); };
      return num(a) < num(b);
    });
    throw LoadError(std::to_string(problems.size()) + " invalid corpus record(s)", problems);
  }
  return Corpus(std::move(records));
}

std::vector<CharSpan> parse_span_list(std::string_view text) {
  std::vector<CharSpan> spans;
  text = trim(text);
  if (text.empty()) return spans;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(';', pos);
    if (next == std::string_view::npos) next = text.size();
    const std::string_view item = trim(text.substr(pos, next - pos));
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) throw InputError("bad span '" + std::string(item) + "'");
    const auto s = parse_int(item.substr(0, dash));
    const auto e = parse_int(item.substr(dash + 1));
    if (!s || !e || *s < 0 || *e < 0) throw InputError("bad span '" + std::string(item) + "'");
    spans.push_back({static_cast<std::size_t>(*s), static_cast<std::size_t>(*e)});
    pos = next + 1;
  }
  return spans;
}

std::vector<long long> parse_rating_list(std::string_view text) {
  std::vector<long long> ratings;
  text = trim(text);
  if (text.empty()) return ratings;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(';', pos);
    if (next == std::string_view::npos) next = text.size();
    const auto r = parse_int(text.substr(pos, next - pos));
    if (!r) throw InputError("bad rating '" + std::string(text.substr(pos, next - pos)) + "'");
    ratings.push_back(*r);
    pos = next + 1;
  }
  return ratings;
}

}  // namespace

std::string_view to_string(Category category) {
  switch (category) {
    case Category::misdirective:
      return "misdirective";
    case Category::middle:
      return "middle";
    case Category::directive:
      return "directive";
  }
  return "?";
}

Corpus::Corpus(std::vector<ContextRecord> records) : records_(std::move(records)) {
  std::vector<std::string> problems;
  std::map<std::string, int> bands;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const ContextRecord& r = records_[i];
    const std::string at = "record " + std::to_string(i) + " ('" + r.id + "'): ";
    if (!index_.emplace(r.id, i).second) problems.push_back(at + "duplicate id");
    if (r.word.lemma.empty()) problems.push_back(at + "empty lemma");
    if (r.word.band < kMinBand || r.word.band > kMaxBand) problems.push_back(at + "band out of range");
    if (r.ratings.empty() || !std::all_of(r.ratings.begin(), r.ratings.end(), valid_rating)) {
      problems.push_back(at + "invalid ratings");
    } else if (std::abs(r.gold - aggregate_label(r.ratings)) > 1e-9) {
      problems.push_back(at + "gold is not the mean of the ratings");
    }
    if (r.occurrences.empty()) problems.push_back(at + "no occurrences");
    for (const CharSpan& s : r.occurrences) {
      if (s.end <= s.start || s.end > r.snippet.size() ||
          !iequals(std::string_view(r.snippet).substr(s.start, s.length()), r.word.lemma)) {
        problems.push_back(at + "occurrence span does not match the target word");
        break;
      }
    }
    auto [it, inserted] = bands.emplace(r.word.lemma, r.word.band);
    if (!inserted && it->second != r.word.band) problems.push_back(at + "conflicting band");
  }
  if (!problems.empty()) throw LoadError("invalid corpus", problems);
  for (const auto& [lemma, band] : bands) words_.push_back({lemma, band});
}

const ContextRecord& Corpus::at(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown context id '" + std::string(id) + "'");
  return records_[it->second];
}

bool Corpus::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

double aggregate_label(std::span<const int> ratings) {
  if (ratings.empty()) throw InputError("cannot aggregate an empty rating list");
  long long sum = 0;
  for (int r : ratings) {
    if (!valid_rating(r)) throw InputError("rating " + std::to_string(r) + " outside {-1,0,1,2}");
    sum += r;
  }
  return static_cast<double>(sum) / static_cast<double>(ratings.size());
}

Category categorize(double gold) {
  if (gold < 0.0) return Category::misdirective;
  if (gold > 1.0) return Category::directive;
  return Category::middle;
}

CorpusSummary summarize(const Corpus& corpus) {
  if (corpus.empty()) throw InputError("cannot summarize an empty corpus");
  CorpusSummary s;
  s.n_contexts = corpus.size();
  s.n_words = corpus.words().size();
  for (const TargetWord& w : corpus.words()) ++s.words_per_band[static_cast<std::size_t>(w.band)];

  double sum = 0.0;
  std::size_t neg = 0, pos = 0;
  for (const ContextRecord& r : corpus.records()) {
    sum += r.gold;
    switch (categorize(r.gold)) {
      case Category::misdirective:
        ++neg;
        break;
      case Category::directive:
        ++pos;
        break;
      case Category::middle:
        break;
    }
  }
  const double n = static_cast<double>(s.n_contexts);
  s.gold_mean = sum / n;
  if (s.n_contexts > 1) {
    double ss = 0.0;
    for (const ContextRecord& r : corpus.records()) ss += (r.gold - s.gold_mean) * (r.gold - s.gold_mean);
    s.gold_sd = std::sqrt(ss / (n - 1.0));
  }
  s.fraction_misdirective = static_cast<double>(neg) / n;
  s.fraction_directive = static_cast<double>(pos) / n;
  return s;
}

std::string format_summary(const CorpusSummary& s) {
  std::ostringstream out;
  out << "contexts: " << s.n_contexts << "\n";
  out << "target words: " << s.n_words << "\n";
  out << "words per band:";
  for (int b = kMinBand; b <= kMaxBand; ++b) out << " " << b << ":" << s.words_per_band[b];
  out << "\n";
  out << "gold mean: " << format_fixed(s.gold_mean, 4) << "\n";
  out << "gold sd (sample, n-1): " << format_fixed(s.gold_sd, 4) << "\n";
  out << "fraction misdirective (gold < 0): " << format_fixed(s.fraction_misdirective, 4) << "\n";
  out << "fraction directive (gold > 1): " << format_fixed(s.fraction_directive, 4) << "\n";
  return out.str();
}

std::vector<CharSpan> find_occurrences(std::string_view snippet, std::string_view word) {
  std::vector<CharSpan> spans;
  if (word.empty() || word.size() > snippet.size()) return spans;
  for (std::size_t i = 0; i + word.size() <= snippet.size(); ++i) {
    if (iequals(snippet.substr(i, word.size()), word)) {
      spans.push_back({i, i + word.size()});
      i += word.size() - 1;
    }
  }
  return spans;
}

std::size_t word_count(std::string_view snippet) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : snippet) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

Corpus parse_corpus_jsonl(std::string_view text, Diagnostics* diag) {
  using nlohmann::json;
  std::vector<std::pair<std::size_t, ContextRecord>> rows;
  std::vector<std::string> problems;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find('\n', pos);
    if (next == std::string_view::npos) next = text.size();
    const std::string_view line = trim(text.substr(pos, next - pos));
    pos = next + 1;
    ++line_no;
    if (line.empty()) continue;

    RawRow raw;
    raw.line = line_no;
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) throw InputError("expected a JSON object");
      raw.id = obj.at("id").get<std::string>();
      raw.word = obj.at("word").get<std::string>();
      raw.band = obj.at("band").get<long long>();
      raw.snippet = obj.at("snippet").get<std::string>();
      if (obj.contains("spans") && !obj["spans"].is_null()) {
        std::vector<CharSpan> spans;
        for (const json& s : obj["spans"]) {
          if (!s.is_array() || s.size() != 2) throw InputError("span must be [start,end]");
          const auto a = s[0].get<long long>();
          const auto b = s[1].get<long long>();
          if (a < 0 || b < 0) throw InputError("negative span offset");
          spans.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
        }
        raw.spans = std::move(spans);
      }
      for (const json& r : obj.at("ratings")) raw.ratings.push_back(r.get<long long>());
    } catch (const json::exception& e) {
      problems.push_back(line_prefix(line_no) + "malformed row: " + e.what());
      continue;
    } catch (const InputError& e) {
      problems.push_back(line_prefix(line_no) + "malformed row: " + e.what());
      continue;
    }
    if (auto record = validate_row(raw, problems, diag)) rows.emplace_back(line_no, std::move(*record));
  }
  return finish(std::move(rows), std::move(problems));
}

Corpus parse_corpus_csv(std::string_view text, Diagnostics* diag) {
  const std::vector<csv::Record> records = csv::parse(text);
  if (records.empty()) throw InputError("empty corpus CSV");
  const std::vector<std::string> expected{"id", "word", "band", "snippet", "spans", "ratings"};
  if (records.front().fields != expected) {
    throw InputError("line 1: expected header id,word,band,snippet,spans,ratings");
  }
  std::vector<std::pair<std::size_t, ContextRecord>> rows;
  std::vector<std::string> problems;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const csv::Record& rec = records[i];
    if (rec.fields.size() != expected.size()) {
      problems.push_back(line_prefix(rec.line) + "malformed row: expected 6 fields, got " +
                         std::to_string(rec.fields.size()));
      continue;
    }
    RawRow raw;
    raw.line = rec.line;
    try {
      raw.id = rec.fields[0];
      raw.word = rec.fields[1];
      const auto band = parse_int(rec.fields[2]);
      if (!band) throw InputError("band is not an integer");
      raw.band = *band;
      raw.snippet = rec.fields[3];
      raw.spans = parse_span_list(rec.fields[4]);
      raw.ratings = parse_rating_list(rec.fields[5]);
    } catch (const InputError& e) {
      problems.push_back(line_prefix(rec.line) + "malformed row: " + e.what());
      continue;
    }
    if (auto record = validate_row(raw, problems, diag)) rows.emplace_back(rec.line, std::move(*record));
  }
  return finish(std::move(rows), std::move(problems));
}

Corpus load_corpus(const std::filesystem::path& path, Diagnostics* diag) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return parse_corpus_csv(text, diag);
  return parse_corpus_jsonl(text, diag);
}

std::string to_jsonl(const Corpus& corpus) {
  using nlohmann::ordered_json;
  std::string out;
  for (const ContextRecord& r : corpus.records()) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["word"] = r.word.lemma;
    obj["band"] = r.word.band;
    obj["snippet"] = r.snippet;
    ordered_json spans = ordered_json::array();
    for (const CharSpan& s : r.occurrences) spans.push_back({s.start, s.end});
    obj["spans"] = std::move(spans);
    obj["ratings"] = r.ratings;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::string to_csv(const Corpus& corpus) {
  std::string out = "id,word,band,snippet,spans,ratings\n";
  for (const ContextRecord& r : corpus.records()) {
    std::string spans, ratings;
    for (std::size_t i = 0; i < r.occurrences.size(); ++i) {
      if (i) spans.push_back(';');
      spans += std::to_string(r.occurrences[i].start) + "-" + std::to_string(r.occurrences[i].end);
    }
    for (std::size_t i = 0; i < r.ratings.size(); ++i) {
      if (i) ratings.push_back(';');
      ratings += std::to_string(r.ratings[i]);
    }
    out += csv::join({r.id, r.word.lemma, std::to_string(r.word.band), r.snippet, spans, ratings});
    out.push_back('\n');
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, path.extension() == ".csv" ? to_csv(corpus) : to_jsonl(corpus));
}

}  // namespace ctxcur
