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

#include "contextcurate/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "contextcurate/corpus.hpp"
#include "contextcurate/curate.hpp"
#include "contextcurate/embed.hpp"
#include "contextcurate/eval.hpp"
#include "contextcurate/features.hpp"
#include "contextcurate/head.hpp"
#include "contextcurate/report.hpp"
#include "contextcurate/run_config.hpp"
#include "contextcurate/text_io.hpp"

namespace fs = std::filesystem;

namespace ctxcur {
namespace {

constexpr const char* kSeedEnv = "CONTEXTCURATE_SEED";

// Flag values collected as config keys, applied after the config file.
struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::size_t jobs = 1;
};

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

void add_string_key(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key,
                    const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.values[key] = quoted(v); }, help);
}

void add_raw_key(CLI::App* app, Overrides& o, const std::string& flag, const std::string& key,
                 const std::string& help) {
  app->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.values[key] = v; }, help);
}

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "key = value run configuration file");
  add_string_key(app, o, "--corpus", "corpus", "corpus file (.jsonl or .csv)");
  add_string_key(app, o, "--features", "features", "feature CSV (id,f_1,...,f_F)");
  add_string_key(app, o, "--bundles", "bundles", "CTXEMB1 bundle prefix or index path");
  add_string_key(app, o, "--out", "out", "output directory");
  add_string_key(app, o, "--model", "model", "unsupervised | supervised | hybrid");
  add_raw_key(app, o, "--seed", "seed", "seed (overrides config and CONTEXTCURATE_SEED)");
}

void add_training(CLI::App* app, Overrides& o) {
  add_raw_key(app, o, "--lr", "learning_rate", "AdamW learning rate");
  add_raw_key(app, o, "--weight-decay", "weight_decay", "AdamW decoupled weight decay");
  add_raw_key(app, o, "--batch-size", "batch_size", "mini-batch size");
  add_raw_key(app, o, "--epochs", "epochs", "training epochs");
  add_raw_key(app, o, "--huber-beta", "huber_beta", "SmoothL1 beta");
  add_raw_key(app, o, "--dropout", "dropout", "hidden-layer dropout rate");
  app->add_option_function<std::string>(
      "--hidden", [&o](const std::string& v) { o.values["hidden_dims"] = "[" + v + "]"; },
      "hidden widths, comma separated (e.g. 512,512)");
  app->add_flag_callback("--no-shuffle", [&o] { o.values["shuffle"] = "false"; }, "keep training order fixed");
}

void add_grid(CLI::App* app, Overrides& o) {
  add_string_key(app, o, "--grid", "grid", "threshold grid lo:hi:step (default: auto .xx5 grid)");
  app->add_flag_callback("--good-strict", [&o] { o.values["good_strict"] = "true"; }, "count good as y > 1");
  add_raw_key(app, o, "--reference", "reference_throwout", "reference throwout rate (default 0.70)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig config;
  if (!o.config_path.empty()) config = parse_run_config(read_file(o.config_path));
  if (const char* env = std::getenv(kSeedEnv); env && *env) config.set("seed", env);
  for (const auto& [key, value] : o.values) config.set(key, value);
  return config;
}

void require(const std::string& value, const std::string& what) {
  if (value.empty()) throw InputError(what + " required");
}

void print_warnings(const Diagnostics& diag, std::ostream& err) {
  for (const std::string& w : diag.warnings) err << "warning: " << w << "\n";
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > 10) out += ", ...";
  return out;
}

fs::path output_dir(const RunConfig& config) {
  require(config.out, "--out");
  fs::create_directories(config.out);
  return config.out;
}

BundleSet load_bundle_set(const RunConfig& config) {
  require(config.bundles, "bundles");
  return read_bundles(BundlePaths::from_prefix(config.bundles));
}

std::vector<double> threshold_grid(const RunConfig& config, const ScoredSet& scored) {
  if (config.grid.empty() || config.grid == "auto") {
    std::vector<double> scores;
    for (const ScoredEntry& e : scored.entries) scores.push_back(e.score);
    return default_threshold_grid(scores);
  }
  return parse_grid_spec(config.grid);
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.corpus, "corpus");
  Diagnostics diag;
  const Corpus corpus = load_corpus(config.corpus, &diag);
  out << format_summary(summarize(corpus));

  std::vector<std::string> problems;
  if (!config.features.empty()) {
    const FeatureTable table = load_features(config.features, &diag);
    std::vector<std::string> missing;
    for (const ContextRecord& r : corpus.records()) {
      if (!table.rows.count(r.id)) missing.push_back(r.id);
    }
    if (!missing.empty()) {
      diag.warn("feature table is missing " + std::to_string(missing.size()) + " context id(s): " + list_ids(missing));
    }
    out << "features: " << table.width() << " columns, " << table.rows.size() << " rows\n";
  }
  if (!config.bundles.empty()) {
    const BundleSet bundles = load_bundle_set(config);
    std::vector<std::string> missing;
    for (const ContextRecord& r : corpus.records()) {
      auto it = bundles.find(r.id);
      if (it == bundles.end()) {
        missing.push_back(r.id);
        continue;
      }
      if (it->second.n_tokens() == 0) continue;
      try {
        for (const CharSpan& span : r.occurrences) align_span(it->second, span);
      } catch (const InputError& e) {
        problems.push_back(e.what());
      }
    }
    if (!missing.empty()) {
      diag.warn("bundles are missing " + std::to_string(missing.size()) + " context id(s): " + list_ids(missing));
    }
    out << "bundles: " << bundles.size() << "\n";
  }
  print_warnings(diag, err);
  if (!problems.empty()) throw LoadError(std::to_string(problems.size()) + " bundle problem(s)", problems);
  return kExitOk;
}

std::vector<std::string> corpus_ids(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const ContextRecord& r : corpus.records()) ids.push_back(r.id);
  return ids;
}

int cmd_score(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.corpus, "corpus");
  Diagnostics diag;
  const Corpus corpus = load_corpus(config.corpus, &diag);
  if (config.model == ModelSpec::hybrid) require(config.features, "features");
  if (config.model != ModelSpec::unsupervised) require(config.checkpoint, "checkpoint");
  if (config.model == ModelSpec::hybrid) require(config.norm_stats, "norm_stats");
  const BundleSet bundles = load_bundle_set(config);
  const std::vector<std::string> ids = corpus_ids(corpus);

  ScoredSet scored;
  if (config.model == ModelSpec::unsupervised) {
    scored = score_unsupervised(corpus, bundles, ids);
  } else {
    const MLPHead head = load_checkpoint(config.checkpoint);
    FeatureTable features;
    NormStats stats;
    if (config.model == ModelSpec::hybrid) {
      features = load_features(config.features, &diag);
      stats = parse_norm_stats(read_file(config.norm_stats));
    }
    const VectorMap inputs = build_head_inputs(config.model, bundles, &features, &stats, ids);
    if (!inputs.empty() && inputs.begin()->second.size() != head.config.input_dim) {
      throw InputError("checkpoint expects input_dim " + std::to_string(head.config.input_dim) + ", data gives " +
                       std::to_string(inputs.begin()->second.size()));
    }
    for (const auto& [id, yhat] : predict_batch(head, inputs)) scored.entries.push_back({id, yhat, corpus.at(id).gold});
  }
  std::sort(scored.entries.begin(), scored.entries.end(),
            [](const ScoredEntry& a, const ScoredEntry& b) { return a.id < b.id; });
  const fs::path dir = output_dir(config);
  write_artifact(dir / "predictions.csv", predictions_csv(scored));
  print_warnings(diag, err);
  out << "scored " << scored.size() << " contexts -> " << (dir / "predictions.csv").string() << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.model == ModelSpec::unsupervised) throw InputError("train needs --model supervised or hybrid");
  require(config.corpus, "corpus");
  if (config.model == ModelSpec::hybrid) require(config.features, "features");
  Diagnostics diag;
  const Corpus corpus = load_corpus(config.corpus, &diag);
  const BundleSet bundles = load_bundle_set(config);
  FeatureTable features;
  if (config.model == ModelSpec::hybrid) features = load_features(config.features, &diag);
  const std::vector<std::string> ids = corpus_ids(corpus);

  std::optional<NormStats> stats;
  if (config.model == ModelSpec::hybrid) stats = fit_normalizer(features, ids);
  LabelMap labels;
  for (const ContextRecord& r : corpus.records()) labels.emplace(r.id, r.gold);
  HeadConfig head_config = config.head;
  head_config.input_dim = head_input_dim(config.model, bundles, &features);
  TrainConfig train_config = config.train;
  train_config.seed = config.seed;
  const VectorMap inputs = build_head_inputs(config.model, bundles, &features, stats ? &*stats : nullptr, ids);
  const TrainResult trained = train(inputs, labels, ids, head_config, train_config);

  const fs::path dir = output_dir(config);
  write_artifact(dir / "config.toml", config.to_toml());
  save_checkpoint(trained.head, dir / "head.ckpt");
  write_artifact(dir / "loss.csv", loss_trace_csv(trained.epoch_losses));
  if (stats) write_artifact(dir / "norm_stats.csv", to_csv(*stats, features.feature_names));
  print_warnings(diag, err);
  out << "trained " << to_string(config.model) << " head (" << trained.head.parameter_count() << " parameters) on "
      << ids.size() << " contexts -> " << (dir / "head.ckpt").string() << "\n";
  return kExitOk;
}

int cv_body(const RunConfig& config, std::size_t jobs, const fs::path& dir, std::ostream& out, std::ostream& err) {
  require(config.corpus, "corpus");
  if (config.model == ModelSpec::hybrid) require(config.features, "features");
  Diagnostics diag;
  write_artifact(dir / "config.toml", config.to_toml());
  const Corpus corpus = load_corpus(config.corpus, &diag);
  const BundleSet bundles = load_bundle_set(config);
  std::optional<FeatureTable> features;
  if (!config.features.empty()) features = load_features(config.features, &diag);

  const FoldPlan plan = config.regime == Regime::word_unseen
                            ? make_word_unseen_folds(corpus, config.k, config.seed, &diag)
                            : make_word_seen_split(corpus, config.fraction, config.seed, &diag);
  write_artifact(dir / "folds.csv", folds_csv(plan));

  ModelOptions options{config.model, config.head, config.train};
  options.train.seed = config.seed;
  const CvResult cv = cross_validate({&corpus, &bundles, features ? &*features : nullptr}, options, plan, jobs);
  write_artifact(dir / "predictions.csv", predictions_csv(cv.predictions));

  const std::vector<SweepRow> rows = sweep(cv.predictions, threshold_grid(config, cv.predictions),
                                           SweepOptions{config.good_strict});
  write_artifact(dir / "sweep.csv", sweep_csv(rows));
  const RCCurve curve = rcc(rows);
  write_artifact(dir / "rcc.csv", rcc_csv(curve));
  write_artifact(dir / "rcc.svg", render_rcc_svg(curve, config.reference_throwout, std::string(to_string(config.model))));

  RunReport run;
  run.model_spec = config.model;
  run.regime = config.regime;
  run.summary = summarize(corpus);
  run.sweep = rows;
  run.curve = curve;
  run.reference_throwout = config.reference_throwout;
  run.reference = reference_point(rows, config.reference_throwout);
  run.metrics = evaluate(cv.predictions);
  run.null_metrics = evaluate(cv.null_predictions);
  run.folds = cv.folds;
  run.config_echo = config.to_toml();
  run.seed = config.seed;
  write_artifact(dir / "metrics.csv", metrics_csv({{std::string(to_string(config.model)), run.metrics},
                                                   {"null_model", run.null_metrics}}));
  write_artifact(dir / "report.md", render_report_md(run));

  print_warnings(diag, err);
  out << "cv " << to_string(config.model) << " (" << to_string(config.regime) << "): " << cv.predictions.size()
      << " contexts over " << cv.folds.size() << " fold(s)\n";
  out << "RCC AUC " << format_fixed(curve.auc, 4) << "; at throwout " << format_fixed(run.reference.throwout, 4)
      << " ratio " << format_fixed(run.reference.ratio, 4) << "\n";
  out << "pearson " << format_fixed(run.metrics.pearson_r, 4) << ", spearman " << format_fixed(run.metrics.spearman_rho, 4)
      << ", rmse " << format_fixed(run.metrics.rmse, 4) << ", r2 " << format_fixed(run.metrics.r2, 4) << "\n";
  return kExitOk;
}

int cmd_cv(const RunConfig& config, std::size_t jobs, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(config);
  fs::remove(dir / "FAILED");
  try {
    return cv_body(config, jobs, dir, out, err);
  } catch (const std::exception& e) {
    write_file(dir / "FAILED", std::string(e.what()) + "\n");
    throw;
  }
}

int cmd_sweep(const RunConfig& config, const std::string& predictions, const std::string& label, std::ostream& out,
              std::ostream& err) {
  require(predictions, "--predictions");
  const ScoredSet scored = parse_predictions_csv(read_file(predictions));
  const fs::path dir = output_dir(config);
  const std::vector<SweepRow> rows = sweep(scored, threshold_grid(config, scored), SweepOptions{config.good_strict});
  write_artifact(dir / "sweep.csv", sweep_csv(rows));
  out << "swept " << rows.size() << " thresholds -> " << (dir / "sweep.csv").string() << "\n";
  RCCurve curve;
  try {
    curve = rcc(rows);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  write_artifact(dir / "rcc.csv", rcc_csv(curve));
  write_artifact(dir / "rcc.svg", render_rcc_svg(curve, config.reference_throwout,
                                                 label.empty() ? fs::path(predictions).stem().string() : label));
  const SweepRow ref = reference_point(rows, config.reference_throwout);
  out << "RCC AUC " << format_fixed(curve.auc, 4) << "; at throwout " << format_fixed(ref.throwout, 4) << " ratio "
      << format_fixed(ref.ratio, 4) << "\n";
  return kExitOk;
}

// Overlays several cv run directories, each re-swept from its predictions
// with its own resolved config.
int cmd_report(const std::vector<std::string>& runs, const std::vector<std::string>& labels, const RunConfig& config,
               std::ostream& out) {
  if (runs.empty()) throw InputError("--run required");
  if (!labels.empty() && labels.size() != runs.size()) throw InputError("--label count must match --run count");
  const fs::path dir = output_dir(config);

  std::vector<LabeledCurve> curves;
  std::string md = "# RCC comparison\n\n";
  md += "| model | run | RCC AUC | throwout at reference | ratio at reference | # accepted | pearson r | spearman rho |\n";
  md += "|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path run_dir = runs[i];
    const RunConfig run_config = parse_run_config(read_file(run_dir / "config.toml"));
    const ScoredSet scored = parse_predictions_csv(read_file(run_dir / "predictions.csv"));
    const auto rows = sweep(scored, threshold_grid(run_config, scored), SweepOptions{run_config.good_strict});
    const RCCurve curve = rcc(rows);
    const SweepRow ref = reference_point(rows, config.reference_throwout);
    const MetricReport metrics = evaluate(scored);
    const std::string label = labels.empty() ? std::string(to_string(run_config.model)) : labels[i];
    curves.push_back({label, curve});
    md += "| " + label + " | " + run_dir.string() + " | " + format_fixed(curve.auc, 4) + " | " +
          format_fixed(ref.throwout, 4) + " | " + format_fixed(ref.ratio, 4) + " | " + std::to_string(ref.n_accepted) +
          " | " + format_fixed(metrics.pearson_r, 4) + " | " + format_fixed(metrics.spearman_rho, 4) + " |\n";
  }
  md += "\nPlot: [rcc.svg](rcc.svg)\n";
  write_artifact(dir / "rcc.svg", render_rcc_svg(curves, config.reference_throwout));
  write_artifact(dir / "report.md", md);
  out << "compared " << runs.size() << " run(s) -> " << (dir / "report.md").string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"contextcurate: score, train, and curate contexts for vocabulary teaching"};
  app.require_subcommand(1);

  Overrides o;
  auto* validate = app.add_subcommand("validate", "load and validate inputs, print the corpus summary");
  add_common(validate, o);

  auto* score = app.add_subcommand("score", "write predictions.csv for every context");
  add_common(score, o);
  add_string_key(score, o, "--checkpoint", "checkpoint", "CTXHEAD1 checkpoint (supervised/hybrid)");
  add_string_key(score, o, "--norm-stats", "norm_stats", "normalizer CSV from `train` (hybrid)");

  auto* train_cmd = app.add_subcommand("train", "train a head on the whole corpus");
  add_common(train_cmd, o);
  add_training(train_cmd, o);

  auto* cv = app.add_subcommand("cv", "cross-validate and write a full run directory");
  add_common(cv, o);
  add_training(cv, o);
  add_grid(cv, o);
  add_string_key(cv, o, "--regime", "regime", "word_unseen | word_seen");
  add_raw_key(cv, o, "--k", "k", "folds for word_unseen (default 10)");
  add_raw_key(cv, o, "--fraction", "fraction", "holdout fraction for word_seen (default 0.1)");
  cv->add_option("--jobs", o.jobs, "folds run in parallel (output does not depend on it)")->check(CLI::PositiveNumber);

  std::string predictions, label;
  auto* sweep_cmd = app.add_subcommand("sweep", "re-sweep a predictions.csv");
  sweep_cmd->add_option("--config", o.config_path, "key = value run configuration file");
  sweep_cmd->add_option("--predictions", predictions, "CSV context_id,score,gold")->required();
  add_string_key(sweep_cmd, o, "--out", "out", "output directory");
  sweep_cmd->add_option("--label", label, "legend label for the plot");
  add_grid(sweep_cmd, o);

  std::vector<std::string> runs, labels;
  auto* report = app.add_subcommand("report", "overlay RCCs of several cv run directories");
  report->add_option("--run", runs, "cv run directory (repeatable)")->required();
  report->add_option("--label", labels, "legend label per run (repeatable)");
  add_string_key(report, o, "--out", "out", "output directory");
  add_raw_key(report, o, "--reference", "reference_throwout", "reference throwout rate (default 0.70)");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    const RunConfig config = resolve(o);
    if (validate->parsed()) return cmd_validate(config, out, err);
    if (score->parsed()) return cmd_score(config, out, err);
    if (train_cmd->parsed()) return cmd_train(config, out, err);
    if (cv->parsed()) return cmd_cv(config, o.jobs, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(config, predictions, label, out, err);
    if (report->parsed()) return cmd_report(runs, labels, config, out);
  } catch (const LoadError& e) {
    err << "error: " << e.what() << "\n";
    for (const std::string& p : e.problems()) err << "  " << p << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace ctxcur
