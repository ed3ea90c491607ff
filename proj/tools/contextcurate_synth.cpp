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

// Writes a small offline demo dataset: corpus.jsonl, features.csv and a
// CTXEMB1 bundle pair (bundles.jsonl + bundles.bin).
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "contextcurate/synth.hpp"
#include "contextcurate/text_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"contextcurate_synth: generate a synthetic demo dataset"};
  ctxcur::SynthOptions options;
  std::string out;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--words", options.n_words, "target words");
  app.add_option("--contexts", options.contexts_per_word, "contexts per word");
  app.add_option("--dim", options.dim, "embedding dimension");
  app.add_option("--informative", options.informative_dims, "EOS dims that drive the gold label");
  app.add_option("--bands", options.bands, "difficulty bands, assigned round-robin");
  app.add_option("--seed", options.seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    const std::filesystem::path dir = out;
    std::filesystem::create_directories(dir);
    const ctxcur::SynthData data = ctxcur::make_synthetic_dataset(options);
    ctxcur::save_corpus(data.corpus, dir / "corpus.jsonl");
    ctxcur::write_file(dir / "features.csv", ctxcur::to_csv(data.features));
    ctxcur::write_bundles(data.bundles, ctxcur::BundlePaths::from_prefix((dir / "bundles").string()));
    std::cout << "wrote " << data.corpus.records().size() << " contexts to " << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
