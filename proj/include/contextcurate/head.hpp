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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "contextcurate/error.hpp"

namespace ctxcur {

/// Shape of the fusion regression head: input -> hidden... -> scalar.
/// Hidden layers are linear -> ReLU -> dropout; the output layer is linear
/// with no activation.
struct HeadConfig {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims{512, 512};
  double dropout_rate = 0.1;

  void validate() const;
  friend bool operator==(const HeadConfig&, const HeadConfig&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MLPHead {
  HeadConfig config;
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
};

/// Same shapes as MLPHead::layers.
using Gradients = std::vector<DenseLayer>;

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  std::size_t batch_size = 16;
  std::size_t epochs = 2;
  double huber_beta = 1.0;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

/// AdamW moment accumulators.
struct OptState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step = 0;
};

/// Rows are samples.
struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
};

struct BackwardResult {
  double loss = 0.0;  // mean Huber loss over the batch
  Gradients grads;
};

/// He-uniform weights, zero biases, deterministic in `seed`.
MLPHead init_head(const HeadConfig& config, std::uint64_t seed);

/// Single-sample forward. In train mode, dropout uses inverted scaling with
/// a mask drawn from `dropout_seed`; eval mode ignores the seed.
/// Throws InputError on a non-finite input or wrong length.
double forward(const MLPHead& head, std::span<const double> x, bool train_mode = false,
               std::uint64_t dropout_seed = 0);

/// SmoothL1: 0.5 e^2 / beta below beta, |e| - 0.5 beta above.
double huber_loss(double pred, double target, double beta);

/// d huber_loss / d pred.
double huber_gradient(double pred, double target, double beta);

/// Mean Huber loss over `batch` with the same dropout mask backward() uses.
double batch_loss(const MLPHead& head, const Batch& batch, double huber_beta, bool train_mode,
                  std::uint64_t dropout_seed);

/// Exact gradients of the mean Huber loss w.r.t. every parameter.
BackwardResult backward(const MLPHead& head, const Batch& batch, double huber_beta, bool train_mode,
                        std::uint64_t dropout_seed);

OptState make_opt_state(const MLPHead& head);

/// Decoupled weight decay: theta -= lr * m_hat / (sqrt(v_hat) + eps) + lr * wd * theta.
void adamw_step(MLPHead& head, const Gradients& grads, OptState& state, const TrainConfig& config);

using VectorMap = std::map<std::string, std::vector<double>, std::less<>>;
using LabelMap = std::map<std::string, double, std::less<>>;

struct TrainResult {
  MLPHead head;
  std::vector<double> epoch_losses;  // mean training-mode loss per epoch
};

/// Mini-batch AdamW over `train_ids`, seeded shuffling. Throws InputError
/// for a train id without an input vector or label.
TrainResult train(const VectorMap& inputs, const LabelMap& labels, std::vector<std::string> train_ids,
                  const HeadConfig& head_config, const TrainConfig& train_config);

/// Eval-mode forward per input; predictions are not clamped.
std::map<std::string, double> predict_batch(const MLPHead& head, const VectorMap& inputs);

/// CSV `epoch,mean_loss` with 1-based epochs.
std::string loss_trace_csv(const std::vector<double>& epoch_losses);

/// CTXHEAD1 layout, all integers u64 and reals f64, little-endian:
///   "CTXHEAD1" | input_dim | n_hidden | hidden_dims[n_hidden] | dropout_rate
///   | seed | parameter_count | parameters
/// Parameters run layer by layer from the input side: the weight matrix in
/// row-major order (one row per output unit), then the bias vector.
std::string encode_checkpoint(const MLPHead& head);
MLPHead decode_checkpoint(std::string_view bytes);
void save_checkpoint(const MLPHead& head, const std::filesystem::path& path);
MLPHead load_checkpoint(const std::filesystem::path& path);

}  // namespace ctxcur
