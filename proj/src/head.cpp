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

#include "contextcurate/head.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <set>

#include "contextcurate/error.hpp"
#include "contextcurate/rng.hpp"
#include "contextcurate/text_io.hpp"

namespace ctxcur {
namespace {

constexpr char kMagic[8] = {'C', 'T', 'X', 'H', 'E', 'A', 'D', '1'};

// Activations kept for the backward pass.
struct Trace {
  std::vector<Eigen::MatrixXd> activations;  // input, then each hidden output
  std::vector<Eigen::MatrixXd> pre;          // hidden pre-activations
  std::vector<Eigen::MatrixXd> masks;        // dropout scale per hidden unit
  Eigen::VectorXd output;
};

Eigen::MatrixXd dropout_mask(std::size_t rows, std::size_t cols, double rate, std::uint64_t seed) {
  Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (rate <= 0.0) return mask;
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = rng.uniform() < rate ? 0.0 : keep_scale;
  }
  return mask;
}

Trace run_forward(const MLPHead& head, const Eigen::MatrixXd& inputs, bool train_mode,
                  std::uint64_t dropout_seed) {
  Trace t;
  t.activations.push_back(inputs);
  const std::size_t n_hidden = head.layers.size() - 1;
  for (std::size_t l = 0; l < n_hidden; ++l) {
    const DenseLayer& layer = head.layers[l];
    Eigen::MatrixXd z = t.activations.back() * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    Eigen::MatrixXd a = z.cwiseMax(0.0);
    if (train_mode) {
      Eigen::MatrixXd mask = dropout_mask(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()),
                                          head.config.dropout_rate, derive_seed(dropout_seed, l));
      a = a.cwiseProduct(mask);
      t.masks.push_back(std::move(mask));
    }
    t.pre.push_back(std::move(z));
    t.activations.push_back(std::move(a));
  }
  const DenseLayer& out = head.layers.back();
  t.output = t.activations.back() * out.weight.transpose();
  t.output.array() += out.bias(0);
  return t;
}

void check_batch(const MLPHead& head, const Batch& batch) {
  if (batch.inputs.rows() == 0) throw InputError("empty batch");
  if (batch.inputs.rows() != batch.targets.size()) throw InputError("batch inputs and targets differ in length");
  if (static_cast<std::size_t>(batch.inputs.cols()) != head.config.input_dim) {
    throw InputError("batch width " + std::to_string(batch.inputs.cols()) + " != input_dim " +
                     std::to_string(head.config.input_dim));
  }
}

Gradients zeros_like(const MLPHead& head) {
  Gradients g;
  for (const DenseLayer& layer : head.layers) {
    g.push_back({Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols()),
                 Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return g;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    if (bytes_.size() - pos_ < 8) throw InputError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void HeadConfig::validate() const {
  if (input_dim == 0) throw InputError("head input_dim must be at least 1");
  for (std::size_t h : hidden_dims) {
    if (h == 0) throw InputError("hidden layer widths must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InputError("dropout rate must be in [0,1)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw InputError("weight_decay must be non-negative");
  if (batch_size == 0) throw InputError("batch_size must be positive");
  if (!(huber_beta > 0.0)) throw InputError("huber_beta must be positive");
}

std::size_t MLPHead::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

MLPHead init_head(const HeadConfig& config, std::uint64_t seed) {
  config.validate();
  MLPHead head;
  head.config = config;
  head.seed = seed;
  std::vector<std::size_t> widths{config.input_dim};
  widths.insert(widths.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  widths.push_back(1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(widths[l]);
    const auto fan_out = static_cast<Eigen::Index>(widths[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Rng rng(derive_seed(seed, l));
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    head.layers.push_back(std::move(layer));
  }
  return head;
}

double forward(const MLPHead& head, std::span<const double> x, bool train_mode, std::uint64_t dropout_seed) {
  if (x.size() != head.config.input_dim) {
    throw InputError("input length " + std::to_string(x.size()) + " != input_dim " +
                     std::to_string(head.config.input_dim));
  }
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw InputError("non-finite head input");
    row(0, static_cast<Eigen::Index>(i)) = x[i];
  }
  return run_forward(head, row, train_mode, dropout_seed).output(0);
}

double huber_loss(double pred, double target, double beta) {
  const double e = std::abs(pred - target);
  return e < beta ? 0.5 * e * e / beta : e - 0.5 * beta;
}

double huber_gradient(double pred, double target, double beta) {
  const double e = pred - target;
  if (std::abs(e) < beta) return e / beta;
  return e > 0 ? 1.0 : -1.0;
}

double batch_loss(const MLPHead& head, const Batch& batch, double huber_beta, bool train_mode,
                  std::uint64_t dropout_seed) {
  check_batch(head, batch);
  const Trace t = run_forward(head, batch.inputs, train_mode, dropout_seed);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < t.output.size(); ++i) loss += huber_loss(t.output(i), batch.targets(i), huber_beta);
  return loss / static_cast<double>(t.output.size());
}

BackwardResult backward(const MLPHead& head, const Batch& batch, double huber_beta, bool train_mode,
                        std::uint64_t dropout_seed) {
  check_batch(head, batch);
  const Trace t = run_forward(head, batch.inputs, train_mode, dropout_seed);
  const Eigen::Index n = batch.inputs.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  BackwardResult result;
  result.grads = zeros_like(head);
  Eigen::MatrixXd delta(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.loss += huber_loss(t.output(i), batch.targets(i), huber_beta);
    delta(i, 0) = huber_gradient(t.output(i), batch.targets(i), huber_beta) * inv_n;
  }
  result.loss *= inv_n;

  for (std::size_t l = head.layers.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = t.activations[l];
    result.grads[l].weight = delta.transpose() * input;
    result.grads[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd upstream = delta * head.layers[l].weight;
    // Back through dropout and ReLU of hidden layer l-1.
    if (train_mode) upstream = upstream.cwiseProduct(t.masks[l - 1]);
    delta = upstream.cwiseProduct((t.pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return result;
}

OptState make_opt_state(const MLPHead& head) {
  OptState state;
  state.first_moment = zeros_like(head);
  state.second_moment = zeros_like(head);
  return state;
}

void adamw_step(MLPHead& head, const Gradients& grads, OptState& state, const TrainConfig& config) {
  if (grads.size() != head.layers.size() || state.first_moment.size() != head.layers.size()) {
    throw InvariantError("adamw_step: gradient/state shapes do not match the head");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(OptState::kBeta1, t);
  const double bias2 = 1.0 - std::pow(OptState::kBeta2, t);
  const double lr = config.learning_rate;
  const double decay = lr * config.weight_decay;

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    if (param.size() != grad.size() || param.size() != m.size()) {
      throw InvariantError("adamw_step: parameter shape mismatch");
    }
    m = OptState::kBeta1 * m + (1.0 - OptState::kBeta1) * grad;
    v = OptState::kBeta2 * v + (1.0 - OptState::kBeta2) * grad.cwiseProduct(grad);
    const auto m_hat = m.array() / bias1;
    const auto v_hat = v.array() / bias2;
    param.array() -= lr * (m_hat / (v_hat.sqrt() + OptState::kEpsilon)) + decay * param.array();
  };
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    update(head.layers[l].weight, grads[l].weight, state.first_moment[l].weight, state.second_moment[l].weight);
    update(head.layers[l].bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
  }
}

TrainResult train(const VectorMap& inputs, const LabelMap& labels, std::vector<std::string> train_ids,
                  const HeadConfig& head_config, const TrainConfig& train_config) {
  train_config.validate();
  std::sort(train_ids.begin(), train_ids.end());
  train_ids.erase(std::unique(train_ids.begin(), train_ids.end()), train_ids.end());
  std::vector<const std::vector<double>*> x;
  std::vector<double> y;
  for (const std::string& id : train_ids) {
    auto xi = inputs.find(id);
    if (xi == inputs.end()) throw InputError("no input vector for training id '" + id + "'");
    auto yi = labels.find(id);
    if (yi == labels.end()) throw InputError("no label for training id '" + id + "'");
    if (xi->second.size() != head_config.input_dim) {
      throw InputError("input for '" + id + "' has length " + std::to_string(xi->second.size()) +
                       ", head expects " + std::to_string(head_config.input_dim));
    }
    x.push_back(&xi->second);
    y.push_back(yi->second);
  }

  TrainResult result{init_head(head_config, train_config.seed), {}};
  if (train_ids.empty()) {
    if (train_config.epochs > 0) throw InputError("no training rows");
    return result;
  }
  OptState state = make_opt_state(result.head);

  std::vector<std::size_t> order(train_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto width = static_cast<Eigen::Index>(head_config.input_dim);

  for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
    if (train_config.shuffle) Rng(derive_seed(train_config.seed, 0x5EED0000ULL + epoch)).shuffle(order);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      Batch batch{Eigen::MatrixXd(static_cast<Eigen::Index>(end - start), width),
                  Eigen::VectorXd(static_cast<Eigen::Index>(end - start))};
      for (std::size_t r = start; r < end; ++r) {
        const auto row = static_cast<Eigen::Index>(r - start);
        const std::vector<double>& src = *x[order[r]];
        for (Eigen::Index c = 0; c < width; ++c) batch.inputs(row, c) = src[static_cast<std::size_t>(c)];
        batch.targets(row) = y[order[r]];
      }
      const std::uint64_t dropout_seed = derive_seed(train_config.seed, (epoch << 32) ^ batch_index ^ 0xD80F0000000000ULL);
      BackwardResult step = backward(result.head, batch, train_config.huber_beta, true, dropout_seed);
      adamw_step(result.head, step.grads, state, train_config);
      loss_sum += step.loss * static_cast<double>(end - start);
    }
    result.epoch_losses.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return result;
}

std::map<std::string, double> predict_batch(const MLPHead& head, const VectorMap& inputs) {
  std::map<std::string, double> out;
  for (const auto& [id, x] : inputs) out.emplace(id, forward(head, x, false));
  return out;
}

std::string loss_trace_csv(const std::vector<double>& epoch_losses) {
  std::string out = "epoch,mean_loss\n";
  for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
    out += std::to_string(e + 1) + "," + format_shortest(epoch_losses[e]) + "\n";
  }
  return out;
}

std::string encode_checkpoint(const MLPHead& head) {
  std::string out(kMagic, sizeof kMagic);
  put_u64(out, head.config.input_dim);
  put_u64(out, head.config.hidden_dims.size());
  for (std::size_t h : head.config.hidden_dims) put_u64(out, h);
  put_f64(out, head.config.dropout_rate);
  put_u64(out, head.seed);
  put_u64(out, head.parameter_count());
  for (const DenseLayer& layer : head.layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) put_f64(out, layer.weight(r, c));
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) put_f64(out, layer.bias(i));
  }
  return out;
}

MLPHead decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw InputError("not a CTXHEAD1 checkpoint");
  }
  Reader in(bytes.substr(sizeof kMagic));
  HeadConfig config;
  config.input_dim = in.u64();
  const std::uint64_t n_hidden = in.u64();
  if (n_hidden > 1024) throw InputError("checkpoint declares an implausible layer count");
  config.hidden_dims.clear();
  for (std::uint64_t i = 0; i < n_hidden; ++i) config.hidden_dims.push_back(in.u64());
  config.dropout_rate = in.f64();
  const std::uint64_t seed = in.u64();
  const std::uint64_t count = in.u64();

  MLPHead head = init_head(config, seed);
  if (count != head.parameter_count()) throw InputError("checkpoint parameter count does not match its config");
  for (DenseLayer& layer : head.layers) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = in.f64();
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = in.f64();
  }
  if (!in.done()) throw InputError("trailing bytes after checkpoint parameters");
  return head;
}

void save_checkpoint(const MLPHead& head, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(head));
}

MLPHead load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace ctxcur
