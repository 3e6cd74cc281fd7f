// melcode/nn.cc

// Copyright 2026  The melcode authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "melcode/nn.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace melcode {

std::vector<int> DenseNet::Widths() const {
  std::vector<int> widths;
  widths.reserve(layers.size() + 1);
  widths.push_back(layers.front().input_dim());
  for (const LayerParams &layer : layers) widths.push_back(layer.output_dim());
  return widths;
}

void DenseNet::Validate() const {
  if (layers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "net has no layers");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerParams &layer = layers[l];
    if (layer.input_dim() < 1 || layer.output_dim() < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "layer " + std::to_string(l) + " has an empty dimension");
    }
    if (layer.bias.size() != layer.output_dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " bias of " +
                      std::to_string(layer.bias.size()) + " for " +
                      std::to_string(layer.output_dim()) + " outputs");
    }
    if (l > 0 && layer.input_dim() != layers[l - 1].output_dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " expects " +
                      std::to_string(layer.input_dim()) +
                      " inputs but the previous layer emits " +
                      std::to_string(layers[l - 1].output_dim()));
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw Error(ErrorCode::kNonFinite,
                  "layer " + std::to_string(l) + " holds non-finite values");
    }
  }
}

void TrainConfig::Validate() const {
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be at least 1");
  }
  if (epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be at least 1");
  }
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning_rate must be finite and non-negative");
  }
}

DenseNet InitNet(const std::vector<int> &widths,
                 const std::vector<Activation> &activations,
                 std::uint64_t seed) {
  if (widths.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "a net needs at least two width levels");
  }
  if (activations.size() != widths.size() - 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(activations.size()) + " activations for " +
                    std::to_string(widths.size() - 1) + " layers");
  }
  for (int w : widths) {
    if (w < 1) {
      throw Error(ErrorCode::kInvalidArgument, "width levels must be positive");
    }
  }
  std::mt19937_64 rng(seed);
  DenseNet net;
  net.layers.reserve(activations.size());
  for (std::size_t l = 0; l < activations.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    double limit = std::sqrt(6.0 / (fan_in + fan_out));
    if (activations[l] == Activation::kSigmoid) limit *= 4.0;
    LayerParams layer;
    layer.activation = activations[l];
    layer.weights.resize(fan_out, fan_in);
    // Row-major fill order so the draw sequence is part of the contract.
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.weights(r, c) = UniformRange(rng, -limit, limit);
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace {

void ApplyActivationInPlace(Activation activation, Eigen::MatrixXd &z) {
  if (activation == Activation::kSigmoid) {
    z = 1.0 / (1.0 + (-z.array()).exp());
  }
}

void CheckInputDim(const DenseNet &net, Eigen::Index dim) {
  if (net.layers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "net has no layers");
  }
  if (dim != net.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "input of width " + std::to_string(dim) +
                    " for a net expecting " +
                    std::to_string(net.input_dim()));
  }
}

// Forward pass keeping every level's activation; activations[0] is the input
// batch, activations[L] the output.
std::vector<Eigen::MatrixXd> ForwardTrace(const DenseNet &net,
                                          const Eigen::MatrixXd &inputs) {
  std::vector<Eigen::MatrixXd> activations;
  activations.reserve(net.layers.size() + 1);
  activations.push_back(inputs);
  for (const LayerParams &layer : net.layers) {
    Eigen::MatrixXd z =
        (activations.back() * layer.weights.transpose()).rowwise() +
        layer.bias.transpose();
    ApplyActivationInPlace(layer.activation, z);
    activations.push_back(std::move(z));
  }
  return activations;
}

// Fused loss and gradient computation sharing one forward trace.
double BackwardInto(const DenseNet &net, const Eigen::MatrixXd &inputs,
                    const Eigen::MatrixXd &targets, NetGrads &grads) {
  const std::vector<Eigen::MatrixXd> activations = ForwardTrace(net, inputs);
  const Eigen::Index rows = inputs.rows();
  const Eigen::Index cols = targets.cols();
  const double loss =
      (activations.back() - targets).squaredNorm() /
      static_cast<double>(rows * cols);

  const std::size_t num_layers = net.layers.size();
  grads.resize(num_layers);
  Eigen::MatrixXd grad_activation =
      (activations.back() - targets) * (2.0 / static_cast<double>(rows * cols));
  for (std::size_t l = num_layers; l-- > 0;) {
    Eigen::MatrixXd grad_z;
    if (net.layers[l].activation == Activation::kSigmoid) {
      const auto &a = activations[l + 1].array();
      grad_z = grad_activation.array() * a * (1.0 - a);
    } else {
      grad_z = std::move(grad_activation);
    }
    grads[l].weights.noalias() = grad_z.transpose() * activations[l];
    grads[l].bias = grad_z.colwise().sum().transpose();
    if (l > 0) grad_activation.noalias() = grad_z * net.layers[l].weights;
  }
  return loss;
}

// Fisher-Yates with a pinned draw sequence; std::shuffle is implementation
// defined across standard libraries.
void ShuffleOrder(std::vector<Eigen::Index> &order, std::mt19937_64 &rng) {
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
}

}  // namespace

Eigen::VectorXd Forward(const DenseNet &net, const Eigen::VectorXd &input) {
  CheckInputDim(net, input.size());
  Eigen::VectorXd a = input;
  for (const LayerParams &layer : net.layers) {
    Eigen::VectorXd z = layer.weights * a + layer.bias;
    if (layer.activation == Activation::kSigmoid) {
      z = 1.0 / (1.0 + (-z.array()).exp());
    }
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd Forward(const DenseNet &net, const Eigen::MatrixXd &inputs) {
  CheckInputDim(net, inputs.cols());
  Eigen::MatrixXd a = inputs;
  for (const LayerParams &layer : net.layers) {
    Eigen::MatrixXd z =
        (a * layer.weights.transpose()).rowwise() + layer.bias.transpose();
    ApplyActivationInPlace(layer.activation, z);
    a = std::move(z);
  }
  return a;
}

double MseLoss(const Eigen::MatrixXd &predicted,
               const Eigen::MatrixXd &target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "prediction and target shapes differ");
  }
  if (predicted.rows() == 0 || predicted.cols() == 0) {
    throw Error(ErrorCode::kEmptyInput, "loss of an empty batch");
  }
  return (predicted - target).squaredNorm() /
         static_cast<double>(predicted.rows() * predicted.cols());
}

NetGrads Backward(const DenseNet &net, const Eigen::MatrixXd &inputs,
                  const Eigen::MatrixXd &targets) {
  CheckInputDim(net, inputs.cols());
  if (inputs.rows() != targets.rows() ||
      targets.cols() != net.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "targets do not match the batch and the net output");
  }
  if (inputs.rows() == 0) {
    throw Error(ErrorCode::kEmptyInput, "gradient of an empty batch");
  }
  NetGrads grads;
  BackwardInto(net, inputs, targets, grads);
  return grads;
}

TrainResult SgdTrain(DenseNet net, const Eigen::MatrixXd &inputs,
                     const Eigen::MatrixXd &targets, const TrainConfig &config,
                     const EpochHook &hook, const BatchTransform &transform) {
  config.Validate();
  net.Validate();
  CheckInputDim(net, inputs.cols());
  if (inputs.rows() != targets.rows() ||
      targets.cols() != net.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "targets do not match the batch and the net output");
  }
  const Eigen::Index count = inputs.rows();
  if (count == 0) {
    throw Error(ErrorCode::kEmptyInput, "training set has no samples");
  }

  std::mt19937_64 order_rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const Eigen::Index batch = config.batch_size;
  TrainResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));
  NetGrads grads;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) ShuffleOrder(order, order_rng);
    double loss_sum = 0.0;
    for (Eigen::Index lo = 0; lo < count; lo += batch) {
      const Eigen::Index hi = std::min(count, lo + batch);
      const Eigen::Index size = hi - lo;
      Eigen::MatrixXd batch_inputs(size, inputs.cols());
      Eigen::MatrixXd batch_targets(size, targets.cols());
      for (Eigen::Index i = 0; i < size; ++i) {
        batch_inputs.row(i) = inputs.row(order[static_cast<std::size_t>(lo + i)]);
        batch_targets.row(i) = targets.row(order[static_cast<std::size_t>(lo + i)]);
      }
      if (transform) batch_inputs = transform(batch_inputs, step);
      const double loss = BackwardInto(net, batch_inputs, batch_targets, grads);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDiverged,
                    "loss became non-finite at epoch " +
                        std::to_string(epoch));
      }
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        net.layers[l].weights.noalias() -=
            config.learning_rate * grads[l].weights;
        net.layers[l].bias.noalias() -= config.learning_rate * grads[l].bias;
      }
      loss_sum += loss * static_cast<double>(size);
      ++step;
    }
    const double epoch_loss = loss_sum / static_cast<double>(count);
    result.epoch_loss.push_back(epoch_loss);
    if (hook) hook(epoch, epoch_loss);
  }
  result.net = std::move(net);
  return result;
}

}  // namespace melcode
