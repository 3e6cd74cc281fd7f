// melcode/nn.h

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

// Dense feed-forward networks in binary64: forward pass, mean squared error,
// exact backpropagation, and plain minibatch SGD.  Everything here is
// deterministic given the seeds it is handed.

#ifndef MELCODE_NN_H_
#define MELCODE_NN_H_

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "melcode/common.h"

namespace melcode {

enum class Activation : std::uint8_t {
  kLinear = 0,
  kSigmoid = 1,
};

// One dense layer computing act(x W^T + b).  weights is output_dim x
// input_dim; bias is output_dim.
struct LayerParams {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
  Activation activation = Activation::kSigmoid;

  int input_dim() const { return static_cast<int>(weights.cols()); }
  int output_dim() const { return static_cast<int>(weights.rows()); }
};

// Layers applied in order.  Widths must chain: each layer's input width is
// the previous layer's output width.
struct DenseNet {
  std::vector<LayerParams> layers;

  int input_dim() const { return layers.front().input_dim(); }
  int output_dim() const { return layers.back().output_dim(); }

  // Width at each level, input first: layers.size() + 1 entries.
  std::vector<int> Widths() const;

  // Throws Error(kInvalidArgument) for an empty net, Error(kDimensionMismatch)
  // for a broken width chain, Error(kNonFinite) for non-finite parameters.
  void Validate() const;
};

// Gradient of the loss with respect to one layer's parameters; shapes match
// LayerParams.
struct LayerGrads {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

using NetGrads = std::vector<LayerGrads>;

struct TrainConfig {
  int batch_size = 20;
  int epochs = 50;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
  bool shuffle = true;

  // batch_size >= 1, epochs >= 1, learning_rate finite and >= 0 (zero is
  // allowed so a no-op pass stays expressible in tests).
  void Validate() const;
};

struct TrainResult {
  DenseNet net;
  std::vector<double> epoch_loss;  // one entry per epoch, pre-update batches
};

// Called once per epoch with the epoch index and its mean loss.
using EpochHook = std::function<void(int epoch, double loss)>;

// Maps a clean minibatch to the batch actually fed forward (the corruption
// hook); step counts minibatches from zero across all epochs.
using BatchTransform =
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd &batch,
                                  std::uint64_t step)>;

// Uniform init in [-limit, limit] with limit = sqrt(6 / (fan_in + fan_out)),
// scaled by 4 for sigmoid layers; biases start at zero.  widths and
// activations describe the net level by level: activations.size() ==
// widths.size() - 1.
DenseNet InitNet(const std::vector<int> &widths,
                 const std::vector<Activation> &activations,
                 std::uint64_t seed);

// Forward pass for one column vector.
Eigen::VectorXd Forward(const DenseNet &net, const Eigen::VectorXd &input);

// Forward pass for a batch with one sample per row.
Eigen::MatrixXd Forward(const DenseNet &net, const Eigen::MatrixXd &inputs);

// Mean over samples of the per-sample squared error averaged over
// dimensions: sum((pred - target)^2) / (rows * cols).
double MseLoss(const Eigen::MatrixXd &predicted, const Eigen::MatrixXd &target);

// Exact gradients of MseLoss with respect to every parameter, one sample per
// row.  The output-layer signal is (2 / (rows * cols)) * (prediction -
// target); sigmoid derivative uses the activation value a (1 - a).
NetGrads Backward(const DenseNet &net, const Eigen::MatrixXd &inputs,
                  const Eigen::MatrixXd &targets);

// Plain minibatch SGD: shuffles sample order each epoch (Fisher-Yates on a
// dedicated engine seeded from config.seed), walks contiguous minibatches,
// applies W <- W - lr * dW.  The recorded epoch loss is the frame-weighted
// mean of each minibatch's pre-update loss.  Throws Error(kDiverged) naming
// the epoch when a loss stops being finite.
TrainResult SgdTrain(DenseNet net, const Eigen::MatrixXd &inputs,
                     const Eigen::MatrixXd &targets, const TrainConfig &config,
                     const EpochHook &hook = nullptr,
                     const BatchTransform &transform = nullptr);

}  // namespace melcode

#endif  // MELCODE_NN_H_
