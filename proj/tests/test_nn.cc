// melcode/test_nn.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "melcode/nn.h"
#include "support/test_util.h"

namespace melcode {
namespace {

using testutil::MeanSquaredError;

DenseNet IdentityLinearNet(int dim) {
  LayerParams layer;
  layer.weights = Eigen::MatrixXd::Identity(dim, dim);
  layer.bias = Eigen::VectorXd::Zero(dim);
  layer.activation = Activation::kLinear;
  DenseNet net;
  net.layers.push_back(std::move(layer));
  return net;
}

// A random net with the given widths, weights small enough that sigmoids stay
// well away from saturation.
DenseNet RandomNet(const std::vector<int> &widths,
                   const std::vector<Activation> &activations,
                   std::mt19937_64 &rng) {
  DenseNet net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    LayerParams layer;
    layer.activation = activations[l];
    layer.weights.resize(widths[l + 1], widths[l]);
    for (int r = 0; r < layer.weights.rows(); ++r) {
      for (int c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = UniformRange(rng, -0.9, 0.9);
      }
    }
    layer.bias.resize(widths[l + 1]);
    for (int r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = UniformRange(rng, -0.4, 0.4);
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

Eigen::MatrixXd RandomBatch(Eigen::Index rows, Eigen::Index cols,
                            std::mt19937_64 &rng, double span = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = UniformRange(rng, -span, span);
    }
  }
  return m;
}

// Central finite differences through the real loss, one parameter at a time.
double MaxGradientRelativeError(DenseNet net, const Eigen::MatrixXd &inputs,
                                const Eigen::MatrixXd &targets, double eps) {
  const NetGrads analytic = Backward(net, inputs, targets);
  double worst = 0.0;
  auto probe = [&](double &param, double analytic_grad) {
    const double saved = param;
    param = saved + eps;
    const double up = MseLoss(Forward(net, inputs), targets);
    param = saved - eps;
    const double down = MseLoss(Forward(net, inputs), targets);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double scale =
        std::max({std::abs(analytic_grad), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic_grad - numeric) / scale);
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    LayerParams &layer = net.layers[l];
    for (int r = 0; r < layer.weights.rows(); ++r) {
      for (int c = 0; c < layer.weights.cols(); ++c) {
        probe(layer.weights(r, c), analytic[l].weights(r, c));
      }
    }
    for (int r = 0; r < layer.bias.size(); ++r) {
      probe(layer.bias(r), analytic[l].bias(r));
    }
  }
  return worst;
}

using testutil::SameNet;

TEST_CASE("mse loss of identical matrices is zero") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd m = RandomBatch(7, 5, rng);
  CHECK(MseLoss(m, m) == 0.0);
}

TEST_CASE("mse loss of an all-ones residual is one") {
  const Eigen::MatrixXd pred = Eigen::MatrixXd::Ones(1, 6);
  const Eigen::MatrixXd target = Eigen::MatrixXd::Zero(1, 6);
  CHECK(MseLoss(pred, target) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mse loss hand value for a single two-dim residual") {
  Eigen::MatrixXd pred(1, 2);
  pred << 2.0, 0.0;
  const Eigen::MatrixXd target = Eigen::MatrixXd::Zero(1, 2);
  // (4 + 0) / 2.
  CHECK(MseLoss(pred, target) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("mse loss is symmetric and nonnegative") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = RandomBatch(4, 9, rng);
    const Eigen::MatrixXd b = RandomBatch(4, 9, rng);
    const double ab = MseLoss(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab == MseLoss(b, a));
  }
}

TEST_CASE("mse loss rejects mismatched and empty batches") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 4);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3, 5);
  CHECK_THROWS_WITH_AS(MseLoss(a, b), doctest::Contains("shapes differ"),
                       Error);
  const Eigen::MatrixXd empty(0, 4);
  CHECK_THROWS_AS(MseLoss(empty, empty), Error);
}

TEST_CASE("forward through an identity linear layer returns the input") {
  std::mt19937_64 rng(3);
  const DenseNet net = IdentityLinearNet(6);
  const Eigen::VectorXd x = RandomBatch(6, 1, rng).col(0);
  CHECK(Forward(net, x) == x);
  const Eigen::MatrixXd batch = RandomBatch(5, 6, rng);
  CHECK(Forward(net, batch) == batch);
}

TEST_CASE("forward through a zero sigmoid layer yields one half everywhere") {
  LayerParams layer;
  layer.weights = Eigen::MatrixXd::Zero(4, 3);
  layer.bias = Eigen::VectorXd::Zero(4);
  layer.activation = Activation::kSigmoid;
  DenseNet net;
  net.layers.push_back(layer);
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd out = Forward(net, RandomBatch(8, 3, rng));
  CHECK((out.array() == 0.5).all());
}

TEST_CASE("forward of stacked layers equals the composition of the parts") {
  std::mt19937_64 rng(5);
  const DenseNet net = RandomNet(
      {5, 7, 3}, {Activation::kSigmoid, Activation::kLinear}, rng);
  DenseNet first;
  first.layers.push_back(net.layers[0]);
  DenseNet second;
  second.layers.push_back(net.layers[1]);
  const Eigen::MatrixXd batch = RandomBatch(6, 5, rng);
  CHECK(Forward(net, batch) == Forward(second, Forward(first, batch)));
}

TEST_CASE("batch forward agrees with the vector forward row by row") {
  std::mt19937_64 rng(6);
  const DenseNet net = RandomNet(
      {4, 6, 4}, {Activation::kSigmoid, Activation::kSigmoid}, rng);
  const Eigen::MatrixXd batch = RandomBatch(5, 4, rng);
  const Eigen::MatrixXd out = Forward(net, batch);
  for (Eigen::Index r = 0; r < batch.rows(); ++r) {
    const Eigen::VectorXd row = Forward(net, Eigen::VectorXd(batch.row(r)));
    CHECK((out.row(r).transpose() - row).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("forward rejects inputs of the wrong width") {
  const DenseNet net = IdentityLinearNet(6);
  const Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 5);
  CHECK_THROWS_AS(Forward(net, bad), Error);
}

TEST_CASE("sigmoid outputs stay strictly inside the unit interval") {
  // Moderate pre-activations only: past |z| ~ 37 the binary64 quotient
  // rounds to exactly 1.0, so the open interval is a claim about the
  // working regime, not about saturation.
  std::mt19937_64 rng(7);
  const DenseNet net =
      RandomNet({6, 9}, {Activation::kSigmoid}, rng);
  const Eigen::MatrixXd out = Forward(net, RandomBatch(50, 6, rng, 2.0));
  CHECK((out.array() > 0.0).all());
  CHECK((out.array() < 1.0).all());
}

TEST_CASE("linear layers pass values outside the unit interval") {
  DenseNet net = IdentityLinearNet(3);
  net.layers[0].weights *= 100.0;
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 3.0;
  const Eigen::VectorXd out = Forward(net, x);
  CHECK(out(2) == 300.0);
  CHECK(out(1) == -200.0);
}

TEST_CASE("backward of a perfect prediction is all zeros") {
  std::mt19937_64 rng(8);
  const DenseNet net = IdentityLinearNet(5);
  const Eigen::MatrixXd batch = RandomBatch(4, 5, rng);
  const NetGrads grads = Backward(net, batch, batch);
  CHECK(grads[0].weights.isZero(0.0));
  CHECK(grads[0].bias.isZero(0.0));
}

TEST_CASE("backward of one linear layer matches the closed form") {
  std::mt19937_64 rng(9);
  const DenseNet net =
      RandomNet({4, 3}, {Activation::kLinear}, rng);
  const Eigen::MatrixXd x = RandomBatch(1, 4, rng);
  const Eigen::MatrixXd target = RandomBatch(1, 3, rng);
  const Eigen::MatrixXd pred = Forward(net, x);
  // dL/dW = (2 / D) * (pred - target)^T x for a single sample.
  const Eigen::MatrixXd expected_w =
      (2.0 / 3.0) * (pred - target).transpose() * x;
  const Eigen::VectorXd expected_b =
      (2.0 / 3.0) * (pred - target).transpose();
  const NetGrads grads = Backward(net, x, target);
  CHECK((grads[0].weights - expected_w).lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK((grads[0].bias - expected_b).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("backward matches central finite differences on random nets") {
  std::mt19937_64 rng(10);
  const std::vector<std::vector<int>> shapes = {
      {3, 5, 3}, {4, 2, 6, 4}, {5, 5}, {2, 7, 3, 2}};
  for (const std::vector<int> &widths : shapes) {
    std::vector<Activation> activations;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      activations.push_back((rng() % 2 == 0) ? Activation::kSigmoid
                                             : Activation::kLinear);
    }
    const DenseNet net = RandomNet(widths, activations, rng);
    const Eigen::MatrixXd inputs = RandomBatch(6, widths.front(), rng);
    const Eigen::MatrixXd targets = RandomBatch(6, widths.back(), rng);
    CHECK(MaxGradientRelativeError(net, inputs, targets, 1e-5) < 1e-4);
  }
}

TEST_CASE("backward rejects mismatched shapes") {
  const DenseNet net = IdentityLinearNet(4);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 4);
  const Eigen::MatrixXd bad_target = Eigen::MatrixXd::Zero(3, 5);
  CHECK_THROWS_AS(Backward(net, x, bad_target), Error);
  const Eigen::MatrixXd bad_rows = Eigen::MatrixXd::Zero(2, 4);
  CHECK_THROWS_AS(Backward(net, x, bad_rows), Error);
}

TEST_CASE("sgd with zero learning rate leaves the net untouched") {
  std::mt19937_64 rng(11);
  const DenseNet net = RandomNet(
      {4, 6, 4}, {Activation::kSigmoid, Activation::kLinear}, rng);
  const Eigen::MatrixXd data = RandomBatch(40, 4, rng);
  TrainConfig config;
  config.batch_size = 8;
  config.epochs = 3;
  config.learning_rate = 0.0;
  const TrainResult result = SgdTrain(net, data, data, config);
  CHECK(SameNet(result.net, net));
}

TEST_CASE("sgd loss trace has one entry per epoch") {
  std::mt19937_64 rng(12);
  const DenseNet net = RandomNet({3, 3}, {Activation::kLinear}, rng);
  const Eigen::MatrixXd data = RandomBatch(25, 3, rng);
  TrainConfig config;
  config.batch_size = 7;
  config.epochs = 9;
  const TrainResult result = SgdTrain(net, data, data, config);
  CHECK(result.epoch_loss.size() == 9);
}

TEST_CASE("sgd with a fixed seed is bit-reproducible") {
  std::mt19937_64 rng(13);
  const DenseNet net = RandomNet(
      {5, 4, 5}, {Activation::kSigmoid, Activation::kLinear}, rng);
  const Eigen::MatrixXd data = RandomBatch(60, 5, rng);
  TrainConfig config;
  config.batch_size = 16;
  config.epochs = 5;
  config.learning_rate = 0.05;
  config.seed = 321;
  const TrainResult a = SgdTrain(net, data, data, config);
  const TrainResult b = SgdTrain(net, data, data, config);
  CHECK(SameNet(a.net, b.net));
  CHECK(a.epoch_loss == b.epoch_loss);
}

TEST_CASE("sgd descends on exactly linear data") {
  std::mt19937_64 rng(14);
  DenseNet net = RandomNet({4, 2}, {Activation::kLinear}, rng);
  const Eigen::MatrixXd inputs = RandomBatch(80, 4, rng);
  Eigen::MatrixXd map(2, 4);
  map << 0.5, -0.25, 1.0, 0.75, -0.5, 0.3, 0.2, -1.0;
  const Eigen::MatrixXd targets = inputs * map.transpose();
  TrainConfig config;
  config.batch_size = 10;
  config.epochs = 30;
  config.learning_rate = 0.1;
  const TrainResult result = SgdTrain(net, inputs, targets, config);
  CHECK(result.epoch_loss.back() < result.epoch_loss.front());
}

TEST_CASE("sgd divergence aborts with an error naming the epoch") {
  std::mt19937_64 rng(15);
  const DenseNet net = RandomNet({3, 3}, {Activation::kLinear}, rng);
  const Eigen::MatrixXd data = RandomBatch(30, 3, rng, 100.0);
  TrainConfig config;
  config.batch_size = 5;
  config.epochs = 50;
  config.learning_rate = 1e12;
  CHECK_THROWS_WITH_AS(SgdTrain(net, data, data, config),
                       doctest::Contains("epoch"), Error);
}

TEST_CASE("epoch loss is independent of batch order when nothing updates") {
  std::mt19937_64 rng(16);
  const DenseNet net = RandomNet(
      {4, 5, 4}, {Activation::kSigmoid, Activation::kLinear}, rng);
  const Eigen::MatrixXd data = RandomBatch(50, 4, rng);
  TrainConfig config;
  config.batch_size = 6;
  config.epochs = 2;
  config.learning_rate = 0.0;
  TrainConfig unshuffled = config;
  unshuffled.shuffle = false;
  const TrainResult a = SgdTrain(net, data, data, config);
  const TrainResult b = SgdTrain(net, data, data, unshuffled);
  for (std::size_t e = 0; e < a.epoch_loss.size(); ++e) {
    CHECK(a.epoch_loss[e] ==
          doctest::Approx(b.epoch_loss[e]).epsilon(1e-12));
  }
}

TEST_CASE("an identity batch transform does not change training") {
  std::mt19937_64 rng(17);
  const DenseNet net = RandomNet({3, 4, 3},
                                 {Activation::kSigmoid, Activation::kLinear},
                                 rng);
  const Eigen::MatrixXd data = RandomBatch(30, 3, rng);
  TrainConfig config;
  config.batch_size = 8;
  config.epochs = 4;
  config.learning_rate = 0.05;
  const TrainResult plain = SgdTrain(net, data, data, config);
  const TrainResult hooked = SgdTrain(
      net, data, data, config, nullptr,
      [](const Eigen::MatrixXd &batch, std::uint64_t) { return batch; });
  CHECK(SameNet(plain.net, hooked.net));
}

TEST_CASE("init starts every bias at zero") {
  const DenseNet net = InitNet(
      {6, 4, 2}, {Activation::kSigmoid, Activation::kLinear}, 99);
  for (const LayerParams &layer : net.layers) {
    CHECK(layer.bias.isZero(0.0));
  }
}

TEST_CASE("init is deterministic per seed and differs across seeds") {
  const std::vector<int> widths = {5, 7, 3};
  const std::vector<Activation> acts = {Activation::kSigmoid,
                                        Activation::kSigmoid};
  const DenseNet a = InitNet(widths, acts, 42);
  const DenseNet b = InitNet(widths, acts, 42);
  const DenseNet c = InitNet(widths, acts, 43);
  CHECK(SameNet(a, b));
  CHECK_FALSE(SameNet(a, c));
}

TEST_CASE("init draws stay inside the fan-scaled ranges") {
  const DenseNet net = InitNet(
      {10, 8, 10}, {Activation::kSigmoid, Activation::kLinear}, 7);
  const double sigmoid_limit = 4.0 * std::sqrt(6.0 / (10 + 8));
  const double linear_limit = std::sqrt(6.0 / (8 + 10));
  CHECK(net.layers[0].weights.lpNorm<Eigen::Infinity>() <= sigmoid_limit);
  CHECK(net.layers[1].weights.lpNorm<Eigen::Infinity>() <= linear_limit);
  // The sigmoid range really is the wider one.
  CHECK(net.layers[0].weights.lpNorm<Eigen::Infinity>() > linear_limit);
}

TEST_CASE("init sample mean of a large layer is near zero") {
  const DenseNet net = InitNet({1000, 1000}, {Activation::kSigmoid}, 11);
  const double mean = net.layers[0].weights.mean();
  CHECK(std::abs(mean) < 0.01);
}

TEST_CASE("net validation flags empty, broken, and non-finite nets") {
  DenseNet empty;
  CHECK_THROWS_AS(empty.Validate(), Error);

  DenseNet broken = IdentityLinearNet(3);
  LayerParams extra;
  extra.weights = Eigen::MatrixXd::Zero(2, 4);  // wants 4, gets 3
  extra.bias = Eigen::VectorXd::Zero(2);
  broken.layers.push_back(extra);
  CHECK_THROWS_AS(broken.Validate(), Error);

  DenseNet poisoned = IdentityLinearNet(3);
  poisoned.layers[0].weights(1, 1) = std::nan("");
  CHECK_THROWS_AS(poisoned.Validate(), Error);
}

TEST_CASE("train config validation") {
  TrainConfig config;
  CHECK_NOTHROW(config.Validate());
  config.learning_rate = 0.0;  // the no-op pass must stay expressible
  CHECK_NOTHROW(config.Validate());
  config.learning_rate = -0.1;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = TrainConfig{};
  config.batch_size = 0;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = TrainConfig{};
  config.epochs = 0;
  CHECK_THROWS_AS(config.Validate(), Error);
}

}  // namespace
}  // namespace melcode
