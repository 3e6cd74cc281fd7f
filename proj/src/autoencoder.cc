// melcode/autoencoder.cc

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

#include "melcode/autoencoder.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace melcode {

namespace {

// Stream id for the net-init draw inside TrainDa; keeps initialization
// decorrelated from the shuffle sequence, which consumes the raw seed.
constexpr std::uint64_t kInitStream = 0x696e6974;  // "init"

int ParseWidth(const std::string &token) {
  int value = 0;
  const auto *begin = token.data();
  const auto *end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad width '" + token + "' in topology");
  }
  return value;
}

}  // namespace

Topology Topology::Parse(const std::string &text) {
  Topology topology;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, 'x')) {
    topology.widths.push_back(ParseWidth(token));
  }
  topology.Validate();
  return topology;
}

std::string Topology::ToString() const {
  std::string text;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i > 0) text += 'x';
    text += std::to_string(widths[i]);
  }
  return text;
}

void Topology::Validate() const {
  if (widths.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "topology needs at least two levels, got '" + ToString() +
                    "'");
  }
  for (int w : widths) {
    if (w < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "topology widths must be positive");
    }
  }
}

Corruption Corruption::Parse(const std::string &text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "corruption must look like mask:<p> or gauss:<sigma>, got '" +
                    text + "'");
  }
  const std::string name = text.substr(0, colon);
  const std::string value_text = text.substr(colon + 1);
  Corruption c;
  if (name == "mask") {
    c.kind = Kind::kMasking;
  } else if (name == "gauss") {
    c.kind = Kind::kGaussian;
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "unknown corruption kind '" + name + "'");
  }
  try {
    std::size_t used = 0;
    c.level = std::stod(value_text, &used);
    if (used != value_text.size()) throw std::invalid_argument(value_text);
  } catch (const std::exception &) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad corruption level '" + value_text + "'");
  }
  c.Validate();
  return c;
}

std::string Corruption::ToString() const {
  std::ostringstream out;
  out << (kind == Kind::kMasking ? "mask:" : "gauss:") << level;
  return out.str();
}

void Corruption::Validate() const {
  if (!std::isfinite(level)) {
    throw Error(ErrorCode::kInvalidArgument, "corruption level is not finite");
  }
  if (kind == Kind::kMasking && (level < 0.0 || level > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "masking probability must lie in [0, 1]");
  }
  if (kind == Kind::kGaussian && level < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "gaussian sigma must be non-negative");
  }
}

Eigen::MatrixXd Corrupt(const Eigen::MatrixXd &clean, const Corruption &c) {
  c.Validate();
  Eigen::MatrixXd corrupted = clean;
  if (c.level == 0.0) return corrupted;  // both kinds are identity at level 0
  std::mt19937_64 rng(c.seed);
  // Row-by-row visit order is part of the contract, independent of the
  // matrix storage order.
  if (c.kind == Corruption::Kind::kMasking) {
    for (Eigen::Index r = 0; r < corrupted.rows(); ++r) {
      for (Eigen::Index col = 0; col < corrupted.cols(); ++col) {
        if (Uniform01(rng) < c.level) corrupted(r, col) = 0.0;
      }
    }
  } else {
    for (Eigen::Index r = 0; r < corrupted.rows(); ++r) {
      for (Eigen::Index col = 0; col < corrupted.cols(); ++col) {
        corrupted(r, col) += c.level * StandardNormal(rng);
      }
    }
  }
  return corrupted;
}

DaTrainResult TrainDa(const Eigen::MatrixXd &data, int hidden_width,
                      const Corruption &corruption, const TrainConfig &config,
                      bool reconstructs_spectra, const StageHook &hook) {
  if (data.rows() == 0 || data.cols() == 0) {
    throw Error(ErrorCode::kEmptyInput, "no data to pretrain on");
  }
  if (hidden_width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "hidden width must be positive");
  }
  corruption.Validate();
  const int dim = static_cast<int>(data.cols());
  const Activation decode_activation =
      reconstructs_spectra ? Activation::kLinear : Activation::kSigmoid;
  DenseNet net =
      InitNet({dim, hidden_width, dim},
              {Activation::kSigmoid, decode_activation},
              MixSeed(config.seed, kInitStream));

  const BatchTransform corrupt_batch =
      [&corruption](const Eigen::MatrixXd &batch, std::uint64_t step) {
        Corruption step_corruption = corruption;
        step_corruption.seed = MixSeed(corruption.seed, step + 1);
        return Corrupt(batch, step_corruption);
      };
  const EpochHook epoch_hook =
      hook ? EpochHook([&hook](int epoch, double loss) { hook(-1, epoch, loss); })
           : EpochHook();

  TrainResult trained = SgdTrain(std::move(net), data, data, config,
                                 epoch_hook, corrupt_batch);
  DaTrainResult result;
  result.pair.encode = std::move(trained.net.layers[0]);
  result.pair.decode = std::move(trained.net.layers[1]);
  result.epoch_loss = std::move(trained.epoch_loss);
  return result;
}

SdaTrainResult PretrainSda(const Eigen::MatrixXd &data,
                           const Topology &topology,
                           const Corruption &corruption,
                           const TrainConfig &config, const StageHook &hook) {
  topology.Validate();
  if (data.cols() != topology.widths.front()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data of width " + std::to_string(data.cols()) +
                    " for topology " + topology.ToString());
  }
  const int num_levels = topology.Levels();
  SdaTrainResult result;
  Eigen::MatrixXd level_data = data;
  for (int k = 0; k + 1 < num_levels; ++k) {
    TrainConfig stage_config = config;
    stage_config.seed = MixSeed(config.seed, static_cast<std::uint64_t>(k));
    Corruption stage_corruption = corruption;
    stage_corruption.seed =
        MixSeed(corruption.seed, static_cast<std::uint64_t>(k));
    const StageHook stage_hook =
        hook ? StageHook([&hook, k](int, int epoch, double loss) {
            hook(k, epoch, loss);
          })
             : StageHook();
    DaTrainResult stage =
        TrainDa(level_data, topology.widths[static_cast<std::size_t>(k) + 1],
                stage_corruption, stage_config, /*reconstructs_spectra=*/k == 0,
                stage_hook);
    // Upper levels see the clean encodings; corruption never cascades.
    if (k + 2 < num_levels) {
      DenseNet encode_only;
      encode_only.layers.push_back(stage.pair.encode);
      level_data = Forward(encode_only, level_data);
    }
    result.sda.pairs.push_back(std::move(stage.pair));
    result.stage_loss.push_back(std::move(stage.epoch_loss));
  }
  return result;
}

DenseNet Unwrap(const Sda &sda) {
  if (sda.pairs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "stack has no levels");
  }
  DenseNet mlp;
  mlp.layers.reserve(2 * sda.pairs.size());
  for (const DaPair &pair : sda.pairs) mlp.layers.push_back(pair.encode);
  for (std::size_t k = sda.pairs.size(); k-- > 0;) {
    mlp.layers.push_back(sda.pairs[k].decode);
  }
  mlp.Validate();
  return mlp;
}

std::vector<int> UnwrappedWidths(const Topology &topology) {
  topology.Validate();
  std::vector<int> widths = topology.widths;
  for (std::size_t i = topology.widths.size() - 1; i-- > 0;) {
    widths.push_back(topology.widths[i]);
  }
  return widths;
}

TrainResult Finetune(DenseNet mlp, const Eigen::MatrixXd &data,
                     const TrainConfig &config, const StageHook &hook) {
  mlp.Validate();
  if (mlp.input_dim() != mlp.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "reconstruction net must map a width onto itself");
  }
  const EpochHook epoch_hook =
      hook ? EpochHook([&hook](int epoch, double loss) { hook(-1, epoch, loss); })
           : EpochHook();
  return SgdTrain(std::move(mlp), data, data, config, epoch_hook);
}

SplitNets Split(const DenseNet &mlp, std::optional<int> bottleneck_level) {
  mlp.Validate();
  const std::vector<int> widths = mlp.Widths();
  const int num_levels = static_cast<int>(widths.size());
  if (num_levels < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "net has no interior level to split at");
  }
  int level;
  if (bottleneck_level.has_value()) {
    level = *bottleneck_level;
    if (level < 1 || level > num_levels - 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bottleneck level " + std::to_string(level) +
                      " is not interior");
    }
  } else {
    level = 1;
    bool tied = false;
    for (int i = 2; i <= num_levels - 2; ++i) {
      if (widths[static_cast<std::size_t>(i)] <
          widths[static_cast<std::size_t>(level)]) {
        level = i;
        tied = false;
      } else if (widths[static_cast<std::size_t>(i)] ==
                 widths[static_cast<std::size_t>(level)]) {
        tied = true;
      }
    }
    if (tied) {
      throw Error(ErrorCode::kAmbiguousBottleneck,
                  "several interior levels share the minimum width " +
                      std::to_string(widths[static_cast<std::size_t>(level)]) +
                      "; pass an explicit bottleneck level");
    }
  }
  SplitNets nets;
  nets.encoder.layers.assign(mlp.layers.begin(), mlp.layers.begin() + level);
  nets.decoder.layers.assign(mlp.layers.begin() + level, mlp.layers.end());
  return nets;
}

}  // namespace melcode
