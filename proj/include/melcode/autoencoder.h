// melcode/autoencoder.h

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

// Stacked denoising autoencoder pretraining and the reconstruction MLP built
// from it: greedy layer-wise training on corrupted inputs, unwrapping the
// stack into a deep autoencoder, end-to-end fine-tuning, and the split into
// encoder and decoder halves.

#ifndef MELCODE_AUTOENCODER_H_
#define MELCODE_AUTOENCODER_H_

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "melcode/common.h"
#include "melcode/nn.h"

namespace melcode {

// Width at each level of the encoder, input first; "257x125x75x50" has four
// levels and bottleneck width 50.
struct Topology {
  std::vector<int> widths;

  static Topology Parse(const std::string &text);
  std::string ToString() const;

  int Levels() const { return static_cast<int>(widths.size()); }
  int BottleneckWidth() const { return widths.back(); }

  // At least two levels, every width positive.
  void Validate() const;
};

// Input corruption applied during denoising pretraining.  Masking zeroes each
// entry independently with probability level; gaussian adds zero-mean noise
// with standard deviation level.
struct Corruption {
  enum class Kind { kMasking, kGaussian };

  Kind kind = Kind::kMasking;
  double level = 0.3;
  std::uint64_t seed = 1;

  // Accepts "mask:<p>" or "gauss:<sigma>"; the seed stays at its default.
  static Corruption Parse(const std::string &text);
  std::string ToString() const;

  // Masking level in [0, 1]; gaussian level finite and >= 0.
  void Validate() const;
};

// Pure function of (input, corruption): the same seed always corrupts the
// same entries.  Entries are visited row by row.
Eigen::MatrixXd Corrupt(const Eigen::MatrixXd &clean, const Corruption &c);

// One pretrained denoising autoencoder level: encode maps data width to
// hidden width, decode maps back.
struct DaPair {
  LayerParams encode;
  LayerParams decode;
};

struct DaTrainResult {
  DaPair pair;
  std::vector<double> epoch_loss;
};

// The greedy stack: pairs[k] was trained on the clean encodings of pairs
// 0..k-1 (pairs[0] on the data itself).
struct Sda {
  std::vector<DaPair> pairs;
};

struct SdaTrainResult {
  Sda sda;
  std::vector<std::vector<double>> stage_loss;  // one trace per level
};

// Called as training progresses: stage index within the stack (or -1 for a
// single run), epoch, epoch loss.
using StageHook = std::function<void(int stage, int epoch, double loss)>;

// Trains one denoising autoencoder on clean targets with corrupted inputs.
// The encode layer is sigmoid; the decode layer is linear when
// reconstructs_spectra is set (the level in contact with the Mel log
// spectra) and sigmoid otherwise.  Corruption is re-drawn per minibatch from
// a seed derived off corruption.seed and the step index.
DaTrainResult TrainDa(const Eigen::MatrixXd &data, int hidden_width,
                      const Corruption &corruption, const TrainConfig &config,
                      bool reconstructs_spectra,
                      const StageHook &hook = nullptr);

// Greedy layer-wise pretraining over the full topology.  Level k trains on
// the clean encodings of level k-1; corruption applies only to the level
// being trained.  Stage k derives its seeds via MixSeed(seed, k), so a
// two-level topology reproduces a direct TrainDa call exactly.
SdaTrainResult PretrainSda(const Eigen::MatrixXd &data, const Topology &topology,
                           const Corruption &corruption,
                           const TrainConfig &config,
                           const StageHook &hook = nullptr);

// Unwraps the stack into a reconstruction MLP: encode layers in order, then
// decode layers in reverse.  N topology levels give 2N - 1 width levels.
DenseNet Unwrap(const Sda &sda);

// Width levels of the unwrapped MLP for a topology: widths then the reversed
// prefix, e.g. 257x125x75x50 -> 257x125x75x50x75x125x257.
std::vector<int> UnwrappedWidths(const Topology &topology);

// End-to-end training of the unwrapped MLP on clean data, input equal to
// target.
TrainResult Finetune(DenseNet mlp, const Eigen::MatrixXd &data,
                     const TrainConfig &config,
                     const StageHook &hook = nullptr);

struct SplitNets {
  DenseNet encoder;
  DenseNet decoder;
};

// Splits the MLP at the bottleneck level.  Without an explicit level the
// narrowest interior level is used; a tie throws
// Error(kAmbiguousBottleneck).  Composing the halves reproduces the MLP's
// output exactly.
SplitNets Split(const DenseNet &mlp,
                std::optional<int> bottleneck_level = std::nullopt);

}  // namespace melcode

#endif  // MELCODE_AUTOENCODER_H_
