// melcode/codec.h

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

// The trained codec: per-dimension normalization, encoder and decoder nets,
// the MLSC model file, the MLSE code file, and the training pipeline that
// produces a bundle from features.

#ifndef MELCODE_CODEC_H_
#define MELCODE_CODEC_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "melcode/autoencoder.h"
#include "melcode/common.h"
#include "melcode/frontend.h"
#include "melcode/nn.h"

namespace melcode {

// Per-dimension standardization fitted on the training corpus.  stddev is
// floored at kMinStddev so constant dimensions stay invertible.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  static constexpr double kMinStddev = 1e-8;

  int dim() const { return static_cast<int>(mean.size()); }
  void Validate() const;
};

// Provenance carried inside the model file.
struct ModelMeta {
  std::string topology;    // e.g. "257x125x75x50"
  std::string corruption;  // e.g. "mask:0.3"
  std::string corpus;      // label of the training corpus
  std::uint64_t train_seed = 0;
  std::uint64_t corruption_seed = 0;
};

// Everything needed to encode and decode: the two nets, the normalization
// they were trained under, and the frontend settings the features came from.
struct ModelBundle {
  DenseNet encoder;
  DenseNet decoder;
  NormStats norm;
  FrontendConfig frontend;
  ModelMeta meta;

  int feature_dim() const { return encoder.input_dim(); }
  int code_dim() const { return encoder.output_dim(); }

  // Encoder and decoder must mirror each other, and the normalization and
  // frontend dimensions must match the encoder input.
  void Validate() const;
};

// Population mean and standard deviation per dimension; needs at least two
// frames.
NormStats FitNorm(const FrameMatrix &data);

// (x - mean) / stddev per dimension, and its inverse.
Eigen::MatrixXd ApplyNorm(const Eigen::MatrixXd &x, const NormStats &norm);
Eigen::MatrixXd InvertNorm(const Eigen::MatrixXd &x, const NormStats &norm);

// Feature frames to bottleneck codes and back.  The binary32 boundary lives
// here: payloads come in as binary32, all math runs in binary64, results are
// rounded back on the way out.
FrameMatrix Encode(const ModelBundle &bundle, const FrameMatrix &features);
FrameMatrix Decode(const ModelBundle &bundle, const FrameMatrix &codes);

// binary64 variants used by the evaluation probes, which interpolate and
// perturb in the code domain without a storage round trip.
Eigen::MatrixXd EncodeRaw(const ModelBundle &bundle, const Eigen::MatrixXd &x);
Eigen::MatrixXd DecodeRaw(const ModelBundle &bundle, const Eigen::MatrixXd &c);

// MLSC model container (little-endian): magic "MLSC", u32 version = 1, the
// frontend block, encoder and decoder topology blocks, normalization
// vectors, meta strings and seeds, then all parameters as binary64 row-major
// (encoder first, weights then bias per layer).
void SaveModel(const ModelBundle &bundle, const std::filesystem::path &path);
ModelBundle LoadModel(const std::filesystem::path &path);

// MLSE code container; same layout as MLSF with its own magic.
void WriteCodes(const FrameMatrix &codes, const std::filesystem::path &path);
FrameMatrix ReadCodes(const std::filesystem::path &path);

struct TrainBundleResult {
  ModelBundle bundle;
  std::vector<std::vector<double>> pretrain_loss;  // one trace per level
  std::vector<double> finetune_loss;
};

// The full training pipeline on a feature corpus: fit normalization,
// pretrain the stack greedily, unwrap, fine-tune end to end, split at the
// bottleneck.  pretrain.seed and finetune.seed are used as given;
// frontend is carried into the bundle as provenance and must agree with the
// data width.
TrainBundleResult TrainBundle(const FrameMatrix &data,
                              const Topology &topology,
                              const Corruption &corruption,
                              const TrainConfig &pretrain,
                              const TrainConfig &finetune,
                              const FrontendConfig &frontend,
                              const std::string &corpus_label,
                              const StageHook &hook = nullptr);

}  // namespace melcode

#endif  // MELCODE_CODEC_H_
