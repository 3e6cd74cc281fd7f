// melcode/codec.cc

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

#include "melcode/codec.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <utility>

#include "io_util.h"

namespace melcode {

void NormStats::Validate() const {
  if (mean.size() == 0 || mean.size() != stddev.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "normalization mean and stddev widths differ");
  }
  if (!mean.allFinite() || !stddev.allFinite()) {
    throw Error(ErrorCode::kNonFinite,
                "normalization statistics hold a non-finite value");
  }
  if ((stddev.array() < kMinStddev).any()) {
    throw Error(ErrorCode::kInvalidArgument,
                "normalization stddev below the floor");
  }
}

void ModelBundle::Validate() const {
  encoder.Validate();
  decoder.Validate();
  norm.Validate();
  if (encoder.output_dim() != decoder.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "encoder emits " + std::to_string(encoder.output_dim()) +
                    " codes but the decoder expects " +
                    std::to_string(decoder.input_dim()));
  }
  if (encoder.input_dim() != decoder.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "encoder input and decoder output widths differ");
  }
  if (norm.dim() != encoder.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "normalization width does not match the encoder input");
  }
  if (frontend.num_bins != encoder.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frontend bins do not match the encoder input");
  }
}

NormStats FitNorm(const FrameMatrix &data) {
  if (data.count() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "normalization needs at least two frames, got " +
                    std::to_string(data.count()));
  }
  const Eigen::MatrixXd x = data.frames.cast<double>();
  NormStats norm;
  norm.mean = x.colwise().mean();
  const Eigen::ArrayXd variance =
      (x.rowwise() - norm.mean.transpose()).array().square().colwise().sum() /
      static_cast<double>(x.rows());
  norm.stddev =
      variance.sqrt().max(NormStats::kMinStddev).matrix();
  return norm;
}

namespace {

void CheckNormDim(const Eigen::MatrixXd &x, const NormStats &norm) {
  if (x.cols() != norm.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "data of width " + std::to_string(x.cols()) +
                    " for normalization of width " +
                    std::to_string(norm.dim()));
  }
}

}  // namespace

Eigen::MatrixXd ApplyNorm(const Eigen::MatrixXd &x, const NormStats &norm) {
  CheckNormDim(x, norm);
  return ((x.rowwise() - norm.mean.transpose()).array().rowwise() /
          norm.stddev.transpose().array())
      .matrix();
}

Eigen::MatrixXd InvertNorm(const Eigen::MatrixXd &x, const NormStats &norm) {
  CheckNormDim(x, norm);
  return ((x.array().rowwise() * norm.stddev.transpose().array()).matrix()
              .rowwise() +
          norm.mean.transpose());
}

Eigen::MatrixXd EncodeRaw(const ModelBundle &bundle, const Eigen::MatrixXd &x) {
  return Forward(bundle.encoder, ApplyNorm(x, bundle.norm));
}

Eigen::MatrixXd DecodeRaw(const ModelBundle &bundle, const Eigen::MatrixXd &c) {
  return InvertNorm(Forward(bundle.decoder, c), bundle.norm);
}

FrameMatrix Encode(const ModelBundle &bundle, const FrameMatrix &features) {
  if (features.dim() != bundle.feature_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features of width " + std::to_string(features.dim()) +
                    " for a model expecting " +
                    std::to_string(bundle.feature_dim()));
  }
  FrameMatrix codes;
  codes.source_id = features.source_id;
  codes.frames =
      EncodeRaw(bundle, features.frames.cast<double>()).cast<float>();
  return codes;
}

FrameMatrix Decode(const ModelBundle &bundle, const FrameMatrix &codes) {
  if (codes.dim() != bundle.code_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "codes of width " + std::to_string(codes.dim()) +
                    " for a model emitting " +
                    std::to_string(bundle.code_dim()));
  }
  FrameMatrix features;
  features.source_id = codes.source_id;
  features.frames =
      DecodeRaw(bundle, codes.frames.cast<double>()).cast<float>();
  return features;
}

namespace {

void PutNet(std::ostream &os, const DenseNet &net) {
  ioutil::PutU32(os, static_cast<std::uint32_t>(net.layers.size()));
  for (const LayerParams &layer : net.layers) {
    ioutil::PutU32(os, static_cast<std::uint32_t>(layer.input_dim()));
    ioutil::PutU32(os, static_cast<std::uint32_t>(layer.output_dim()));
    ioutil::PutU8(os, static_cast<std::uint8_t>(layer.activation));
  }
}

DenseNet GetNetShape(std::istream &is, const char *what) {
  const std::uint32_t layer_count = ioutil::GetU32(is, what);
  if (layer_count == 0 || layer_count > 1024) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("implausible layer count in ") + what);
  }
  DenseNet net;
  net.layers.resize(layer_count);
  for (LayerParams &layer : net.layers) {
    const std::uint32_t in = ioutil::GetU32(is, what);
    const std::uint32_t out = ioutil::GetU32(is, what);
    const std::uint8_t activation = ioutil::GetU8(is, what);
    if (in == 0 || out == 0 || in > (1u << 20) || out > (1u << 20)) {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string("implausible layer shape in ") + what);
    }
    if (activation > 1) {
      throw Error(ErrorCode::kMalformedHeader,
                  std::string("unknown activation tag in ") + what);
    }
    layer.weights.resize(out, in);
    layer.bias.resize(out);
    layer.activation = static_cast<Activation>(activation);
  }
  return net;
}

// Weight matrices cross the file boundary row-major regardless of Eigen's
// in-memory order.
void PutNetParams(std::ostream &os, const DenseNet &net) {
  for (const LayerParams &layer : net.layers) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        ioutil::PutF64(os, layer.weights(r, c));
      }
    }
    ioutil::PutF64Array(os, layer.bias.data(),
                        static_cast<std::size_t>(layer.bias.size()));
  }
}

void GetNetParams(std::istream &is, DenseNet &net, const char *what) {
  for (LayerParams &layer : net.layers) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = ioutil::GetF64(is, what);
      }
    }
    ioutil::GetF64Array(is, layer.bias.data(),
                        static_cast<std::size_t>(layer.bias.size()), what);
  }
}

void PutVector(std::ostream &os, const Eigen::VectorXd &v) {
  ioutil::PutU32(os, static_cast<std::uint32_t>(v.size()));
  ioutil::PutF64Array(os, v.data(), static_cast<std::size_t>(v.size()));
}

Eigen::VectorXd GetVector(std::istream &is, const char *what) {
  const std::uint32_t size = ioutil::GetU32(is, what);
  if (size == 0 || size > (1u << 20)) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("implausible vector size in ") + what);
  }
  Eigen::VectorXd v(size);
  ioutil::GetF64Array(is, v.data(), size, what);
  return v;
}

}  // namespace

void SaveModel(const ModelBundle &bundle, const std::filesystem::path &path) {
  bundle.Validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  ioutil::PutBytes(os, "MLSC", 4);
  ioutil::PutU32(os, 1);  // version

  ioutil::PutF64(os, bundle.frontend.frame_ms);
  ioutil::PutF64(os, bundle.frontend.hop_ms);
  ioutil::PutU32(os, static_cast<std::uint32_t>(bundle.frontend.fft_size));
  ioutil::PutU32(os, static_cast<std::uint32_t>(bundle.frontend.num_bins));
  ioutil::PutF64(os, bundle.frontend.floor_db);
  ioutil::PutU8(os, bundle.frontend.mel_warp ? 1 : 0);

  PutNet(os, bundle.encoder);
  PutNet(os, bundle.decoder);
  PutVector(os, bundle.norm.mean);
  PutVector(os, bundle.norm.stddev);

  ioutil::PutString(os, bundle.meta.topology);
  ioutil::PutString(os, bundle.meta.corruption);
  ioutil::PutString(os, bundle.meta.corpus);
  ioutil::PutU64(os, bundle.meta.train_seed);
  ioutil::PutU64(os, bundle.meta.corruption_seed);

  PutNetParams(os, bundle.encoder);
  PutNetParams(os, bundle.decoder);
  if (!os) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

ModelBundle LoadModel(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  char magic[4];
  ioutil::GetBytes(is, magic, 4, "model magic");
  if (std::memcmp(magic, "MLSC", 4) != 0) {
    throw Error(ErrorCode::kBadMagic,
                path.string() + " is not a model file");
  }
  const std::uint32_t version = ioutil::GetU32(is, "model version");
  if (version != 1) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported model version " + std::to_string(version));
  }

  ModelBundle bundle;
  bundle.frontend.frame_ms = ioutil::GetF64(is, "frontend frame_ms");
  bundle.frontend.hop_ms = ioutil::GetF64(is, "frontend hop_ms");
  bundle.frontend.fft_size =
      static_cast<int>(ioutil::GetU32(is, "frontend fft_size"));
  bundle.frontend.num_bins =
      static_cast<int>(ioutil::GetU32(is, "frontend num_bins"));
  bundle.frontend.floor_db = ioutil::GetF64(is, "frontend floor_db");
  bundle.frontend.mel_warp = ioutil::GetU8(is, "frontend mel_warp") != 0;

  bundle.encoder = GetNetShape(is, "encoder topology");
  bundle.decoder = GetNetShape(is, "decoder topology");
  bundle.norm.mean = GetVector(is, "normalization mean");
  bundle.norm.stddev = GetVector(is, "normalization stddev");

  bundle.meta.topology = ioutil::GetString(is, "meta topology");
  bundle.meta.corruption = ioutil::GetString(is, "meta corruption");
  bundle.meta.corpus = ioutil::GetString(is, "meta corpus");
  bundle.meta.train_seed = ioutil::GetU64(is, "meta train seed");
  bundle.meta.corruption_seed = ioutil::GetU64(is, "meta corruption seed");

  GetNetParams(is, bundle.encoder, "encoder parameters");
  GetNetParams(is, bundle.decoder, "decoder parameters");
  ioutil::ExpectEof(is, "model parameters");
  bundle.Validate();
  return bundle;
}

void WriteCodes(const FrameMatrix &codes, const std::filesystem::path &path) {
  WriteMatrixContainer(codes, path, "MLSE");
}

FrameMatrix ReadCodes(const std::filesystem::path &path) {
  return ReadMatrixContainer(path, "MLSE");
}

TrainBundleResult TrainBundle(const FrameMatrix &data,
                              const Topology &topology,
                              const Corruption &corruption,
                              const TrainConfig &pretrain,
                              const TrainConfig &finetune,
                              const FrontendConfig &frontend,
                              const std::string &corpus_label,
                              const StageHook &hook) {
  topology.Validate();
  if (data.dim() != topology.widths.front()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features of width " + std::to_string(data.dim()) +
                    " for topology " + topology.ToString());
  }
  if (frontend.num_bins != data.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frontend bins do not match the feature width");
  }

  TrainBundleResult result;
  result.bundle.norm = FitNorm(data);
  const Eigen::MatrixXd normalized =
      ApplyNorm(data.frames.cast<double>(), result.bundle.norm);

  SdaTrainResult pretrained =
      PretrainSda(normalized, topology, corruption, pretrain, hook);
  result.pretrain_loss = std::move(pretrained.stage_loss);

  DenseNet mlp = Unwrap(pretrained.sda);
  const StageHook finetune_hook =
      hook ? StageHook([&hook, &topology](int, int epoch, double loss) {
          hook(topology.Levels() - 1, epoch, loss);
        })
           : StageHook();
  TrainResult tuned =
      Finetune(std::move(mlp), normalized, finetune, finetune_hook);
  result.finetune_loss = std::move(tuned.epoch_loss);

  // The bottleneck of the unwrapped net sits at the last topology level.
  SplitNets nets = Split(tuned.net, topology.Levels() - 1);
  result.bundle.encoder = std::move(nets.encoder);
  result.bundle.decoder = std::move(nets.decoder);
  result.bundle.frontend = frontend;
  result.bundle.meta.topology = topology.ToString();
  result.bundle.meta.corruption = corruption.ToString();
  result.bundle.meta.corpus = corpus_label;
  result.bundle.meta.train_seed = pretrain.seed;
  result.bundle.meta.corruption_seed = corruption.seed;
  result.bundle.Validate();
  return result;
}

}  // namespace melcode
