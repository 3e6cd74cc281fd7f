// melcode/frontend.cc

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

#include "melcode/frontend.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <utility>

#include "io_util.h"

namespace melcode {

int FrontendConfig::FrameLength(int sample_rate) const {
  return static_cast<int>(std::lround(frame_ms * sample_rate / 1000.0));
}

int FrontendConfig::HopLength(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

void FrontendConfig::Validate(int sample_rate) const {
  if (sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "fft_size must be a power of two, got " +
                    std::to_string(fft_size));
  }
  if (num_bins != fft_size / 2 + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "num_bins must equal fft_size / 2 + 1; got " +
                    std::to_string(num_bins) + " for fft_size " +
                    std::to_string(fft_size));
  }
  if (!std::isfinite(frame_ms) || !std::isfinite(hop_ms) ||
      !std::isfinite(floor_db)) {
    throw Error(ErrorCode::kInvalidArgument,
                "frontend configuration holds a non-finite value");
  }
  const int frame_length = FrameLength(sample_rate);
  const int hop_length = HopLength(sample_rate);
  if (frame_length < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame shorter than two samples at this rate");
  }
  if (hop_length < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "hop shorter than one sample at this rate");
  }
  if (frame_length > fft_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame of " + std::to_string(frame_length) +
                    " samples exceeds fft_size " + std::to_string(fft_size));
  }
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelWarpGrid::MelWarpGrid(const FrontendConfig &config, int sample_rate) {
  const int n = config.num_bins;
  positions_.resize(n);
  if (!config.mel_warp) {
    for (int i = 0; i < n; ++i) positions_[i] = static_cast<double>(i);
    return;
  }
  const double nyquist = sample_rate / 2.0;
  const double mel_max = HzToMel(nyquist);
  for (int i = 0; i < n; ++i) {
    const double mel = mel_max * static_cast<double>(i) / (n - 1);
    positions_[i] = MelToHz(mel) / nyquist * (n - 1);
  }
  // Pin the endpoints: log10/pow round trips are not exact, and the
  // interpolation below must never index past the last bin.
  positions_.front() = 0.0;
  positions_.back() = static_cast<double>(n - 1);
}

Eigen::VectorXd MelWarpGrid::Apply(const Eigen::VectorXd &log_spectrum) const {
  const int n = static_cast<int>(positions_.size());
  if (log_spectrum.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "spectrum has " + std::to_string(log_spectrum.size()) +
                    " bins, grid expects " + std::to_string(n));
  }
  Eigen::VectorXd warped(n);
  for (int i = 0; i < n; ++i) {
    const double pos = positions_[i];
    int k = static_cast<int>(pos);
    if (k > n - 2) k = n - 2;
    const double frac = pos - k;
    warped[i] = (1.0 - frac) * log_spectrum[k] + frac * log_spectrum[k + 1];
  }
  return warped;
}

namespace {

struct WavFormat {
  std::uint16_t codec = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  bool seen = false;
};

void SkipChunkBytes(std::istream &is, std::uint32_t n, const char *what) {
  is.seekg(n, std::ios::cur);
  is.peek();
  if (is.fail() && !is.eof()) {
    throw Error(ErrorCode::kTruncated, std::string("short chunk in ") + what);
  }
}

}  // namespace

AudioSignal ReadWav(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  char riff[4], wave[4];
  ioutil::GetBytes(is, riff, 4, "RIFF header");
  ioutil::GetU32(is, "RIFF size");
  ioutil::GetBytes(is, wave, 4, "WAVE tag");
  if (std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + " is not a RIFF/WAVE file");
  }

  WavFormat fmt;
  std::vector<char> data;
  bool seen_data = false;
  while (true) {
    char id[4];
    is.read(id, 4);
    if (is.gcount() == 0 && is.eof()) break;
    if (is.gcount() != 4) {
      throw Error(ErrorCode::kTruncated, "short chunk header in WAV");
    }
    const std::uint32_t size = ioutil::GetU32(is, "chunk size");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) {
        throw Error(ErrorCode::kMalformedHeader, "fmt chunk shorter than 16 bytes");
      }
      fmt.codec = ioutil::GetU16(is, "fmt codec");
      fmt.channels = ioutil::GetU16(is, "fmt channels");
      fmt.sample_rate = ioutil::GetU32(is, "fmt rate");
      ioutil::GetU32(is, "fmt byte rate");
      ioutil::GetU16(is, "fmt block align");
      fmt.bits_per_sample = ioutil::GetU16(is, "fmt bits");
      fmt.seen = true;
      if (size > 16) SkipChunkBytes(is, size - 16, "fmt");
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(size);
      if (size > 0) ioutil::GetBytes(is, data.data(), size, "data chunk");
      seen_data = true;
      if (size % 2 == 1) SkipChunkBytes(is, 1, "data padding");
    } else {
      // Unknown chunk; RIFF pads odd sizes to even boundaries.
      SkipChunkBytes(is, size + (size % 2), "chunk");
    }
  }

  if (!fmt.seen || !seen_data) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + " lacks a fmt or data chunk");
  }
  if (fmt.codec != 1) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                "only PCM (codec 1) is supported, got codec " +
                    std::to_string(fmt.codec));
  }
  if (fmt.channels != 1) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                "only mono is supported, got " +
                    std::to_string(fmt.channels) + " channels");
  }
  if (fmt.bits_per_sample != 16) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                "only 16-bit samples are supported, got " +
                    std::to_string(fmt.bits_per_sample) + " bits");
  }
  if (fmt.sample_rate == 0) {
    throw Error(ErrorCode::kMalformedHeader, "sample rate of zero");
  }
  if (data.size() % 2 != 0) {
    throw Error(ErrorCode::kMalformedHeader,
                "data chunk holds a partial 16-bit sample");
  }

  AudioSignal signal;
  signal.sample_rate = static_cast<int>(fmt.sample_rate);
  signal.samples.resize(data.size() / 2);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    std::int16_t raw;
    std::memcpy(&raw, data.data() + 2 * i, 2);
    signal.samples[i] = static_cast<double>(raw) / 32768.0;
  }
  return signal;
}

std::vector<Eigen::VectorXd> FrameSignal(const AudioSignal &signal,
                                         const FrontendConfig &config) {
  config.Validate(signal.sample_rate);
  const int frame_length = config.FrameLength(signal.sample_rate);
  const int hop_length = config.HopLength(signal.sample_rate);
  const auto total = static_cast<long>(signal.samples.size());
  if (total < frame_length) {
    throw Error(ErrorCode::kEmptyInput,
                "signal of " + std::to_string(total) +
                    " samples is shorter than one frame of " +
                    std::to_string(frame_length));
  }
  const long count = (total - frame_length) / hop_length + 1;

  Eigen::VectorXd window(frame_length);
  for (int n = 0; n < frame_length; ++n) {
    window[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (frame_length - 1));
  }

  std::vector<Eigen::VectorXd> frames;
  frames.reserve(count);
  for (long t = 0; t < count; ++t) {
    Eigen::VectorXd frame = Eigen::VectorXd::Zero(config.fft_size);
    const long start = t * hop_length;
    for (int n = 0; n < frame_length; ++n) {
      frame[n] = signal.samples[start + n] * window[n];
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

namespace {

Eigen::VectorXd LogMagnitudeSpectrum(Eigen::FFT<double> &fft,
                                     const Eigen::VectorXd &frame,
                                     const FrontendConfig &config) {
  if (frame.size() != config.fft_size) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frame of " + std::to_string(frame.size()) +
                    " samples, expected fft_size " +
                    std::to_string(config.fft_size));
  }
  if (!frame.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "frame holds a non-finite sample");
  }
  std::vector<double> time(frame.data(), frame.data() + frame.size());
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, time);
  const double floor_magnitude = std::exp(config.floor_db);
  Eigen::VectorXd log_spectrum(config.num_bins);
  for (int k = 0; k < config.num_bins; ++k) {
    const double magnitude = std::abs(spectrum[static_cast<std::size_t>(k)]);
    log_spectrum[k] =
        magnitude <= floor_magnitude ? config.floor_db : std::log(magnitude);
  }
  return log_spectrum;
}

}  // namespace

Eigen::VectorXd MelLogSpectrum(const Eigen::VectorXd &frame,
                               const FrontendConfig &config, int sample_rate) {
  config.Validate(sample_rate);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  const Eigen::VectorXd log_spectrum = LogMagnitudeSpectrum(fft, frame, config);
  if (!config.mel_warp) return log_spectrum;
  return MelWarpGrid(config, sample_rate).Apply(log_spectrum);
}

FrameMatrix Featurize(const AudioSignal &signal, const FrontendConfig &config,
                      std::string source_id) {
  const std::vector<Eigen::VectorXd> frames = FrameSignal(signal, config);
  const MelWarpGrid grid(config, signal.sample_rate);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  FrameMatrix m;
  m.source_id = std::move(source_id);
  m.frames.resize(static_cast<Eigen::Index>(frames.size()), config.num_bins);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Eigen::VectorXd warped =
        grid.Apply(LogMagnitudeSpectrum(fft, frames[t], config));
    m.frames.row(static_cast<Eigen::Index>(t)) = warped.cast<float>();
  }
  return m;
}

void WriteMatrixContainer(const FrameMatrix &m,
                          const std::filesystem::path &path,
                          const char magic[4]) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  ioutil::PutBytes(os, magic, 4);
  ioutil::PutU32(os, 1);  // version
  ioutil::PutU32(os, static_cast<std::uint32_t>(m.frames.cols()));
  ioutil::PutU64(os, static_cast<std::uint64_t>(m.frames.rows()));
  ioutil::PutF32Array(os, m.frames.data(),
                      static_cast<std::size_t>(m.frames.size()));
  if (!os) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

FrameMatrix ReadMatrixContainer(const std::filesystem::path &path,
                                const char magic[4]) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  char seen[4];
  ioutil::GetBytes(is, seen, 4, "container magic");
  if (std::memcmp(seen, magic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic,
                path.string() + " does not start with " +
                    std::string(magic, 4));
  }
  const std::uint32_t version = ioutil::GetU32(is, "container version");
  if (version != 1) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported container version " + std::to_string(version));
  }
  const std::uint32_t dim = ioutil::GetU32(is, "container dim");
  const std::uint64_t count = ioutil::GetU64(is, "container count");
  if (dim == 0 || dim > (1u << 20)) {
    throw Error(ErrorCode::kMalformedHeader,
                "implausible dimension " + std::to_string(dim));
  }
  FrameMatrix m;
  m.source_id = path.stem().string();
  m.frames.resize(static_cast<Eigen::Index>(count),
                  static_cast<Eigen::Index>(dim));
  ioutil::GetF32Array(is, m.frames.data(),
                      static_cast<std::size_t>(count) * dim,
                      "container payload");
  ioutil::ExpectEof(is, "container payload");
  return m;
}

void WriteFeatures(const FrameMatrix &m, const std::filesystem::path &path) {
  WriteMatrixContainer(m, path, "MLSF");
}

FrameMatrix ReadFeatures(const std::filesystem::path &path) {
  return ReadMatrixContainer(path, "MLSF");
}

}  // namespace melcode
