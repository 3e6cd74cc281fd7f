// melcode/frontend.h

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

// Waveform to Mel log-spectral frames: WAV decoding, short-time windowed FFT
// analysis, log-magnitude flooring, mel-scale frequency warping, and the MLSF
// feature container.

#ifndef MELCODE_FRONTEND_H_
#define MELCODE_FRONTEND_H_

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "melcode/common.h"

namespace melcode {

// Row-major so the in-memory layout matches the on-disk payload byte for
// byte.
using RowMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct AudioSignal {
  std::vector<double> samples;  // amplitudes scaled to [-1, 1)
  int sample_rate = 0;          // Hz
};

// Short-time analysis settings.  The defaults produce 257-dimensional frames
// from 25 ms windows at a 5 ms hop through a 512-point FFT.
struct FrontendConfig {
  double frame_ms = 25.0;
  double hop_ms = 5.0;
  int fft_size = 512;
  int num_bins = 257;       // fft_size / 2 + 1
  double floor_db = -20.0;  // floor applied in the natural-log domain
  bool mel_warp = true;     // false keeps the linear frequency grid (debug)

  int FrameLength(int sample_rate) const;
  int HopLength(int sample_rate) const;

  // Throws Error(kInvalidArgument) unless the configuration is usable for
  // analysis at the given rate: power-of-two FFT at least as long as the
  // frame, num_bins == fft_size / 2 + 1, positive frame and hop.
  void Validate(int sample_rate) const;
};

// T x D grid of spectral frames (or of bottleneck codes); the unit every file
// format and every network pipeline moves around.  Payload is binary32 to
// match the on-disk feature format; training math promotes to binary64.
struct FrameMatrix {
  RowMatrixXf frames;
  std::string source_id;

  Eigen::Index count() const { return frames.rows(); }
  int dim() const { return static_cast<int>(frames.cols()); }
};

// Mel scale and its inverse: mel(f) = 2595 * log10(1 + f / 700).
double HzToMel(double hz);
double MelToHz(double mel);

// Precomputed mapping from a mel-uniform grid of num_bins points back to
// fractional positions on the linear-frequency bin grid.  Positions are
// strictly increasing with the endpoints pinned to bin 0 and the Nyquist bin,
// so warping never extrapolates.
class MelWarpGrid {
 public:
  MelWarpGrid(const FrontendConfig &config, int sample_rate);

  // Linear interpolation of a num_bins-point log spectrum onto the mel grid.
  Eigen::VectorXd Apply(const Eigen::VectorXd &log_spectrum) const;

  const std::vector<double> &positions() const { return positions_; }

 private:
  std::vector<double> positions_;
};

// Reads a 16-bit PCM mono RIFF/WAVE file.  Throws Error with kIoError when
// the file cannot be opened, kMalformedHeader for structural damage,
// kUnsupportedEncoding for any format other than 16-bit PCM mono, and
// kTruncated when a chunk ends early.
AudioSignal ReadWav(const std::filesystem::path &path);

// Slices the signal into Hamming-windowed frames zero-padded to fft_size.
// Frame t covers samples [t * hop, t * hop + frame_length); the tail shorter
// than one frame is dropped.  Throws Error(kEmptyInput) when the signal holds
// fewer samples than one frame.
std::vector<Eigen::VectorXd> FrameSignal(const AudioSignal &signal,
                                         const FrontendConfig &config);

// One windowed frame (length fft_size) to a num_bins-point warped log
// spectrum: FFT magnitude, natural-log with floor_db floor, mel warp.
Eigen::VectorXd MelLogSpectrum(const Eigen::VectorXd &frame,
                               const FrontendConfig &config, int sample_rate);

// Full pipeline: frames, windows, transforms, warps.  source_id labels the
// utterance in reports; by convention the input file stem.
FrameMatrix Featurize(const AudioSignal &signal, const FrontendConfig &config,
                      std::string source_id = "");

// MLSF feature container (little-endian): magic "MLSF", u32 version = 1,
// u32 dim, u64 frame count, then count * dim binary32 values row-major.
void WriteFeatures(const FrameMatrix &m, const std::filesystem::path &path);
FrameMatrix ReadFeatures(const std::filesystem::path &path);

// Shared container behind the feature ("MLSF") and code ("MLSE") files; the
// two formats differ only in magic.  The reader takes source_id from the file
// stem.
void WriteMatrixContainer(const FrameMatrix &m,
                          const std::filesystem::path &path,
                          const char magic[4]);
FrameMatrix ReadMatrixContainer(const std::filesystem::path &path,
                                const char magic[4]);

}  // namespace melcode

#endif  // MELCODE_FRONTEND_H_
