// melcode/eval.h

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

// Objective quality measurement: Mel cepstra via an orthonormal DCT-II, Mel
// Cepstral Distortion, and the three probes (analysis-resynthesis, noise
// robustness, code-space interpolation).

#ifndef MELCODE_EVAL_H_
#define MELCODE_EVAL_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "melcode/codec.h"
#include "melcode/common.h"
#include "melcode/frontend.h"

namespace melcode {

inline constexpr int kDefaultCepstralOrder = 25;
inline constexpr int kDefaultInterpolationPairs = 100;

// T x C cepstral coefficients for one utterance, binary64.
struct CepstraMatrix {
  Eigen::MatrixXd coeffs;
  std::string source_id;

  Eigen::Index count() const { return coeffs.rows(); }
  int order() const { return static_cast<int>(coeffs.cols()); }
};

// Orthonormal DCT-II of each frame, truncated to the first `order`
// coefficients: c_k = alpha_k * sum_d x_d cos(pi (2d + 1) k / (2D)), with
// alpha_0 = sqrt(1/D) and alpha_k = sqrt(2/D) otherwise.  Requires
// 2 <= order <= dim.
CepstraMatrix MelCepstra(const FrameMatrix &features,
                         int order = kDefaultCepstralOrder);

// Mean over frames of (10 / ln 10) * sqrt(2 * sum_{k>=1} (a_k - b_k)^2) in
// dB; coefficient 0 (overall level) is excluded.  Shapes must agree; an
// empty pair scores 0.
double Mcd(const CepstraMatrix &a, const CepstraMatrix &b);

struct UtteranceScore {
  std::string source_id;
  Eigen::Index frames = 0;
  double mcd_db = 0.0;
};

struct McdReport {
  std::vector<UtteranceScore> utterances;  // sorted by source_id
  double corpus_mean_db = 0.0;             // frame-weighted
  std::string fingerprint;                 // settings the scores depend on
};

// Encodes and decodes every utterance through the bundle and scores the
// reconstruction against the original.
McdReport AnalysisResynthesis(const ModelBundle &bundle,
                              const std::vector<FrameMatrix> &features,
                              int order = kDefaultCepstralOrder);

struct RobustnessReport {
  McdReport clean;
  McdReport noisy;
  double degradation_db = 0.0;  // noisy mean minus clean mean
};

// Scores reconstruction from corrupted features against the clean originals,
// next to the clean baseline.  Utterance u corrupts under
// MixSeed(corruption.seed, u) in source_id order.
RobustnessReport RobustnessProbe(const ModelBundle &bundle,
                                 const std::vector<FrameMatrix> &features,
                                 const Corruption &corruption,
                                 int order = kDefaultCepstralOrder);

struct InterpolationPath {
  double lambda = 0.0;
  double deviation = 0.0;  // distance from the straight line, normalized
};

struct InterpolationReport {
  std::vector<std::vector<InterpolationPath>> pairs;
  double mean_deviation = 0.0;
  double max_deviation = 0.0;
};

// Decodes straight-line mixtures of code pairs lambda in {0, 0.25, 0.5,
// 0.75, 1} and reports how far each decoded point falls from the straight
// line between the decoded endpoints, normalized by the endpoint distance.
// Descriptive only: interpolability has no principled pass bar, so the probe
// reports statistics instead of a verdict.
InterpolationReport InterpolationProbe(const ModelBundle &bundle,
                                       const std::vector<FrameMatrix> &features,
                                       int num_pairs = kDefaultInterpolationPairs,
                                       std::uint64_t seed = 1);

// Human-readable table and a machine-readable CSV
// (utterance_id,frames,mcd_db with a final corpus row).
std::string FormatMcdReport(const McdReport &report);
void WriteMcdReportCsv(const McdReport &report,
                       const std::filesystem::path &path);

std::string FormatRobustnessReport(const RobustnessReport &report);
std::string FormatInterpolationReport(const InterpolationReport &report);

}  // namespace melcode

#endif  // MELCODE_EVAL_H_
