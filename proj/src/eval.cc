// melcode/eval.cc

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

#include "melcode/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

namespace melcode {

namespace {

constexpr double kMcdScale = 10.0 / M_LN10;

Eigen::MatrixXd DctMatrix(int order, int dim) {
  Eigen::MatrixXd dct(order, dim);
  const double alpha0 = std::sqrt(1.0 / dim);
  const double alpha = std::sqrt(2.0 / dim);
  for (int k = 0; k < order; ++k) {
    for (int d = 0; d < dim; ++d) {
      dct(k, d) = (k == 0 ? alpha0 : alpha) *
                  std::cos(M_PI * (2.0 * d + 1.0) * k / (2.0 * dim));
    }
  }
  return dct;
}

std::vector<const FrameMatrix *> SortedBySourceId(
    const std::vector<FrameMatrix> &features) {
  std::vector<const FrameMatrix *> sorted;
  sorted.reserve(features.size());
  for (const FrameMatrix &m : features) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const FrameMatrix *a, const FrameMatrix *b) {
              return a->source_id < b->source_id;
            });
  return sorted;
}

McdReport ScoreReconstructions(
    const std::vector<const FrameMatrix *> &originals,
    const std::vector<FrameMatrix> &reconstructions, int order,
    std::string fingerprint) {
  McdReport report;
  report.fingerprint = std::move(fingerprint);
  double weighted_sum = 0.0;
  Eigen::Index total_frames = 0;
  for (std::size_t u = 0; u < originals.size(); ++u) {
    const CepstraMatrix reference = MelCepstra(*originals[u], order);
    const CepstraMatrix test = MelCepstra(reconstructions[u], order);
    UtteranceScore score;
    score.source_id = originals[u]->source_id;
    score.frames = originals[u]->count();
    score.mcd_db = Mcd(reference, test);
    weighted_sum += score.mcd_db * static_cast<double>(score.frames);
    total_frames += score.frames;
    report.utterances.push_back(std::move(score));
  }
  report.corpus_mean_db =
      total_frames > 0 ? weighted_sum / static_cast<double>(total_frames) : 0.0;
  return report;
}

std::string Fingerprint(const ModelBundle &bundle, int order) {
  std::ostringstream out;
  out << "mcd.order=" << order << ";c0=excluded;scale=10/ln10*sqrt2"
      << ";model=" << bundle.meta.topology
      << ";corruption=" << bundle.meta.corruption
      << ";corpus=" << bundle.meta.corpus;
  return out.str();
}

}  // namespace

CepstraMatrix MelCepstra(const FrameMatrix &features, int order) {
  const int dim = features.dim();
  if (order < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "cepstral order must be at least 2, got " +
                    std::to_string(order));
  }
  if (order > dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cepstral order " + std::to_string(order) +
                    " exceeds the feature width " + std::to_string(dim));
  }
  CepstraMatrix cepstra;
  cepstra.source_id = features.source_id;
  cepstra.coeffs =
      features.frames.cast<double>() * DctMatrix(order, dim).transpose();
  return cepstra;
}

double Mcd(const CepstraMatrix &a, const CepstraMatrix &b) {
  if (a.coeffs.rows() != b.coeffs.rows() ||
      a.coeffs.cols() != b.coeffs.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cepstra shapes differ between the two sides");
  }
  const Eigen::Index frames = a.coeffs.rows();
  if (frames == 0) return 0.0;
  const Eigen::Index order = a.coeffs.cols();
  double sum = 0.0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    // Coefficient 0 carries overall level and is excluded by convention.
    const double sq = (a.coeffs.row(t).segment(1, order - 1) -
                       b.coeffs.row(t).segment(1, order - 1))
                          .squaredNorm();
    sum += kMcdScale * std::sqrt(2.0 * sq);
  }
  return sum / static_cast<double>(frames);
}

McdReport AnalysisResynthesis(const ModelBundle &bundle,
                              const std::vector<FrameMatrix> &features,
                              int order) {
  if (features.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no utterances to evaluate");
  }
  const std::vector<const FrameMatrix *> sorted = SortedBySourceId(features);
  std::vector<FrameMatrix> reconstructions;
  reconstructions.reserve(sorted.size());
  for (const FrameMatrix *m : sorted) {
    reconstructions.push_back(Decode(bundle, Encode(bundle, *m)));
  }
  return ScoreReconstructions(sorted, reconstructions, order,
                              Fingerprint(bundle, order));
}

RobustnessReport RobustnessProbe(const ModelBundle &bundle,
                                 const std::vector<FrameMatrix> &features,
                                 const Corruption &corruption, int order) {
  if (features.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no utterances to evaluate");
  }
  corruption.Validate();
  RobustnessReport report;
  report.clean = AnalysisResynthesis(bundle, features, order);

  const std::vector<const FrameMatrix *> sorted = SortedBySourceId(features);
  std::vector<FrameMatrix> reconstructions;
  reconstructions.reserve(sorted.size());
  for (std::size_t u = 0; u < sorted.size(); ++u) {
    Corruption utterance_corruption = corruption;
    utterance_corruption.seed = MixSeed(corruption.seed, u);
    FrameMatrix corrupted;
    corrupted.source_id = sorted[u]->source_id;
    corrupted.frames =
        Corrupt(sorted[u]->frames.cast<double>(), utterance_corruption)
            .cast<float>();
    reconstructions.push_back(Decode(bundle, Encode(bundle, corrupted)));
  }
  report.noisy =
      ScoreReconstructions(sorted, reconstructions, order,
                           Fingerprint(bundle, order) + ";input=" +
                               corruption.ToString());
  report.degradation_db =
      report.noisy.corpus_mean_db - report.clean.corpus_mean_db;
  return report;
}

InterpolationReport InterpolationProbe(const ModelBundle &bundle,
                                       const std::vector<FrameMatrix> &features,
                                       int num_pairs, std::uint64_t seed) {
  if (num_pairs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one pair");
  }
  if (features.size() < 2) {
    throw Error(ErrorCode::kEmptyInput,
                "interpolation needs at least two utterances");
  }
  const std::vector<const FrameMatrix *> sorted = SortedBySourceId(features);
  Eigen::Index total_frames = 0;
  for (const FrameMatrix *m : sorted) total_frames += m->count();
  if (total_frames < 2) {
    throw Error(ErrorCode::kEmptyInput,
                "interpolation needs at least two frames");
  }

  // One flat view of the corpus; pairs draw global frame indices.
  Eigen::MatrixXd all(total_frames, bundle.feature_dim());
  Eigen::Index row = 0;
  for (const FrameMatrix *m : sorted) {
    if (m->dim() != bundle.feature_dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "utterance " + m->source_id +
                      " width does not match the model");
    }
    all.middleRows(row, m->count()) = m->frames.cast<double>();
    row += m->count();
  }
  const Eigen::MatrixXd codes = EncodeRaw(bundle, all);

  static constexpr double kLambdas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  constexpr int kSteps = 5;
  std::mt19937_64 rng(seed);
  InterpolationReport report;
  report.pairs.reserve(static_cast<std::size_t>(num_pairs));
  double sum = 0.0;
  for (int p = 0; p < num_pairs; ++p) {
    const auto total = static_cast<std::uint64_t>(total_frames);
    const Eigen::Index i = static_cast<Eigen::Index>(rng() % total);
    Eigen::Index j = static_cast<Eigen::Index>(rng() % (total - 1));
    if (j >= i) ++j;  // distinct endpoints

    Eigen::MatrixXd mixtures(kSteps, codes.cols());
    for (int s = 0; s < kSteps; ++s) {
      mixtures.row(s) =
          kLambdas[s] * codes.row(i) + (1.0 - kLambdas[s]) * codes.row(j);
    }
    const Eigen::MatrixXd decoded = DecodeRaw(bundle, mixtures);
    const Eigen::RowVectorXd from = decoded.row(0);       // lambda = 0
    const Eigen::RowVectorXd to = decoded.row(kSteps - 1);  // lambda = 1
    const double span = (to - from).norm();

    std::vector<InterpolationPath> path(kSteps);
    for (int s = 0; s < kSteps; ++s) {
      const Eigen::RowVectorXd line =
          kLambdas[s] * to + (1.0 - kLambdas[s]) * from;
      path[static_cast<std::size_t>(s)].lambda = kLambdas[s];
      const double deviation =
          span > 1e-12 ? (decoded.row(s) - line).norm() / span : 0.0;
      path[static_cast<std::size_t>(s)].deviation = deviation;
      sum += deviation;
      report.max_deviation = std::max(report.max_deviation, deviation);
    }
    report.pairs.push_back(std::move(path));
  }
  report.mean_deviation = sum / static_cast<double>(num_pairs * kSteps);
  return report;
}

std::string FormatMcdReport(const McdReport &report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "utterance              frames      mcd_db\n";
  for (const UtteranceScore &score : report.utterances) {
    out << std::left << std::setw(20) << score.source_id << std::right
        << std::setw(9) << score.frames << std::setw(12) << score.mcd_db
        << "\n";
  }
  out << std::left << std::setw(20) << "corpus (frame-weighted)" << std::right
      << std::setw(18) << report.corpus_mean_db << "\n";
  out << "# " << report.fingerprint << "\n";
  return out.str();
}

void WriteMcdReportCsv(const McdReport &report,
                       const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  os << "utterance_id,frames,mcd_db\n";
  os << std::setprecision(17);
  for (const UtteranceScore &score : report.utterances) {
    os << score.source_id << "," << score.frames << "," << score.mcd_db
       << "\n";
  }
  os << "corpus," << [&] {
    Eigen::Index total = 0;
    for (const UtteranceScore &s : report.utterances) total += s.frames;
    return total;
  }() << "," << report.corpus_mean_db << "\n";
  if (!os) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

std::string FormatRobustnessReport(const RobustnessReport &report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "clean reconstruction:  " << report.clean.corpus_mean_db
      << " dB\n";
  out << "noisy reconstruction:  " << report.noisy.corpus_mean_db
      << " dB\n";
  out << "degradation:           " << report.degradation_db << " dB\n";
  out << "# " << report.noisy.fingerprint << "\n";
  return out.str();
}

std::string FormatInterpolationReport(const InterpolationReport &report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "pairs:           " << report.pairs.size() << "\n";
  out << "mean deviation:  " << report.mean_deviation << "\n";
  out << "max deviation:   " << report.max_deviation << "\n";
  // Per-lambda means show where the path bends most.
  if (!report.pairs.empty()) {
    const std::size_t steps = report.pairs.front().size();
    for (std::size_t s = 0; s < steps; ++s) {
      double sum = 0.0;
      for (const auto &path : report.pairs) sum += path[s].deviation;
      out << "lambda " << std::setprecision(2)
          << report.pairs.front()[s].lambda << ":     " << std::setprecision(6)
          << sum / static_cast<double>(report.pairs.size()) << "\n";
    }
  }
  return out.str();
}

}  // namespace melcode
