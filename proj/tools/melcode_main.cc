// melcode/melcode_main.cc

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

// The melcode command line tool: featurize, train, encode, decode, eval,
// sweep, replay.  Every command that touches files writes a run manifest;
// replay re-executes a manifest and verifies the recorded output digests.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "manifest.h"
#include "melcode/autoencoder.h"
#include "melcode/codec.h"
#include "melcode/common.h"
#include "melcode/eval.h"
#include "melcode/frontend.h"
#include "melcode/nn.h"

namespace fs = std::filesystem;

namespace melcode {
namespace tool {
namespace {

// Seed streams for the independent random consumers hanging off --seed.
constexpr std::uint64_t kFinetuneStream = 0x66696e65;    // "fine"
constexpr std::uint64_t kCorruptionStream = 0x636f7272;  // "corr"

int RunCli(const std::vector<std::string> &args);

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool verbose = false;
  int jobs = 1;
};

std::string FormatDouble(double v) {
  char text[32];
  std::snprintf(text, sizeof(text), "%.17g", v);
  return text;
}

// Stable 90/10-style corpus split: an utterance's subset depends only on its
// file stem, never on which directory or run it arrives in.
bool InHeldout(const std::string &stem, double fraction) {
  return static_cast<long long>(Fnv1a64(stem) % 10000) <
         std::llround(fraction * 10000.0);
}

std::vector<fs::path> ExpandInputs(const std::vector<std::string> &inputs,
                                   const std::string &extension) {
  std::vector<fs::path> files;
  for (const std::string &raw : inputs) {
    const fs::path path(raw);
    if (fs::is_directory(path)) {
      std::vector<fs::path> found;
      for (const auto &entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() &&
            entry.path().extension() == extension) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(path)) {
      files.push_back(path);
    } else {
      throw Error(ErrorCode::kIoError,
                  raw + " is neither a file nor a directory");
    }
  }
  if (files.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "no " + extension + " inputs found");
  }
  return files;
}

std::vector<fs::path> FilterSubset(std::vector<fs::path> files,
                                   const std::string &subset,
                                   double fraction) {
  if (subset == "all") return files;
  const bool keep_heldout = subset == "heldout";
  std::erase_if(files, [&](const fs::path &p) {
    return InHeldout(p.stem().string(), fraction) != keep_heldout;
  });
  if (files.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "subset '" + subset + "' selected no files");
  }
  return files;
}

// Runs fn over [0, n) on up to `jobs` threads; per-item failures come back as
// messages instead of crossing thread boundaries as exceptions.
std::vector<std::string> ForEachItem(std::size_t n, int jobs,
                                     const std::function<void(std::size_t)> &fn) {
  std::vector<std::string> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception &e) {
      errors[i] = e.what();
    }
  };
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
    return errors;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) guarded(i);
  };
  std::vector<std::thread> threads;
  const std::size_t count =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  threads.reserve(count);
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  return errors;
}

int ReportItemErrors(const char *command, const std::vector<fs::path> &files,
                     const std::vector<std::string> &errors) {
  int failures = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      std::cerr << "melcode " << command << ": " << files[i].string() << ": "
                << errors[i] << "\n";
    }
  }
  return failures;
}

std::vector<FrameMatrix> ReadFeatureSet(const std::vector<fs::path> &files) {
  std::vector<FrameMatrix> features;
  features.reserve(files.size());
  for (const fs::path &path : files) {
    features.push_back(ReadFeatures(path));
    if (features.back().dim() != features.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  path.string() + " has width " +
                      std::to_string(features.back().dim()) +
                      " but the corpus started at " +
                      std::to_string(features.front().dim()));
    }
  }
  return features;
}

FrameMatrix ConcatFeatures(const std::vector<FrameMatrix> &features,
                           const std::string &label) {
  Eigen::Index total = 0;
  for (const FrameMatrix &m : features) total += m.count();
  FrameMatrix corpus;
  corpus.source_id = label;
  corpus.frames.resize(total, features.front().dim());
  Eigen::Index row = 0;
  for (const FrameMatrix &m : features) {
    corpus.frames.middleRows(row, m.count()) = m.frames;
    row += m.count();
  }
  return corpus;
}

// The MLSF payload does not carry analysis settings, so a model trained from
// features reconstructs the frontend block: standard timing, sizes implied
// by the feature width.
FrontendConfig ProvenanceFrontend(int dim) {
  FrontendConfig config;
  config.num_bins = dim;
  config.fft_size = 2 * (dim - 1);
  return config;
}

long CountParams(const DenseNet &net) {
  long total = 0;
  for (const LayerParams &layer : net.layers) {
    total += static_cast<long>(layer.weights.size()) + layer.bias.size();
  }
  return total;
}

void RemoveQuietly(const fs::path &path) {
  std::error_code ec;
  fs::remove(path, ec);
}

// ---------------------------------------------------------------------------
// featurize

struct FeaturizeOptions {
  std::vector<std::string> inputs;
  std::string output_dir;
  double frame_ms = 25.0;
  double hop_ms = 5.0;
  int fft_size = 512;
  double floor_db = -20.0;
  bool no_mel_warp = false;

  FrontendConfig ToConfig() const {
    FrontendConfig config;
    config.frame_ms = frame_ms;
    config.hop_ms = hop_ms;
    config.fft_size = fft_size;
    config.num_bins = fft_size / 2 + 1;
    config.floor_db = floor_db;
    config.mel_warp = !no_mel_warp;
    return config;
  }
};

int RunFeaturize(const GlobalOptions &g, const FeaturizeOptions &o,
                 const std::vector<std::string> &argv_tail) {
  const FrontendConfig config = o.ToConfig();
  const std::vector<fs::path> files = ExpandInputs(o.inputs, ".wav");
  fs::create_directories(o.output_dir);

  std::vector<fs::path> outputs(files.size());
  const std::vector<std::string> errors =
      ForEachItem(files.size(), g.jobs, [&](std::size_t i) {
        const AudioSignal signal = ReadWav(files[i]);
        const FrameMatrix m =
            Featurize(signal, config, files[i].stem().string());
        const fs::path out =
            fs::path(o.output_dir) / (files[i].stem().string() + ".mlsf");
        WriteFeatures(m, out);
        outputs[i] = out;
      });
  const int failures = ReportItemErrors("featurize", files, errors);

  RunManifest manifest;
  manifest.command = "featurize";
  manifest.created = NowUtcIso8601();
  manifest.seed = g.seed;
  manifest.argv = argv_tail;
  manifest.canonical_argv = {"--seed",      std::to_string(g.seed),
                             "featurize",   "--output-dir",
                             o.output_dir,  "--frame-ms",
                             FormatDouble(o.frame_ms),
                             "--hop-ms",    FormatDouble(o.hop_ms),
                             "--fft-size",  std::to_string(o.fft_size),
                             "--floor-db",  FormatDouble(o.floor_db)};
  if (o.no_mel_warp) manifest.canonical_argv.push_back("--no-mel-warp");
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) continue;
    manifest.canonical_argv.push_back("--input");
    manifest.canonical_argv.push_back(files[i].string());
    manifest.inputs.push_back({files[i].string(), FileDigest(files[i])});
    manifest.outputs.push_back({outputs[i].string(), FileDigest(outputs[i])});
  }
  WriteManifest(manifest, fs::path(o.output_dir) / "featurize_manifest.json");

  std::cout << "featurized "
            << files.size() - static_cast<std::size_t>(failures) << " of "
            << files.size() << " files into " << o.output_dir << "\n";
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::vector<std::string> features;
  std::string model_path;
  std::string topology_text = "257x125x75x50";
  std::string corruption_text = "mask:0.3";
  int pretrain_batch = 20;
  int pretrain_epochs = 50;
  int finetune_batch = 100;
  int finetune_epochs = 100;
  double learning_rate = 0.01;
  std::string subset = "all";
  double heldout_fraction = 0.1;
  std::string corpus_label = "corpus";
  std::string loss_csv;
};

void WriteLossCsv(const TrainBundleResult &result, const fs::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  os << "stage,epoch,loss\n" << std::setprecision(17);
  for (std::size_t level = 0; level < result.pretrain_loss.size(); ++level) {
    const auto &trace = result.pretrain_loss[level];
    for (std::size_t epoch = 0; epoch < trace.size(); ++epoch) {
      os << "level" << level << "," << epoch << "," << trace[epoch] << "\n";
    }
  }
  for (std::size_t epoch = 0; epoch < result.finetune_loss.size(); ++epoch) {
    os << "finetune," << epoch << "," << result.finetune_loss[epoch] << "\n";
  }
  if (!os) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

StageHook VerboseHook(const GlobalOptions &g, int pretrain_levels) {
  if (!g.verbose) return nullptr;
  return [pretrain_levels](int stage, int epoch, double loss) {
    if (stage < 0 || stage >= pretrain_levels) {
      std::cerr << "finetune";
    } else {
      std::cerr << "level " << stage;
    }
    std::cerr << "  epoch " << epoch << "  loss " << loss << "\n";
  };
}

int RunTrain(const GlobalOptions &g, const TrainOptions &o,
             const std::vector<std::string> &argv_tail) {
  const Topology topology = Topology::Parse(o.topology_text);
  Corruption corruption = Corruption::Parse(o.corruption_text);
  corruption.seed = MixSeed(g.seed, kCorruptionStream);

  std::vector<fs::path> files = ExpandInputs(o.features, ".mlsf");
  files = FilterSubset(std::move(files), o.subset, o.heldout_fraction);

  const std::vector<FrameMatrix> features = ReadFeatureSet(files);
  const FrameMatrix corpus = ConcatFeatures(features, o.corpus_label);
  if (corpus.dim() != topology.widths.front()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "features have width " + std::to_string(corpus.dim()) +
                    " but the topology starts at " +
                    std::to_string(topology.widths.front()));
  }

  TrainConfig pretrain;
  pretrain.batch_size = o.pretrain_batch;
  pretrain.epochs = o.pretrain_epochs;
  pretrain.learning_rate = o.learning_rate;
  pretrain.seed = g.seed;
  TrainConfig finetune;
  finetune.batch_size = o.finetune_batch;
  finetune.epochs = o.finetune_epochs;
  finetune.learning_rate = o.learning_rate;
  finetune.seed = MixSeed(g.seed, kFinetuneStream);

  const fs::path model_path(o.model_path);
  const fs::path loss_path =
      o.loss_csv.empty() ? fs::path(o.model_path + ".loss.csv")
                         : fs::path(o.loss_csv);
  const fs::path manifest_path(o.model_path + ".manifest.json");
  if (model_path.has_parent_path()) {
    fs::create_directories(model_path.parent_path());
  }

  try {
    const TrainBundleResult result = TrainBundle(
        corpus, topology, corruption, pretrain, finetune,
        ProvenanceFrontend(corpus.dim()), o.corpus_label,
        VerboseHook(g, topology.Levels() - 1));
    SaveModel(result.bundle, model_path);
    WriteLossCsv(result, loss_path);

    RunManifest manifest;
    manifest.command = "train";
    manifest.created = NowUtcIso8601();
    manifest.seed = g.seed;
    manifest.argv = argv_tail;
    manifest.canonical_argv = {"--seed",
                               std::to_string(g.seed),
                               "train",
                               "--model",
                               o.model_path,
                               "--topology",
                               topology.ToString(),
                               "--corruption",
                               o.corruption_text,
                               "--pretrain-batch",
                               std::to_string(o.pretrain_batch),
                               "--pretrain-epochs",
                               std::to_string(o.pretrain_epochs),
                               "--finetune-batch",
                               std::to_string(o.finetune_batch),
                               "--finetune-epochs",
                               std::to_string(o.finetune_epochs),
                               "--learning-rate",
                               FormatDouble(o.learning_rate),
                               "--split",
                               "all",
                               "--corpus-label",
                               o.corpus_label,
                               "--loss-csv",
                               loss_path.string()};
    for (const fs::path &file : files) {
      manifest.canonical_argv.push_back("--features");
      manifest.canonical_argv.push_back(file.string());
      manifest.inputs.push_back({file.string(), FileDigest(file)});
    }
    manifest.outputs.push_back({model_path.string(), FileDigest(model_path)});
    manifest.outputs.push_back({loss_path.string(), FileDigest(loss_path)});
    WriteManifest(manifest, manifest_path);

    std::cout << "trained " << topology.ToString() << " on "
              << corpus.count() << " frames from " << files.size()
              << " utterances\n";
    std::cout << "final pretrain loss";
    for (const auto &trace : result.pretrain_loss) {
      std::cout << " " << trace.back();
    }
    std::cout << "\nfinal finetune loss " << result.finetune_loss.back()
              << "\n";
    std::cout << "model " << model_path.string() << "\n";
  } catch (...) {
    // Never leave a half-written model behind.
    RemoveQuietly(model_path);
    RemoveQuietly(loss_path);
    RemoveQuietly(manifest_path);
    throw;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// encode / decode

struct TranscodeOptions {
  std::string model_path;
  std::vector<std::string> inputs;
  std::string output_dir;
};

int RunTranscode(const GlobalOptions &g, const TranscodeOptions &o,
                 const std::vector<std::string> &argv_tail, bool encoding) {
  const char *command = encoding ? "encode" : "decode";
  const ModelBundle bundle = LoadModel(o.model_path);
  const std::vector<fs::path> files =
      ExpandInputs(o.inputs, encoding ? ".mlsf" : ".mlse");
  fs::create_directories(o.output_dir);

  std::vector<fs::path> outputs(files.size());
  const std::vector<std::string> errors =
      ForEachItem(files.size(), g.jobs, [&](std::size_t i) {
        const fs::path out =
            fs::path(o.output_dir) /
            (files[i].stem().string() + (encoding ? ".mlse" : ".mlsf"));
        if (encoding) {
          WriteCodes(Encode(bundle, ReadFeatures(files[i])), out);
        } else {
          WriteFeatures(Decode(bundle, ReadCodes(files[i])), out);
        }
        outputs[i] = out;
      });
  const int failures = ReportItemErrors(command, files, errors);

  RunManifest manifest;
  manifest.command = command;
  manifest.created = NowUtcIso8601();
  manifest.seed = g.seed;
  manifest.argv = argv_tail;
  manifest.canonical_argv = {"--seed", std::to_string(g.seed), command,
                             "--model", o.model_path, "--output-dir",
                             o.output_dir};
  manifest.inputs.push_back({o.model_path, FileDigest(o.model_path)});
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) continue;
    manifest.canonical_argv.push_back("--input");
    manifest.canonical_argv.push_back(files[i].string());
    manifest.inputs.push_back({files[i].string(), FileDigest(files[i])});
    manifest.outputs.push_back({outputs[i].string(), FileDigest(outputs[i])});
  }
  WriteManifest(manifest, fs::path(o.output_dir) /
                              (std::string(command) + "_manifest.json"));

  std::cout << command << "d "
            << files.size() - static_cast<std::size_t>(failures) << " of "
            << files.size() << " files into " << o.output_dir << "\n";
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string model_path;
  std::vector<std::string> features;
  std::string probe = "resynth";
  int order = kDefaultCepstralOrder;
  std::string corruption_text = "mask:0.3";
  int pairs = kDefaultInterpolationPairs;
  std::string output_dir;
  std::string subset = "all";
  double heldout_fraction = 0.1;
};

void WriteTextReport(const std::string &text, const fs::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  os << text;
}

int RunEval(const GlobalOptions &g, const EvalOptions &o,
            const std::vector<std::string> &argv_tail) {
  const ModelBundle bundle = LoadModel(o.model_path);
  std::vector<fs::path> files = ExpandInputs(o.features, ".mlsf");
  files = FilterSubset(std::move(files), o.subset, o.heldout_fraction);
  const std::vector<FrameMatrix> features = ReadFeatureSet(files);

  const bool want_reports = !o.output_dir.empty();
  if (want_reports) fs::create_directories(o.output_dir);
  std::vector<FileRecord> output_records;
  auto emit = [&](const std::string &name, const std::string &text) {
    if (!want_reports) return;
    const fs::path path = fs::path(o.output_dir) / name;
    WriteTextReport(text, path);
    output_records.push_back({path.string(), FileDigest(path)});
  };
  auto emit_csv = [&](const std::string &name, const McdReport &report) {
    if (!want_reports) return;
    const fs::path path = fs::path(o.output_dir) / name;
    WriteMcdReportCsv(report, path);
    output_records.push_back({path.string(), FileDigest(path)});
  };

  if (o.probe == "resynth") {
    const McdReport report = AnalysisResynthesis(bundle, features, o.order);
    std::cout << FormatMcdReport(report);
    emit("resynthesis_report.txt", FormatMcdReport(report));
    emit_csv("resynthesis_report.csv", report);
  } else if (o.probe == "robustness") {
    Corruption corruption = Corruption::Parse(o.corruption_text);
    corruption.seed = MixSeed(g.seed, kCorruptionStream);
    const RobustnessReport report =
        RobustnessProbe(bundle, features, corruption, o.order);
    std::cout << FormatRobustnessReport(report);
    emit("robustness_report.txt", FormatRobustnessReport(report));
    emit_csv("robustness_clean.csv", report.clean);
    emit_csv("robustness_noisy.csv", report.noisy);
  } else {  // interpolation
    const InterpolationReport report =
        InterpolationProbe(bundle, features, o.pairs, g.seed);
    std::cout << FormatInterpolationReport(report);
    emit("interpolation_report.txt", FormatInterpolationReport(report));
    if (want_reports) {
      std::ostringstream csv;
      csv << "pair,lambda,deviation\n" << std::setprecision(17);
      for (std::size_t p = 0; p < report.pairs.size(); ++p) {
        for (const InterpolationPath &step : report.pairs[p]) {
          csv << p << "," << step.lambda << "," << step.deviation << "\n";
        }
      }
      emit("interpolation_report.csv", csv.str());
    }
  }

  if (want_reports) {
    RunManifest manifest;
    manifest.command = "eval";
    manifest.created = NowUtcIso8601();
    manifest.seed = g.seed;
    manifest.argv = argv_tail;
    manifest.canonical_argv = {"--seed",
                               std::to_string(g.seed),
                               "eval",
                               "--model",
                               o.model_path,
                               "--probe",
                               o.probe,
                               "--order",
                               std::to_string(o.order),
                               "--corruption",
                               o.corruption_text,
                               "--pairs",
                               std::to_string(o.pairs),
                               "--output-dir",
                               o.output_dir,
                               "--split",
                               "all"};
    manifest.inputs.push_back({o.model_path, FileDigest(o.model_path)});
    for (const fs::path &file : files) {
      manifest.canonical_argv.push_back("--features");
      manifest.canonical_argv.push_back(file.string());
      manifest.inputs.push_back({file.string(), FileDigest(file)});
    }
    manifest.outputs = output_records;
    WriteManifest(manifest, fs::path(o.output_dir) / "eval_manifest.json");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::vector<std::string> features;
  std::string output_dir;
  std::vector<std::string> topologies;
  std::string corruption_text = "mask:0.3";
  int pretrain_batch = 20;
  int pretrain_epochs = 50;
  int finetune_batch = 100;
  int finetune_epochs = 100;
  double learning_rate = 0.01;
  int order = kDefaultCepstralOrder;
  double heldout_fraction = 0.1;
  std::string spec_path;
};

const std::vector<std::string> &DefaultSweepTopologies() {
  static const std::vector<std::string> kTopologies = {
      "257x125x75x50", "257x750x50", "257x1000x250x50", "257x175x125x75x50",
      "257x200x175x125x75x50"};
  return kTopologies;
}

void ApplySweepSpec(SweepOptions &o) {
  std::ifstream is(o.spec_path);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot open " + o.spec_path);
  }
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedHeader,
                o.spec_path + " is not a sweep spec: " + e.what());
  }
  o.topologies = doc.value("topologies", o.topologies);
  o.corruption_text = doc.value("corruption", o.corruption_text);
  o.pretrain_batch = doc.value("pretrain_batch", o.pretrain_batch);
  o.pretrain_epochs = doc.value("pretrain_epochs", o.pretrain_epochs);
  o.finetune_batch = doc.value("finetune_batch", o.finetune_batch);
  o.finetune_epochs = doc.value("finetune_epochs", o.finetune_epochs);
  o.learning_rate = doc.value("learning_rate", o.learning_rate);
  o.order = doc.value("order", o.order);
  o.heldout_fraction = doc.value("heldout_fraction", o.heldout_fraction);
}

struct SweepRow {
  std::string topology;
  int levels = 0;
  long params = 0;
  double mcd_db = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

std::string FormatSweepTable(const std::vector<SweepRow> &rows,
                             const std::string &direction_note) {
  std::ostringstream out;
  out << std::left << std::setw(26) << "topology" << std::right
      << std::setw(8) << "levels" << std::setw(12) << "params"
      << std::setw(16) << "heldout_mcd_db"
      << "  status\n";
  out << std::fixed << std::setprecision(4);
  for (const SweepRow &row : rows) {
    out << std::left << std::setw(26) << row.topology << std::right
        << std::setw(8) << row.levels << std::setw(12) << row.params;
    if (std::isnan(row.mcd_db)) {
      out << std::setw(16) << "-";
    } else {
      out << std::setw(16) << row.mcd_db;
    }
    out << "  " << row.status << "\n";
  }
  out << "# " << direction_note << "\n";
  return out.str();
}

int RunSweep(const GlobalOptions &g, SweepOptions &o,
             const std::vector<std::string> &argv_tail) {
  if (!o.spec_path.empty()) ApplySweepSpec(o);
  if (o.topologies.empty()) o.topologies = DefaultSweepTopologies();

  const std::vector<fs::path> files = ExpandInputs(o.features, ".mlsf");
  std::vector<fs::path> train_files;
  std::vector<fs::path> heldout_files;
  for (const fs::path &file : files) {
    (InHeldout(file.stem().string(), o.heldout_fraction) ? heldout_files
                                                         : train_files)
        .push_back(file);
  }
  if (train_files.empty() || heldout_files.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "the corpus split left " + std::to_string(train_files.size()) +
                    " training and " + std::to_string(heldout_files.size()) +
                    " held-out utterances; adjust --heldout-fraction");
  }
  const std::vector<FrameMatrix> train_features = ReadFeatureSet(train_files);
  const std::vector<FrameMatrix> heldout_features =
      ReadFeatureSet(heldout_files);
  if (train_features.front().dim() != heldout_features.front().dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "training and held-out widths differ");
  }
  const FrameMatrix corpus = ConcatFeatures(train_features, "sweep");

  fs::create_directories(fs::path(o.output_dir) / "models");
  Corruption corruption = Corruption::Parse(o.corruption_text);
  corruption.seed = MixSeed(g.seed, kCorruptionStream);
  TrainConfig pretrain;
  pretrain.batch_size = o.pretrain_batch;
  pretrain.epochs = o.pretrain_epochs;
  pretrain.learning_rate = o.learning_rate;
  pretrain.seed = g.seed;
  TrainConfig finetune;
  finetune.batch_size = o.finetune_batch;
  finetune.epochs = o.finetune_epochs;
  finetune.learning_rate = o.learning_rate;
  finetune.seed = MixSeed(g.seed, kFinetuneStream);

  std::vector<SweepRow> rows;
  std::vector<FileRecord> model_records;
  int failures = 0;
  for (const std::string &text : o.topologies) {
    SweepRow row;
    row.topology = text;
    try {
      const Topology topology = Topology::Parse(text);
      row.levels = topology.Levels();
      if (topology.widths.front() != corpus.dim()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "topology starts at " +
                        std::to_string(topology.widths.front()) +
                        " but features have width " +
                        std::to_string(corpus.dim()));
      }
      const TrainBundleResult result =
          TrainBundle(corpus, topology, corruption, pretrain, finetune,
                      ProvenanceFrontend(corpus.dim()), "sweep",
                      VerboseHook(g, topology.Levels() - 1));
      row.params = CountParams(result.bundle.encoder) +
                   CountParams(result.bundle.decoder);
      const fs::path model_path = fs::path(o.output_dir) / "models" /
                                  ("sweep_" + topology.ToString() + ".mlsc");
      SaveModel(result.bundle, model_path);
      model_records.push_back({model_path.string(), FileDigest(model_path)});
      row.mcd_db =
          AnalysisResynthesis(result.bundle, heldout_features, o.order)
              .corpus_mean_db;
    } catch (const std::exception &e) {
      row.status = e.what();
      ++failures;
      std::cerr << "melcode sweep: " << text << ": " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow &a, const SweepRow &b) {
    const bool a_ok = !std::isnan(a.mcd_db);
    const bool b_ok = !std::isnan(b.mcd_db);
    if (a_ok != b_ok) return a_ok;
    if (a_ok && a.mcd_db != b.mcd_db) return a.mcd_db < b.mcd_db;
    return a.topology < b.topology;
  });

  // Depth against width is recorded as an observation, never asserted: which
  // way it goes depends on the corpus.
  std::string direction_note = "depth direction: not measurable";
  {
    const SweepRow *shallow = nullptr;
    const SweepRow *deep = nullptr;
    for (const SweepRow &row : rows) {
      if (std::isnan(row.mcd_db)) continue;
      if (shallow == nullptr || row.levels < shallow->levels) shallow = &row;
      if (deep == nullptr || row.levels > deep->levels) deep = &row;
    }
    if (shallow != nullptr && deep != nullptr && shallow != deep) {
      std::ostringstream note;
      note << std::fixed << std::setprecision(4);
      note << "depth direction: " << deep->topology << " ("
           << deep->levels << " levels, " << deep->mcd_db << " dB) "
           << (deep->mcd_db <= shallow->mcd_db ? "improves on"
                                               : "falls behind")
           << " " << shallow->topology << " (" << shallow->levels
           << " levels, " << shallow->mcd_db << " dB)";
      direction_note = note.str();
    }
  }

  const std::string table = FormatSweepTable(rows, direction_note);
  std::cout << table;
  const fs::path table_path = fs::path(o.output_dir) / "sweep_report.txt";
  WriteTextReport(table, table_path);
  const fs::path csv_path = fs::path(o.output_dir) / "sweep_report.csv";
  {
    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) {
      throw Error(ErrorCode::kIoError, "cannot write " + csv_path.string());
    }
    os << "topology,levels,params,heldout_mcd_db,status\n"
       << std::setprecision(17);
    for (const SweepRow &row : rows) {
      os << row.topology << "," << row.levels << "," << row.params << ",";
      if (!std::isnan(row.mcd_db)) os << row.mcd_db;
      // Commas inside failure messages would break the row.
      std::string status = row.status;
      std::replace(status.begin(), status.end(), ',', ';');
      os << "," << status << "\n";
    }
  }

  RunManifest manifest;
  manifest.command = "sweep";
  manifest.created = NowUtcIso8601();
  manifest.seed = g.seed;
  manifest.argv = argv_tail;
  manifest.canonical_argv = {"--seed",
                             std::to_string(g.seed),
                             "sweep",
                             "--output-dir",
                             o.output_dir,
                             "--corruption",
                             o.corruption_text,
                             "--pretrain-batch",
                             std::to_string(o.pretrain_batch),
                             "--pretrain-epochs",
                             std::to_string(o.pretrain_epochs),
                             "--finetune-batch",
                             std::to_string(o.finetune_batch),
                             "--finetune-epochs",
                             std::to_string(o.finetune_epochs),
                             "--learning-rate",
                             FormatDouble(o.learning_rate),
                             "--order",
                             std::to_string(o.order),
                             "--heldout-fraction",
                             FormatDouble(o.heldout_fraction)};
  for (const std::string &text : o.topologies) {
    manifest.canonical_argv.push_back("--topology");
    manifest.canonical_argv.push_back(text);
  }
  for (const fs::path &file : files) {
    manifest.canonical_argv.push_back("--features");
    manifest.canonical_argv.push_back(file.string());
    manifest.inputs.push_back({file.string(), FileDigest(file)});
  }
  manifest.outputs = model_records;
  manifest.outputs.push_back({table_path.string(), FileDigest(table_path)});
  manifest.outputs.push_back({csv_path.string(), FileDigest(csv_path)});
  WriteManifest(manifest, fs::path(o.output_dir) / "sweep_manifest.json");

  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayOptions {
  std::string manifest_path;
  bool skip_verify = false;
};

int RunReplay(const ReplayOptions &o) {
  const RunManifest manifest = ReadManifest(o.manifest_path);
  if (!o.skip_verify) {
    for (const FileRecord &record : manifest.inputs) {
      if (!fs::exists(record.path)) {
        std::cerr << "melcode replay: input " << record.path
                  << " no longer exists\n";
        return 1;
      }
      const std::string digest = FileDigest(record.path);
      if (digest != record.digest) {
        std::cerr << "melcode replay: input " << record.path
                  << " changed since the recorded run (" << digest
                  << " != " << record.digest << ")\n";
        return 1;
      }
    }
  }

  // The canonical argument list is fully resolved; a default config file
  // must not leak into the re-run.
  unsetenv("MELCODE_DEFAULT_CONFIG");
  const int rc = RunCli(manifest.canonical_argv);
  if (rc != 0) return rc;

  int mismatches = 0;
  for (const FileRecord &record : manifest.outputs) {
    const std::string digest =
        fs::exists(record.path) ? FileDigest(record.path) : "missing";
    if (digest != record.digest) {
      ++mismatches;
      std::cerr << "melcode replay: output " << record.path
                << " does not match the recorded digest (" << digest
                << " != " << record.digest << ")\n";
    }
  }
  if (mismatches > 0) return 1;
  std::cout << "replay: reproduced " << manifest.outputs.size()
            << " outputs byte for byte\n";
  return 0;
}

// ---------------------------------------------------------------------------

int RunCli(const std::vector<std::string> &args) {
  CLI::App app{"learned Mel log-spectrum codec"};
  app.name("melcode");
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with default option values")
      ->envname("MELCODE_DEFAULT_CONFIG");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base seed for every random draw")
      ->capture_default_str();
  app.add_flag("-v,--verbose", g.verbose, "Print progress while running");
  app.add_option("-j,--jobs", g.jobs, "Worker threads for per-file commands")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  const auto subset_check = CLI::IsMember({"all", "train", "heldout"});
  const auto fraction_check = CLI::Range(0.0, 1.0);

  FeaturizeOptions fo;
  CLI::App *featurize =
      app.add_subcommand("featurize", "Turn WAV files into feature files");
  featurize->fallthrough();
  featurize->add_option("-i,--input", fo.inputs, "WAV files or directories")
      ->required();
  featurize->add_option("-o,--output-dir", fo.output_dir,
                        "Directory for .mlsf files")
      ->required();
  featurize->add_option("--frame-ms", fo.frame_ms, "Analysis window in ms")
      ->capture_default_str();
  featurize->add_option("--hop-ms", fo.hop_ms, "Hop between frames in ms")
      ->capture_default_str();
  featurize->add_option("--fft-size", fo.fft_size, "FFT length (power of two)")
      ->capture_default_str();
  featurize->add_option("--floor-db", fo.floor_db,
                        "Log-magnitude floor (natural log domain)")
      ->capture_default_str();
  featurize->add_flag("--no-mel-warp", fo.no_mel_warp,
                      "Keep the linear frequency grid (debug)");

  TrainOptions to;
  CLI::App *train = app.add_subcommand("train", "Train a codec on features");
  train->fallthrough();
  train->add_option("-f,--features", to.features,
                    "Feature files or directories")
      ->required();
  train->add_option("-m,--model", to.model_path, "Output model path")
      ->required();
  train->add_option("-t,--topology", to.topology_text,
                    "Encoder widths, e.g. 257x125x75x50")
      ->capture_default_str();
  train->add_option("-c,--corruption", to.corruption_text,
                    "mask:<p> or gauss:<sigma>")
      ->capture_default_str();
  train->add_option("--pretrain-batch,--pre-batch", to.pretrain_batch,
                    "Pretraining minibatch size")
      ->capture_default_str();
  train->add_option("--pretrain-epochs,--pre-epochs", to.pretrain_epochs,
                    "Pretraining epochs per level")
      ->capture_default_str();
  train->add_option("--finetune-batch,--ft-batch", to.finetune_batch,
                    "Fine-tuning minibatch size")
      ->capture_default_str();
  train->add_option("--finetune-epochs,--ft-epochs", to.finetune_epochs,
                    "Fine-tuning epochs")
      ->capture_default_str();
  train->add_option("--learning-rate,--lr", to.learning_rate,
                    "SGD learning rate for both phases")
      ->capture_default_str();
  train->add_option("--split", to.subset, "Corpus subset to train on")
      ->check(subset_check)
      ->capture_default_str();
  train->add_option("--heldout-fraction", to.heldout_fraction,
                    "Fraction of utterances held out by the stable split")
      ->check(fraction_check)
      ->capture_default_str();
  train->add_option("--corpus-label", to.corpus_label,
                    "Label stored in the model")
      ->capture_default_str();
  train->add_option("--loss-csv", to.loss_csv,
                    "Loss trace path (default <model>.loss.csv)");

  TranscodeOptions eo;
  CLI::App *encode =
      app.add_subcommand("encode", "Encode features into bottleneck codes");
  encode->fallthrough();
  encode->add_option("-m,--model", eo.model_path, "Model path")->required();
  encode->add_option("-i,--input", eo.inputs,
                     "Feature files or directories")
      ->required();
  encode->add_option("-o,--output-dir", eo.output_dir,
                     "Directory for .mlse files")
      ->required();

  TranscodeOptions dopt;
  CLI::App *decode =
      app.add_subcommand("decode", "Decode bottleneck codes into features");
  decode->fallthrough();
  decode->add_option("-m,--model", dopt.model_path, "Model path")->required();
  decode->add_option("-i,--input", dopt.inputs,
                     "Code files or directories")
      ->required();
  decode->add_option("-o,--output-dir", dopt.output_dir,
                     "Directory for decoded .mlsf files")
      ->required();

  EvalOptions vo;
  CLI::App *eval = app.add_subcommand("eval", "Score a codec on features");
  eval->fallthrough();
  eval->add_option("-m,--model", vo.model_path, "Model path")->required();
  eval->add_option("-f,--features", vo.features,
                   "Feature files or directories")
      ->required();
  eval->add_option("-p,--probe", vo.probe,
                   "resynth, robustness, or interpolation")
      ->check(CLI::IsMember({"resynth", "robustness", "interpolation"}))
      ->capture_default_str();
  eval->add_option("--order", vo.order, "Cepstral order for MCD")
      ->capture_default_str();
  eval->add_option("-c,--corruption", vo.corruption_text,
                   "Corruption for the robustness probe")
      ->capture_default_str();
  eval->add_option("--pairs", vo.pairs,
                   "Code pairs for the interpolation probe")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval->add_option("-o,--output-dir", vo.output_dir,
                   "Directory for report files (stdout only when omitted)");
  eval->add_option("--split", vo.subset, "Corpus subset to score")
      ->check(subset_check)
      ->capture_default_str();
  eval->add_option("--heldout-fraction", vo.heldout_fraction, "")
      ->check(fraction_check)
      ->capture_default_str();

  SweepOptions so;
  CLI::App *sweep = app.add_subcommand(
      "sweep", "Train several topologies and rank them on held-out MCD");
  sweep->fallthrough();
  sweep->add_option("-f,--features", so.features,
                    "Feature files or directories")
      ->required();
  sweep->add_option("-o,--output-dir", so.output_dir,
                    "Directory for models and reports")
      ->required();
  sweep->add_option("-t,--topology", so.topologies,
                    "Topologies to try (repeatable; default is the standard "
                    "five)");
  sweep->add_option("-c,--corruption", so.corruption_text, "")
      ->capture_default_str();
  sweep->add_option("--pretrain-batch", so.pretrain_batch, "")
      ->capture_default_str();
  sweep->add_option("--pretrain-epochs", so.pretrain_epochs, "")
      ->capture_default_str();
  sweep->add_option("--finetune-batch", so.finetune_batch, "")
      ->capture_default_str();
  sweep->add_option("--finetune-epochs", so.finetune_epochs, "")
      ->capture_default_str();
  sweep->add_option("--learning-rate", so.learning_rate, "")
      ->capture_default_str();
  sweep->add_option("--order", so.order, "")->capture_default_str();
  sweep->add_option("--heldout-fraction", so.heldout_fraction, "")
      ->check(fraction_check)
      ->capture_default_str();
  sweep->add_option("--spec", so.spec_path,
                    "JSON sweep description; overrides the flags it sets");

  ReplayOptions ro;
  CLI::App *replay = app.add_subcommand(
      "replay", "Re-run a recorded manifest and verify its outputs");
  replay->fallthrough();
  replay->add_option("manifest", ro.manifest_path, "Run manifest path")
      ->required();
  replay->add_flag("--skip-verify", ro.skip_verify,
                   "Do not check input digests before the re-run");

  std::vector<const char *> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("melcode");
  for (const std::string &arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (featurize->parsed()) return RunFeaturize(g, fo, args);
    if (train->parsed()) return RunTrain(g, to, args);
    if (encode->parsed()) return RunTranscode(g, eo, args, true);
    if (decode->parsed()) return RunTranscode(g, dopt, args, false);
    if (eval->parsed()) return RunEval(g, vo, args);
    if (sweep->parsed()) return RunSweep(g, so, args);
    if (replay->parsed()) return RunReplay(ro);
  } catch (const Error &e) {
    std::cerr << "melcode: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "melcode: unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace tool
}  // namespace melcode

int main(int argc, char **argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return melcode::tool::RunCli(args);
}
