// melcode/manifest.cc

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

#include "manifest.h"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <vector>

#include "melcode/common.h"

namespace melcode {
namespace tool {

std::string FileDigest(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot digest " + path.string());
  }
  std::uint64_t state = 0xcbf29ce484222325ULL;
  std::vector<char> buffer(1 << 16);
  while (is) {
    is.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    state = Fnv1a64(buffer.data(), static_cast<std::size_t>(is.gcount()),
                    state);
  }
  char text[32];
  std::snprintf(text, sizeof(text), "fnv1a64:%016llx",
                static_cast<unsigned long long>(state));
  return text;
}

std::string NowUtcIso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char text[32];
  std::strftime(text, sizeof(text), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return text;
}

void WriteManifest(const RunManifest &manifest,
                   const std::filesystem::path &path) {
  nlohmann::json doc;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["command"] = manifest.command;
  doc["created"] = manifest.created;
  doc["seed"] = manifest.seed;
  doc["argv"] = manifest.argv;
  doc["canonical_argv"] = manifest.canonical_argv;
  auto files = [](const std::vector<FileRecord> &records) {
    nlohmann::json list = nlohmann::json::array();
    for (const FileRecord &record : records) {
      list.push_back({{"path", record.path}, {"digest", record.digest}});
    }
    return list;
  };
  doc["inputs"] = files(manifest.inputs);
  doc["outputs"] = files(manifest.outputs);

  std::ofstream os(path, std::ios::trunc);
  if (!os) {
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  }
  os << doc.dump(2) << "\n";
  if (!os) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

RunManifest ReadManifest(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + " is not a manifest: " + e.what());
  }
  RunManifest manifest;
  try {
    if (doc.at("tool").get<std::string>() != kToolName) {
      throw Error(ErrorCode::kMalformedHeader,
                  path.string() + " was written by a different tool");
    }
    manifest.command = doc.at("command").get<std::string>();
    manifest.created = doc.value("created", std::string());
    manifest.seed = doc.value("seed", std::uint64_t{0});
    manifest.argv = doc.value("argv", std::vector<std::string>{});
    manifest.canonical_argv =
        doc.at("canonical_argv").get<std::vector<std::string>>();
    for (const char *key : {"inputs", "outputs"}) {
      auto &records =
          std::string(key) == "inputs" ? manifest.inputs : manifest.outputs;
      for (const auto &entry : doc.value(key, nlohmann::json::array())) {
        records.push_back({entry.at("path").get<std::string>(),
                           entry.at("digest").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedHeader,
                path.string() + " lacks manifest fields: " + e.what());
  }
  return manifest;
}

}  // namespace tool
}  // namespace melcode
