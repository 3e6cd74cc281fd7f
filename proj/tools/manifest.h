// melcode/manifest.h

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

// Run manifests: every command that touches files records what it read, what
// it wrote, and the fully resolved argument list that reproduces it.

#ifndef MELCODE_TOOLS_MANIFEST_H_
#define MELCODE_TOOLS_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace melcode {
namespace tool {

inline constexpr const char *kToolName = "melcode";
inline constexpr const char *kToolVersion = "1.0.0";

struct FileRecord {
  std::string path;
  std::string digest;  // "fnv1a64:<16 hex digits>"
};

struct RunManifest {
  std::string command;
  std::string created;  // ISO 8601 UTC
  std::uint64_t seed = 0;
  std::vector<std::string> argv;            // as typed, without the program
  std::vector<std::string> canonical_argv;  // fully resolved replacement
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
};

// FNV-1a over the file bytes, formatted "fnv1a64:<hex>".  Throws
// Error(kIoError) when the file cannot be read.
std::string FileDigest(const std::filesystem::path &path);

std::string NowUtcIso8601();

void WriteManifest(const RunManifest &manifest,
                   const std::filesystem::path &path);
RunManifest ReadManifest(const std::filesystem::path &path);

}  // namespace tool
}  // namespace melcode

#endif  // MELCODE_TOOLS_MANIFEST_H_
