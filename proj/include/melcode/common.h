// melcode/common.h

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

#ifndef MELCODE_COMMON_H_
#define MELCODE_COMMON_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace melcode {

enum class ErrorCode {
  kMalformedHeader,
  kUnsupportedEncoding,
  kEmptyInput,
  kNonFinite,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kDimensionMismatch,
  kInvalidArgument,
  kDiverged,
  kAmbiguousBottleneck,
  kIoError,
};

inline const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader:     return "malformed header";
    case ErrorCode::kUnsupportedEncoding: return "unsupported encoding";
    case ErrorCode::kEmptyInput:          return "empty input";
    case ErrorCode::kNonFinite:           return "non-finite value";
    case ErrorCode::kBadMagic:            return "bad magic";
    case ErrorCode::kBadVersion:          return "bad version";
    case ErrorCode::kTruncated:           return "truncated payload";
    case ErrorCode::kDimensionMismatch:   return "dimension mismatch";
    case ErrorCode::kInvalidArgument:     return "invalid argument";
    case ErrorCode::kDiverged:            return "training diverged";
    case ErrorCode::kAmbiguousBottleneck: return "ambiguous bottleneck";
    case ErrorCode::kIoError:             return "io error";
  }
  return "unknown error";
}

// Every failure the library raises carries a machine-checkable code; the
// message is for humans only.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// SplitMix64 finalizer.  Bijective, so distinct inputs never collide.
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a decorrelated seed for a numbered stream.  Stream 0 keeps the base
// seed unchanged so a one-stage pipeline reproduces a direct single-stage run.
constexpr std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  return stream == 0 ? seed : SplitMix64(seed ^ SplitMix64(stream));
}

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
// Pinned by hand so results do not depend on any library's distribution
// implementation.
inline double Uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformRange(std::mt19937_64 &rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

// Box-Muller transform; consumes two engine draws per sample.
inline double StandardNormal(std::mt19937_64 &rng) {
  const double u1 = 1.0 - Uniform01(rng);  // in (0, 1], keeps the log finite
  const double u2 = Uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// FNV-1a over raw bytes; used for file digests in run manifests and for the
// deterministic corpus split.
inline std::uint64_t Fnv1a64(const void *data, std::size_t size,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  const auto *bytes = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::uint64_t Fnv1a64(const std::string &text) {
  return Fnv1a64(text.data(), text.size());
}

}  // namespace melcode

#endif  // MELCODE_COMMON_H_
