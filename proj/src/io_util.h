// melcode/io_util.h

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

// Little-endian scalar and array I/O for the MLSF/MLSE/MLSC containers.
// Private to the library; file formats are fixed little-endian regardless of
// host order.

#ifndef MELCODE_SRC_IO_UTIL_H_
#define MELCODE_SRC_IO_UTIL_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "melcode/common.h"

namespace melcode {
namespace ioutil {

inline void PutBytes(std::ostream &os, const void *data, std::size_t size) {
  os.write(static_cast<const char *>(data),
           static_cast<std::streamsize>(size));
}

inline void GetBytes(std::istream &is, void *data, std::size_t size,
                     const char *what) {
  is.read(static_cast<char *>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(is.gcount()) != size) {
    throw Error(ErrorCode::kTruncated, std::string("short read in ") + what);
  }
}

inline void PutU32(std::ostream &os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  PutBytes(os, b, 4);
}

inline void PutU64(std::ostream &os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  PutBytes(os, b, 8);
}

inline std::uint16_t GetU16(std::istream &is, const char *what) {
  unsigned char b[2];
  GetBytes(is, b, 2, what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

inline std::uint32_t GetU32(std::istream &is, const char *what) {
  unsigned char b[4];
  GetBytes(is, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t GetU64(std::istream &is, const char *what) {
  unsigned char b[8];
  GetBytes(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void PutU8(std::ostream &os, std::uint8_t v) { PutBytes(os, &v, 1); }

inline std::uint8_t GetU8(std::istream &is, const char *what) {
  std::uint8_t v = 0;
  GetBytes(is, &v, 1, what);
  return v;
}

inline void PutF32(std::ostream &os, float v) {
  PutU32(os, std::bit_cast<std::uint32_t>(v));
}

inline float GetF32(std::istream &is, const char *what) {
  return std::bit_cast<float>(GetU32(is, what));
}

inline void PutF64(std::ostream &os, double v) {
  PutU64(os, std::bit_cast<std::uint64_t>(v));
}

inline double GetF64(std::istream &is, const char *what) {
  return std::bit_cast<double>(GetU64(is, what));
}

// On little-endian hosts arrays move as one block; the element-wise path is
// the big-endian fallback.
inline void PutF32Array(std::ostream &os, const float *data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    PutBytes(os, data, n * sizeof(float));
  } else {
    for (std::size_t i = 0; i < n; ++i) PutF32(os, data[i]);
  }
}

inline void GetF32Array(std::istream &is, float *data, std::size_t n,
                        const char *what) {
  if constexpr (std::endian::native == std::endian::little) {
    GetBytes(is, data, n * sizeof(float), what);
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = GetF32(is, what);
  }
}

inline void PutF64Array(std::ostream &os, const double *data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    PutBytes(os, data, n * sizeof(double));
  } else {
    for (std::size_t i = 0; i < n; ++i) PutF64(os, data[i]);
  }
}

inline void GetF64Array(std::istream &is, double *data, std::size_t n,
                        const char *what) {
  if constexpr (std::endian::native == std::endian::little) {
    GetBytes(is, data, n * sizeof(double), what);
  } else {
    for (std::size_t i = 0; i < n; ++i) data[i] = GetF64(is, what);
  }
}

inline void PutString(std::ostream &os, const std::string &s) {
  PutU32(os, static_cast<std::uint32_t>(s.size()));
  PutBytes(os, s.data(), s.size());
}

inline std::string GetString(std::istream &is, const char *what) {
  const std::uint32_t len = GetU32(is, what);
  if (len > (1u << 20)) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("implausible string length in ") + what);
  }
  std::string s(len, '\0');
  if (len > 0) GetBytes(is, s.data(), len, what);
  return s;
}

// A payload that ends before the header says, or continues past it, is
// rejected; callers invoke this after the last expected byte.
inline void ExpectEof(std::istream &is, const char *what) {
  is.peek();
  if (!is.eof()) {
    throw Error(ErrorCode::kMalformedHeader,
                std::string("trailing bytes after ") + what);
  }
}

}  // namespace ioutil
}  // namespace melcode

#endif  // MELCODE_SRC_IO_UTIL_H_
