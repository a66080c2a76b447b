/*
 * Copyright 2026 The VoxelForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOXELFORGE_SRC_BINARY_IO_HPP_
#define VOXELFORGE_SRC_BINARY_IO_HPP_

// Little-endian primitives shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "voxelforge/errors.hpp"

namespace voxelforge::binary {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& os, float v) { put_u32(os, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void get_bytes(std::istream& is, char* dst, std::size_t n, const std::string& what) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw FormatError(FormatErrorKind::kTruncated, what + ": unexpected end of file");
  }
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  get_bytes(is, reinterpret_cast<char*>(b), 4, what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& is, const std::string& what) {
  const std::uint64_t lo = get_u32(is, what);
  const std::uint64_t hi = get_u32(is, what);
  return lo | (hi << 32);
}

inline float get_f32(std::istream& is, const std::string& what) {
  return std::bit_cast<float>(get_u32(is, what));
}
inline double get_f64(std::istream& is, const std::string& what) {
  return std::bit_cast<double>(get_u64(is, what));
}

inline void expect_magic(std::istream& is, const char (&magic)[5], const std::string& what) {
  char got[4];
  get_bytes(is, got, 4, what);
  if (std::memcmp(got, magic, 4) != 0) {
    throw FormatError(FormatErrorKind::kBadMagic,
                      what + ": bad magic, expected " + std::string(magic, 4));
  }
}

}  // namespace voxelforge::binary

#endif  // VOXELFORGE_SRC_BINARY_IO_HPP_
