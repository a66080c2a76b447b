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

#ifndef VOXELFORGE_ERRORS_HPP_
#define VOXELFORGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace voxelforge {

// Malformed or inconsistent input data (shapes, files, manifests).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A non-finite value appeared where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the distance transform when the source has no occupied voxel.
class EmptyVolumeError : public DataError {
 public:
  using DataError::DataError;
};

enum class FormatErrorKind { kBadMagic, kBadVersion, kTruncated, kBadHeader };

class FormatError : public DataError {
 public:
  FormatError(FormatErrorKind kind, const std::string& what)
      : DataError(what), kind_(kind) {}
  FormatErrorKind kind() const { return kind_; }

 private:
  FormatErrorKind kind_;
};

}  // namespace voxelforge

#endif  // VOXELFORGE_ERRORS_HPP_
