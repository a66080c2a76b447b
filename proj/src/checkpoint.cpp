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

#include "voxelforge/checkpoint.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

constexpr char kWhat[] = "checkpoint";

void write_config(std::ostream& os, const NetworkConfig& c) {
  binary::put_u32(os, static_cast<std::uint32_t>(c.base_channels));
  binary::put_u32(os, static_cast<std::uint32_t>(c.levels));
  binary::put_u32(os, static_cast<std::uint32_t>(c.class_count));
  binary::put_u32(os, static_cast<std::uint32_t>(c.fusion));
  for (int d : c.input_dims) binary::put_u32(os, static_cast<std::uint32_t>(d));
  binary::put_u32(os, static_cast<std::uint32_t>(c.bottleneck_dilations.size()));
  for (int d : c.bottleneck_dilations) binary::put_u32(os, static_cast<std::uint32_t>(d));
  binary::put_u32(os, c.zero_init_head ? 1u : 0u);
  binary::put_u64(os, c.seed);
}

NetworkConfig read_config(std::istream& is) {
  NetworkConfig c;
  auto get_int = [&]() {
    const std::uint32_t v = binary::get_u32(is, kWhat);
    if (v > 1u << 20) throw FormatError(FormatErrorKind::kBadHeader, "checkpoint: bad config");
    return static_cast<int>(v);
  };
  c.base_channels = get_int();
  c.levels = get_int();
  c.class_count = get_int();
  const int fusion = get_int();
  if (fusion > 2) throw FormatError(FormatErrorKind::kBadHeader, "checkpoint: bad fusion");
  c.fusion = static_cast<FusionScheme>(fusion);
  for (int& d : c.input_dims) d = get_int();
  const int n_dil = get_int();
  if (n_dil > 64) throw FormatError(FormatErrorKind::kBadHeader, "checkpoint: bad dilations");
  c.bottleneck_dilations.resize(static_cast<std::size_t>(n_dil));
  for (int& d : c.bottleneck_dilations) d = get_int();
  c.zero_init_head = get_int() != 0;
  c.seed = binary::get_u64(is, kWhat);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(FormatErrorKind::kBadHeader, std::string("checkpoint: ") + e.what());
  }
  return c;
}

NetworkConfig read_header(std::istream& is) {
  binary::expect_magic(is, "ENCK", kWhat);
  const std::uint32_t version = binary::get_u32(is, kWhat);
  if (version != kCheckpointVersion) {
    throw FormatError(FormatErrorKind::kBadVersion,
                      "checkpoint: unsupported version " + std::to_string(version));
  }
  return read_config(is);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path.string());
  return is;
}

bool same_config(const NetworkConfig& a, const NetworkConfig& b) {
  return a.base_channels == b.base_channels && a.levels == b.levels &&
         a.class_count == b.class_count && a.fusion == b.fusion &&
         a.input_dims == b.input_dims && a.bottleneck_dilations == b.bottleneck_dilations;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EdgeNet<float>& net) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write checkpoint " + path.string());
  os.write("ENCK", 4);
  binary::put_u32(os, kCheckpointVersion);
  write_config(os, net.config());
  const auto params = net.parameters();
  binary::put_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    binary::put_u32(os, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) binary::put_u32(os, static_cast<std::uint32_t>(d));
    for (float v : p.values) binary::put_f32(os, v);
  }
  if (!os) throw DataError("failed writing checkpoint " + path.string());
}

NetworkConfig read_checkpoint_config(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  return read_header(is);
}

EdgeNet<float> load_checkpoint(const std::filesystem::path& path) {
  EdgeNet<float> net(read_checkpoint_config(path));
  load_checkpoint_into(path, net);
  return net;
}

void load_checkpoint_into(const std::filesystem::path& path, EdgeNet<float>& net) {
  std::ifstream is = open_in(path);
  const NetworkConfig cfg = read_header(is);
  if (!same_config(cfg, net.config())) {
    throw DataError("checkpoint architecture does not match the network");
  }
  auto params = net.parameters();
  const std::uint32_t count = binary::get_u32(is, kWhat);
  if (count != params.size()) {
    throw DataError("checkpoint holds " + std::to_string(count) + " tensors, network has " +
                    std::to_string(params.size()));
  }
  for (auto& p : params) {
    const std::uint32_t rank = binary::get_u32(is, kWhat);
    if (rank != p.shape.size()) throw DataError("checkpoint: rank mismatch for " + p.name);
    for (int d : p.shape) {
      if (binary::get_u32(is, kWhat) != static_cast<std::uint32_t>(d)) {
        throw DataError("checkpoint: shape mismatch for " + p.name);
      }
    }
    for (float& v : p.values) v = binary::get_f32(is, kWhat);
  }
}

}  // namespace voxelforge
