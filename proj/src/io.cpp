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

#include "voxelforge/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "binary_io.hpp"
#include "voxelforge/errors.hpp"

namespace voxelforge {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  return is;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw DataError("failed writing " + path.string());
}

void write_volume_header(std::ostream& os, const VoxelGridSpec& spec, VolumeDtype dtype) {
  os.write("EVOX", 4);
  binary::put_u32(os, kVolumeVersion);
  binary::put_u32(os, static_cast<std::uint32_t>(dtype));
  for (int d : spec.dims) binary::put_u32(os, static_cast<std::uint32_t>(d));
  for (int a = 0; a < 3; ++a) binary::put_f64(os, spec.origin[a]);
  binary::put_f64(os, spec.voxel_size);
}

VoxelGridSpec read_volume_header(std::istream& is, VolumeDtype expected,
                                 const std::string& what) {
  binary::expect_magic(is, "EVOX", what);
  const std::uint32_t version = binary::get_u32(is, what);
  if (version != kVolumeVersion) {
    throw FormatError(FormatErrorKind::kBadVersion,
                      what + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t dtype = binary::get_u32(is, what);
  if (dtype != static_cast<std::uint32_t>(expected)) {
    throw FormatError(FormatErrorKind::kBadHeader,
                      what + ": unexpected dtype code " + std::to_string(dtype));
  }
  VoxelGridSpec spec;
  for (int& d : spec.dims) {
    const std::uint32_t v = binary::get_u32(is, what);
    if (v == 0 || v > 1u << 16) {
      throw FormatError(FormatErrorKind::kBadHeader, what + ": bad dimensions");
    }
    d = static_cast<int>(v);
  }
  for (int a = 0; a < 3; ++a) spec.origin[a] = binary::get_f64(is, what);
  spec.voxel_size = binary::get_f64(is, what);
  if (!(spec.voxel_size > 0.0) || !std::isfinite(spec.voxel_size) ||
      !spec.origin.allFinite()) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": bad grid geometry");
  }
  return spec;
}

std::string read_token(std::istream& is, const std::string& what) {
  std::string tok;
  while (true) {
    const int c = is.get();
    if (c == EOF) break;
    if (c == '#') {
      std::string skip;
      std::getline(is, skip);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw FormatError(FormatErrorKind::kBadHeader, what + ": truncated header");
  return tok;
}

int read_header_int(std::istream& is, const std::string& what, int lo, int hi) {
  const std::string tok = read_token(is, what);
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": bad header field '" + tok + "'");
  }
  if (v < lo || v > hi) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": header value out of range");
  }
  return v;
}

struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

PnmHeader read_pnm_header(std::istream& is, const char* magic, const std::string& what) {
  char m[2];
  binary::get_bytes(is, m, 2, what);
  if (m[0] != magic[0] || m[1] != magic[1]) {
    throw FormatError(FormatErrorKind::kBadMagic,
                      what + ": expected " + std::string(magic, 2) + " image");
  }
  PnmHeader h;
  h.width = read_header_int(is, what, 1, 1 << 16);
  h.height = read_header_int(is, what, 1, 1 << 16);
  h.maxval = read_header_int(is, what, 1, 65535);
  // read_token consumed exactly one whitespace byte after maxval.
  return h;
}

Rgb value_color(double v) {
  // Blue (low) to red (high) over [-1, 1].
  const double t = std::clamp(0.5 * (v + 1.0), 0.0, 1.0);
  return {t, 0.2 + 0.6 * (1.0 - std::abs(2.0 * t - 1.0)), 1.0 - t};
}

template <typename Pred, typename Color>
std::size_t write_cubes(const std::filesystem::path& path, const VoxelGridSpec& spec,
                        Pred&& selected, Color&& color) {
  std::vector<std::size_t> voxels;
  for (std::size_t i = 0; i < spec.voxel_count(); ++i) {
    if (selected(i)) voxels.push_back(i);
  }
  std::ofstream os = open_out(path);
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << 8 * voxels.size() << "\n";
  os << "property float x\nproperty float y\nproperty float z\n";
  os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  os << "element face " << 12 * voxels.size() << "\n";
  os << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i : voxels) {
    const VoxelIndex v = spec.unravel(i);
    const Eigen::Vector3d lo =
        spec.origin + spec.voxel_size * Eigen::Vector3d(v.x, v.y, v.z);
    const Rgb c = color(i);
    const int r = static_cast<int>(std::lround(std::clamp(c[0], 0.0, 1.0) * 255));
    const int g = static_cast<int>(std::lround(std::clamp(c[1], 0.0, 1.0) * 255));
    const int b = static_cast<int>(std::lround(std::clamp(c[2], 0.0, 1.0) * 255));
    for (int k = 0; k < 8; ++k) {
      const Eigen::Vector3d p =
          lo + spec.voxel_size * Eigen::Vector3d(k & 1, (k >> 1) & 1, (k >> 2) & 1);
      os << static_cast<float>(p.x()) << " " << static_cast<float>(p.y()) << " "
         << static_cast<float>(p.z()) << " " << r << " " << g << " " << b << "\n";
    }
  }
  // Two triangles per cube face, corners indexed by bits (x, y, z).
  static constexpr std::array<std::array<int, 3>, 12> kTriangles = {{
      {0, 2, 3}, {0, 3, 1},  // z = 0
      {4, 5, 7}, {4, 7, 6},  // z = 1
      {0, 1, 5}, {0, 5, 4},  // y = 0
      {2, 6, 7}, {2, 7, 3},  // y = 1
      {0, 4, 6}, {0, 6, 2},  // x = 0
      {1, 3, 7}, {1, 7, 5},  // x = 1
  }};
  for (std::size_t n = 0; n < voxels.size(); ++n) {
    const std::size_t base = 8 * n;
    for (const auto& t : kTriangles) {
      os << "3 " << base + t[0] << " " << base + t[1] << " " << base + t[2] << "\n";
    }
  }
  finish(os, path);
  return voxels.size();
}

}  // namespace

void write_volume(const std::filesystem::path& path, const Volume<std::uint8_t>& v) {
  std::ofstream os = open_out(path);
  write_volume_header(os, v.spec(), VolumeDtype::kU8);
  os.write(reinterpret_cast<const char*>(v.values().data()),
           static_cast<std::streamsize>(v.size()));
  finish(os, path);
}

void write_volume(const std::filesystem::path& path, const Volume<float>& v) {
  std::ofstream os = open_out(path);
  write_volume_header(os, v.spec(), VolumeDtype::kF32);
  std::vector<char> buf(4 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(v[i]);
    for (int b = 0; b < 4; ++b) buf[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(os, path);
}

Volume<std::uint8_t> read_volume_u8(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string what = path.string();
  Volume<std::uint8_t> v(read_volume_header(is, VolumeDtype::kU8, what));
  binary::get_bytes(is, reinterpret_cast<char*>(v.values().data()), v.size(), what);
  return v;
}

Volume<float> read_volume_f32(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string what = path.string();
  Volume<float> v(read_volume_header(is, VolumeDtype::kF32, what));
  std::vector<unsigned char> buf(4 * v.size());
  binary::get_bytes(is, reinterpret_cast<char*>(buf.data()), buf.size(), what);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                            (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                            (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                            (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
    v[i] = std::bit_cast<float>(u);
  }
  return v;
}

VolumeDtype read_volume_dtype(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string what = path.string();
  binary::expect_magic(is, "EVOX", what);
  if (binary::get_u32(is, what) != kVolumeVersion) {
    throw FormatError(FormatErrorKind::kBadVersion, what + ": unsupported version");
  }
  const std::uint32_t dtype = binary::get_u32(is, what);
  if (dtype != 1 && dtype != 2) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": unknown dtype");
  }
  return static_cast<VolumeDtype>(dtype);
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  std::ofstream os = open_out(path);
  os << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<char> buf;
  buf.reserve(3 * img.size());
  for (const Rgb& px : img.values()) {
    for (double c : px) {
      buf.push_back(static_cast<char>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)));
    }
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(os, path);
}

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string what = path.string();
  const PnmHeader h = read_pnm_header(is, "P6", what);
  if (h.maxval > 255) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": only 8-bit PPM is supported");
  }
  RgbImage img(h.width, h.height);
  std::vector<unsigned char> buf(3 * img.size());
  binary::get_bytes(is, reinterpret_cast<char*>(buf.data()), buf.size(), what);
  for (std::size_t i = 0; i < img.size(); ++i) {
    for (int c = 0; c < 3; ++c) img.values()[i][c] = buf[3 * i + c] / double(h.maxval);
  }
  return img;
}

std::size_t write_depth_pgm(const std::filesystem::path& path, const DepthMap& depth) {
  std::ofstream os = open_out(path);
  os << "P5\n" << depth.width() << " " << depth.height() << "\n65535\n";
  std::size_t clamped = 0;
  std::vector<char> buf;
  buf.reserve(2 * depth.size());
  for (double d : depth.values()) {
    if (!std::isfinite(d) || d < 0.0) throw DataError("depth must be finite and >= 0");
    long mm = std::lround(d * 1000.0);
    if (mm > 65535) {
      mm = 65535;
      ++clamped;
    }
    buf.push_back(static_cast<char>((mm >> 8) & 0xff));
    buf.push_back(static_cast<char>(mm & 0xff));
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(os, path);
  return clamped;
}

DepthMap read_depth_pgm(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  const std::string what = path.string();
  const PnmHeader h = read_pnm_header(is, "P5", what);
  if (h.maxval != 65535) {
    throw FormatError(FormatErrorKind::kBadHeader, what + ": depth PGM must be 16-bit");
  }
  DepthMap depth(h.width, h.height);
  std::vector<unsigned char> buf(2 * depth.size());
  binary::get_bytes(is, reinterpret_cast<char*>(buf.data()), buf.size(), what);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const int mm = (buf[2 * i] << 8) | buf[2 * i + 1];
    depth.values()[i] = mm / 1000.0;
  }
  return depth;
}

void write_camera_json(const std::filesystem::path& path, const CameraIntrinsics& k,
                       const RigidTransform& camera_to_world) {
  nlohmann::json j;
  j["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
                     {"width", k.width}, {"height", k.height}};
  nlohmann::json rot = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    rot.push_back({camera_to_world.rotation()(r, 0), camera_to_world.rotation()(r, 1),
                   camera_to_world.rotation()(r, 2)});
  }
  const Eigen::Vector3d& t = camera_to_world.translation();
  j["camera_to_world"] = {{"rotation", rot}, {"translation", {t.x(), t.y(), t.z()}}};
  std::ofstream os = open_out(path);
  // dump() prints doubles in shortest round-trip form.
  os << j.dump(2) << "\n";
  finish(os, path);
}

std::pair<CameraIntrinsics, RigidTransform> read_camera_json(
    const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  try {
    const nlohmann::json j = nlohmann::json::parse(is);
    CameraIntrinsics k;
    const auto& in = j.at("intrinsics");
    k.fx = in.at("fx").get<double>();
    k.fy = in.at("fy").get<double>();
    k.cx = in.at("cx").get<double>();
    k.cy = in.at("cy").get<double>();
    k.width = in.at("width").get<int>();
    k.height = in.at("height").get<int>();
    k.validate();
    const auto& pose = j.at("camera_to_world");
    Eigen::Matrix3d r;
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        r(row, col) = pose.at("rotation").at(row).at(col).get<double>();
      }
    }
    Eigen::Vector3d t;
    for (int a = 0; a < 3; ++a) t[a] = pose.at("translation").at(a).get<double>();
    return {k, RigidTransform(r, t)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid camera file: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": invalid camera: " + e.what());
  }
}

std::size_t export_ply(const std::filesystem::path& path, const LabelVolume& labels) {
  return write_cubes(
      path, labels.spec(),
      [&](std::size_t i) { return labels[i] != kEmpty && labels[i] < kClassCount; },
      [&](std::size_t i) { return kClassPalette[labels[i]]; });
}

std::size_t export_ply(const std::filesystem::path& path, const Volume<float>& values,
                       double threshold) {
  return write_cubes(
      path, values.spec(), [&](std::size_t i) { return values[i] >= threshold; },
      [&](std::size_t i) { return value_color(values[i]); });
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream os = open_out(path);
  for (const auto& e : entries) {
    for (const std::string* f : {&e.rgb, &e.depth, &e.gt, &e.room, &e.camera}) {
      if (f->empty() || f->find_first_of(" \t\n") != std::string::npos) {
        throw DataError("manifest paths must be non-empty and free of whitespace");
      }
    }
    os << e.rgb << " " << e.depth << " " << e.gt << " " << e.room << " " << e.camera << "\n";
  }
  finish(os, path);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    for (std::string f; ls >> f;) fields.push_back(f);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 5) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 5 fields (rgb depth gt room camera)");
    }
    out.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
  }
  return out;
}

}  // namespace voxelforge
