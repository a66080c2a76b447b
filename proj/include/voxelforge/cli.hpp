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

#ifndef VOXELFORGE_CLI_HPP_
#define VOXELFORGE_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "voxelforge/edges.hpp"
#include "voxelforge/metrics.hpp"
#include "voxelforge/network.hpp"
#include "voxelforge/volume.hpp"

namespace voxelforge {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// "canonical" or "desk"; throws std::invalid_argument otherwise.
VoxelGridSpec parse_grid(const std::string& name);

struct SynthOptions {
  int count = 10;
  double difficulty = 0.6;
  std::uint64_t seed = 1;
  std::filesystem::path out;
  std::string grid = "desk";
  bool ensure_decal = false;  // guarantee a fully visible poster per sample
  bool pairs = false;         // also emit each scene with its decals removed
};

/// Renders the samples and writes `out/manifest.txt`. Returns the manifest
/// path.
std::filesystem::path cmd_synth(const SynthOptions& opt, std::ostream& log);

struct PreprocessOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::string grid = "desk";
  CannyParams canny;
  bool all_room = false;
  bool force = false;
};

struct PreprocessStats {
  std::size_t computed = 0;
  std::size_t skipped = 0;  // outputs already up to date
};

/// Writes one directory per manifest entry plus `out/index.txt`.
PreprocessStats cmd_preprocess(const PreprocessOptions& opt, std::ostream& log);

struct TrainOptions {
  std::filesystem::path data;  // preprocess output directory
  std::filesystem::path out;
  std::string fusion = "ef";
  int base_channels = 16;
  int levels = 2;
  int epochs = 30;
  int batch = 3;
  std::uint64_t seed = 1;
  std::string schedule = "one-cycle";  // or "constant"
  double lr = 0.01;                    // used by the constant schedule
  double clip_norm = 1.0;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  int max_steps = 0;
  bool zero_edges = false;
};

/// Trains and writes `out/checkpoint.enck` and `out/loss_log.txt` with
/// "step epoch lr loss" lines.
void cmd_train(const TrainOptions& opt, std::ostream& log);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::filesystem::path out;
  bool zero_edges = false;
  bool all_in_view = false;         // also score visible free space
  bool gt_as_prediction = false;    // bypass the network
};

/// Writes `out/report.txt` (table) and `out/report.kv` (key=value).
EvalReport cmd_eval(const EvalOptions& opt, std::ostream& log);

struct ExportOptions {
  std::filesystem::path input;  // EVOX volume
  std::filesystem::path out;    // PLY file
  double threshold = 0.5;       // scalar volumes only
};

std::size_t cmd_export_ply(const ExportOptions& opt, std::ostream& log);

/// Parses the command line and runs one subcommand. Returns an exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Sample directory names listed in a preprocess output `index.txt`.
std::vector<std::string> read_index(const std::filesystem::path& data_dir);

}  // namespace voxelforge

#endif  // VOXELFORGE_CLI_HPP_
