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

#include "voxelforge/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "voxelforge/checkpoint.hpp"
#include "voxelforge/errors.hpp"
#include "voxelforge/io.hpp"
#include "voxelforge/occupancy.hpp"
#include "voxelforge/parallel.hpp"
#include "voxelforge/pipeline.hpp"
#include "voxelforge/scene.hpp"
#include "voxelforge/train.hpp"

namespace voxelforge {
namespace {

namespace fs = std::filesystem;

constexpr char kManifestName[] = "manifest.txt";
constexpr char kIndexName[] = "index.txt";
constexpr char kStampName[] = "stamp.json";
constexpr int kStampVersion = 1;

std::string sample_name(int i, const char* suffix = "") {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%05d%s", i, suffix);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  os << text;
  if (!os) throw DataError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path);
  if (!is) return {};
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_frame(const fs::path& dir, const Sample& s, std::ostream& log) {
  fs::create_directories(dir);
  write_ppm(dir / "rgb.ppm", s.rgb);
  if (const std::size_t clamped = write_depth_pgm(dir / "depth.pgm", s.depth)) {
    log << "warning: " << clamped << " depth values clamped to " << kMaxStoredDepth
        << " m in " << dir.string() << "\n";
  }
  write_volume(dir / "gt.evox", s.gt);
  write_volume(dir / "room.evox", s.room);
  write_camera_json(dir / "camera.json", s.camera, s.camera_to_world);
}

ManifestEntry entry_for(const std::string& name) {
  return {name + "/rgb.ppm", name + "/depth.pgm", name + "/gt.evox", name + "/room.evox",
          name + "/camera.json"};
}

// Identity of a preprocessing job: input file sizes and times plus every
// parameter that affects the output.
std::string preprocess_stamp(const ManifestEntry& e, const fs::path& base,
                             const PreprocessOptions& opt) {
  nlohmann::json j;
  j["version"] = kStampVersion;
  nlohmann::json inputs = nlohmann::json::array();
  for (const std::string* f : {&e.rgb, &e.depth, &e.gt, &e.room, &e.camera}) {
    const fs::path p = base / *f;
    if (!fs::exists(p)) throw DataError("missing input " + p.string());
    inputs.push_back({{"path", *f},
                      {"size", fs::file_size(p)},
                      {"mtime", fs::last_write_time(p).time_since_epoch().count()}});
  }
  j["inputs"] = inputs;
  j["grid"] = opt.grid;
  j["sigma"] = opt.canny.sigma;
  j["t_low"] = opt.canny.t_low;
  j["t_high"] = opt.canny.t_high;
  j["all_room"] = opt.all_room;
  return j.dump(2) + "\n";
}

bool outputs_present(const fs::path& dir) {
  for (const char* f : {"surface.evox", "edge.evox", "gt.evox", "occ.evox"}) {
    if (!fs::exists(dir / f)) return false;
  }
  return true;
}

std::vector<TrainExample> load_examples(const fs::path& data, bool zero_edges) {
  std::vector<TrainExample> out;
  for (const auto& name : read_index(data)) {
    out.push_back(make_example(read_preprocessed(data / name), zero_edges));
  }
  if (out.empty()) throw DataError("no preprocessed samples in " + data.string());
  return out;
}

void check_paths(const fs::path& p, const char* flag) {
  if (p.empty()) throw std::invalid_argument(std::string(flag) + " is required");
}

}  // namespace

VoxelGridSpec parse_grid(const std::string& name) {
  if (name == "canonical") return VoxelGridSpec::canonical();
  if (name == "desk") return VoxelGridSpec::desk();
  throw std::invalid_argument("unknown grid '" + name + "' (canonical|desk)");
}

std::vector<std::string> read_index(const fs::path& data_dir) {
  std::ifstream is(data_dir / kIndexName);
  if (!is) throw DataError("missing " + (data_dir / kIndexName).string());
  std::vector<std::string> names;
  for (std::string line; std::getline(is, line);) {
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

fs::path cmd_synth(const SynthOptions& opt, std::ostream& log) {
  check_paths(opt.out, "--out");
  if (opt.count < 0) throw std::invalid_argument("--count must be >= 0");
  if (!(opt.difficulty >= 0.0 && opt.difficulty <= 1.0)) {
    throw std::invalid_argument("--difficulty must be in [0, 1]");
  }
  const VoxelGridSpec grid = parse_grid(opt.grid);
  fs::create_directories(opt.out);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < opt.count; ++i) {
    const std::uint64_t seed = derive_seed(opt.seed, static_cast<std::uint64_t>(i));
    SceneSpec scene = generate_scene(seed, opt.difficulty);
    if (opt.ensure_decal || opt.pairs) scene = ensure_decal(scene, seed);
    const std::string name = sample_name(i);
    write_frame(opt.out / name, render(scene, grid), log);
    entries.push_back(entry_for(name));
    if (opt.pairs) {
      const std::string plain = sample_name(i, "_plain");
      write_frame(opt.out / plain, render(strip_decals(scene), grid), log);
      entries.push_back(entry_for(plain));
    }
  }
  const fs::path manifest = opt.out / kManifestName;
  write_manifest(manifest, entries);
  log << "synth: wrote " << entries.size() << " samples to " << opt.out.string() << "\n";
  return manifest;
}

PreprocessStats cmd_preprocess(const PreprocessOptions& opt, std::ostream& log) {
  check_paths(opt.manifest, "--manifest");
  check_paths(opt.out, "--out");
  PreprocessParams params;
  params.grid = parse_grid(opt.grid);
  params.canny = opt.canny;
  params.all_room = opt.all_room;
  params.validate();

  const auto entries = read_manifest(opt.manifest);
  const fs::path base = opt.manifest.parent_path();
  fs::create_directories(opt.out);
  std::vector<std::string> names(entries.size());
  std::vector<char> computed(entries.size(), 0);
  parallel_for(0, entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = entries[i];
    names[i] = fs::path(e.rgb).parent_path().filename().string();
    if (names[i].empty()) names[i] = sample_name(static_cast<int>(i));
    const fs::path dir = opt.out / names[i];
    const std::string stamp = preprocess_stamp(e, base, opt);
    if (!opt.force && outputs_present(dir) && read_text(dir / kStampName) == stamp) return;
    Frame frame;
    frame.rgb = read_ppm(base / e.rgb);
    frame.depth = read_depth_pgm(base / e.depth);
    frame.gt = read_volume_u8(base / e.gt);
    frame.room = read_volume_u8(base / e.room);
    std::tie(frame.camera, frame.camera_to_world) = read_camera_json(base / e.camera);
    const PreprocessedSample s = preprocess(frame, params);
    write_preprocessed(dir, s);
    write_text(dir / kStampName, stamp);
    computed[i] = 1;
  });
  std::string index;
  PreprocessStats stats;
  for (std::size_t i = 0; i < names.size(); ++i) {
    index += names[i] + "\n";
    stats.computed += computed[i];
  }
  stats.skipped = entries.size() - stats.computed;
  write_text(opt.out / kIndexName, index);
  log << "preprocess: computed " << stats.computed << ", up to date " << stats.skipped
      << "\n";
  return stats;
}

void cmd_train(const TrainOptions& opt, std::ostream& log) {
  check_paths(opt.data, "--data");
  check_paths(opt.out, "--out");
  NetworkConfig net_cfg;
  net_cfg.fusion = parse_fusion(opt.fusion);
  net_cfg.base_channels = opt.base_channels;
  net_cfg.levels = opt.levels;
  net_cfg.seed = opt.seed;
  TrainConfig cfg;
  cfg.epochs = opt.epochs;
  cfg.batch = opt.batch;
  cfg.seed = opt.seed;
  cfg.max_steps = opt.max_steps;
  cfg.clip_norm = opt.clip_norm;
  cfg.momentum = opt.momentum;
  cfg.weight_decay = opt.weight_decay;
  if (opt.schedule == "constant") {
    cfg.one_cycle = false;
    cfg.constant_lr = opt.lr;
  } else if (opt.schedule != "one-cycle") {
    throw std::invalid_argument("unknown schedule '" + opt.schedule + "'");
  }
  cfg.validate();

  const auto data = load_examples(opt.data, opt.zero_edges);
  const auto& in = data.front().input;
  net_cfg.input_dims = {in.d(), in.h(), in.w()};
  net_cfg.validate();
  EdgeNet<float> net(net_cfg);
  fs::create_directories(opt.out);
  log << "train: " << data.size() << " samples, fusion " << opt.fusion << ", "
      << net.parameter_count() << " parameters\n";

  std::ofstream loss_log(opt.out / "loss_log.txt", std::ios::trunc);
  loss_log << "# step epoch lr loss\n";
  char line[128];
  train(net, data, cfg, [&](const StepLog& s) {
    std::snprintf(line, sizeof(line), "%d %.6f %.9g %.9g\n", s.step, s.epoch, s.lr, s.loss);
    loss_log << line;
  });
  loss_log.flush();
  save_checkpoint(opt.out / "checkpoint.enck", net);
  log << "train: wrote " << (opt.out / "checkpoint.enck").string() << "\n";
}

EvalReport cmd_eval(const EvalOptions& opt, std::ostream& log) {
  check_paths(opt.data, "--data");
  check_paths(opt.out, "--out");
  const auto data = load_examples(opt.data, opt.zero_edges);
  const SemanticDomain domain =
      opt.all_in_view ? SemanticDomain::kAllInView : SemanticDomain::kSurfaceAndOccluded;
  EvalReport report;
  if (opt.gt_as_prediction) {
    EvalAccumulator acc(domain);
    for (const auto& ex : data) acc.add(ex.gt, ex.gt, ex.grid);
    report = acc.report();
  } else {
    check_paths(opt.checkpoint, "--checkpoint");
    EdgeNet<float> net = load_checkpoint(opt.checkpoint);
    const auto& in = data.front().input;
    if (net.config().input_dims != std::array<int, 3>{in.d(), in.h(), in.w()}) {
      throw DataError("checkpoint input dims do not match the data");
    }
    report = evaluate(net, data, domain);
  }
  fs::create_directories(opt.out);
  write_text(opt.out / "report.txt", format_report_table(report));
  write_text(opt.out / "report.kv", format_report_kv(report));
  log << format_report_table(report);
  return report;
}

std::size_t cmd_export_ply(const ExportOptions& opt, std::ostream& log) {
  check_paths(opt.input, "--input");
  check_paths(opt.out, "--out");
  if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());
  std::size_t n = 0;
  if (read_volume_dtype(opt.input) == VolumeDtype::kU8) {
    n = export_ply(opt.out, read_volume_u8(opt.input));
  } else {
    n = export_ply(opt.out, read_volume_f32(opt.input), opt.threshold);
  }
  log << "export-ply: " << n << " voxels to " << opt.out.string() << "\n";
  return n;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic scene completion from RGB-D with edge-encoded volumes"};
  app.set_config("--config", "", "Read options from a TOML snapshot");
  app.require_subcommand(1);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Generate and render synthetic scenes");
  s->add_option("--count", synth.count, "Number of scenes")->capture_default_str();
  s->add_option("--difficulty", synth.difficulty, "Clutter level in [0, 1]")
      ->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--grid", synth.grid, "canonical|desk")->capture_default_str();
  s->add_flag("--ensure-decal", synth.ensure_decal, "Guarantee a visible poster");
  s->add_flag("--pairs", synth.pairs, "Also write every scene without decals");

  PreprocessOptions prep;
  auto* p = app.add_subcommand("preprocess", "Encode samples as F-TSDF volumes");
  p->add_option("--manifest", prep.manifest)->required();
  p->add_option("--out", prep.out)->required();
  p->add_option("--grid", prep.grid, "canonical|desk")->capture_default_str();
  p->add_option("--sigma", prep.canny.sigma, "Canny blur sigma (pixels)")->capture_default_str();
  p->add_option("--t-low", prep.canny.t_low)->capture_default_str();
  p->add_option("--t-high", prep.canny.t_high)->capture_default_str();
  p->add_flag("--all-room", prep.all_room, "Treat every voxel as inside the room");
  p->add_flag("--force", prep.force, "Recompute up-to-date samples");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the network");
  t->add_option("--data", tr.data)->required();
  t->add_option("--out", tr.out)->required();
  t->add_option("--fusion", tr.fusion, "ef|mf|lf")->capture_default_str();
  t->add_option("--base-channels", tr.base_channels)->capture_default_str();
  t->add_option("--levels", tr.levels)->capture_default_str();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--schedule", tr.schedule, "one-cycle|constant")->capture_default_str();
  t->add_option("--lr", tr.lr, "Rate for the constant schedule")->capture_default_str();
  t->add_option("--clip-norm", tr.clip_norm)->capture_default_str();
  t->add_option("--momentum", tr.momentum)->capture_default_str();
  t->add_option("--weight-decay", tr.weight_decay)->capture_default_str();
  t->add_option("--max-steps", tr.max_steps)->capture_default_str();
  t->add_flag("--zero-edges", tr.zero_edges, "Replace the edge channel by zeros");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint");
  e->add_option("--checkpoint", ev.checkpoint);
  e->add_option("--data", ev.data)->required();
  e->add_option("--out", ev.out)->required();
  e->add_flag("--zero-edges", ev.zero_edges);
  e->add_flag("--all-in-view", ev.all_in_view, "Also score visible free voxels");
  e->add_flag("--gt-as-prediction", ev.gt_as_prediction, "Score ground truth against itself");

  ExportOptions ex;
  auto* x = app.add_subcommand("export-ply", "Export a volume as colored cubes");
  x->add_option("--input", ex.input)->required();
  x->add_option("--out", ex.out)->required();
  x->add_option("--threshold", ex.threshold)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto snapshot = [&](CLI::App* sub, const fs::path& dir) {
    fs::create_directories(dir);
    std::istringstream all(app.config_to_str(true, false));
    std::string text;
    const std::string prefix = sub->get_name() + ".";
    for (std::string line; std::getline(all, line);) {
      if (line.rfind(prefix, 0) == 0) text += line + "\n";
    }
    write_text(dir / (sub->get_name() + "_config.toml"), text);
  };

  try {
    if (*s) {
      cmd_synth(synth, out);
      snapshot(s, synth.out);
    } else if (*p) {
      cmd_preprocess(prep, out);
      snapshot(p, prep.out);
    } else if (*t) {
      cmd_train(tr, out);
      snapshot(t, tr.out);
    } else if (*e) {
      cmd_eval(ev, out);
      snapshot(e, ev.out);
    } else if (*x) {
      cmd_export_ply(ex, out);
      snapshot(x, ex.out.has_parent_path() ? ex.out.parent_path() : fs::path("."));
    }
  } catch (const std::invalid_argument& ia) {
    err << "error: " << ia.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& ne) {
    err << "numeric failure: " << ne.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& de) {
    err << "data error: " << de.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& fe) {
    err << "data error: " << fe.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace voxelforge
