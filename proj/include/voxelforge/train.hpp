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

#ifndef VOXELFORGE_TRAIN_HPP_
#define VOXELFORGE_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "voxelforge/metrics.hpp"
#include "voxelforge/network.hpp"
#include "voxelforge/occupancy.hpp"
#include "voxelforge/optim.hpp"
#include "voxelforge/pipeline.hpp"
#include "voxelforge/tensor.hpp"

namespace voxelforge {

/// One training example in tensor form.
struct TrainExample {
  Tensor5<float> input;           // (1, 2, z, y, x): surface, edge
  Tensor5<std::uint8_t> labels;   // (1, 1, z/4, y/4, x/4), kIgnore allowed
  OccupancyGrid grid;             // output resolution
  LabelVolume gt;                 // same labels as a volume, for metrics
};

/// Copies the volumes into tensors. With `zero_edges` the edge channel is
/// replaced by zeros (the edges-removed ablation).
TrainExample make_example(const PreprocessedSample& s, bool zero_edges = false);

struct TrainConfig {
  int epochs = 30;
  int batch = 3;
  std::uint64_t seed = 1;
  bool one_cycle = true;        // otherwise a constant rate
  double constant_lr = 0.01;
  int max_steps = 0;            // stop early after this many steps when > 0
  double clip_norm = 1.0;       // global gradient L2 norm limit; 0 disables
  double momentum = 0.9;
  double weight_decay = 0.0005;
  bool shuffle = true;

  void validate() const;
};

struct StepLog {
  int step = 0;
  double epoch = 0.0;  // fractional training epoch at the start of the step
  double lr = 0.0;
  double loss = 0.0;   // weighted cross-entropy divided by the weight sum
  double weight_sum = 0.0;
  double grad_norm = 0.0;  // before clipping
};

/// Learning rate at a fractional training epoch. The 30-epoch one-cycle
/// schedule is stretched over `config.epochs`.
double scheduled_lr(const TrainConfig& config, double epoch);

/// Mini-batch SGD with momentum. Occluded free voxels are resampled for
/// every batch with a seed derived from (config.seed, step, example).
/// Throws NumericError as soon as the loss or a gradient is not finite.
std::vector<StepLog> train(EdgeNet<float>& net, const std::vector<TrainExample>& data,
                           const TrainConfig& config,
                           const std::function<void(const StepLog&)>& on_step = {});

/// Argmax over the class channel for sample `n` of a logits tensor.
LabelVolume logits_to_labels(const Tensor5<float>& logits, int n, const VoxelGridSpec& spec);

LabelVolume predict(EdgeNet<float>& net, const TrainExample& example);

/// Accumulated metrics of the network's predictions over `data`.
EvalReport evaluate(EdgeNet<float>& net, const std::vector<TrainExample>& data,
                    SemanticDomain domain = SemanticDomain::kSurfaceAndOccluded);

}  // namespace voxelforge

#endif  // VOXELFORGE_TRAIN_HPP_
