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

#ifndef VOXELFORGE_OPTIM_HPP_
#define VOXELFORGE_OPTIM_HPP_

#include <span>
#include <vector>

#include "voxelforge/network.hpp"

namespace voxelforge {

/// Momentum buffers for SGD. Velocities are created lazily on the first
/// step and mirror the parameter list from then on.
template <typename T>
struct OptimState {
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::vector<std::vector<T>> velocity;
};

/// v <- momentum v - lr (g + weight_decay theta); theta <- theta + v.
/// Throws std::invalid_argument for lr <= 0 or mismatched shapes.
template <typename T>
void sgd_momentum_step(const std::vector<ParamView<T>>& params,
                       const std::vector<ParamView<T>>& grads, OptimState<T>& state,
                       double lr);

/// One-cycle schedule over 30 epochs: 0.01 -> 0.1 on [0, 10], 0.1 -> 0.01
/// on [10, 20], 0.01 -> 0.0005 on [20, 30], then constant 0.0005. Throws
/// std::invalid_argument for a negative or non-finite epoch.
double one_cycle_lr(double epoch);

}  // namespace voxelforge

#endif  // VOXELFORGE_OPTIM_HPP_
