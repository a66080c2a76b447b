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

#include "voxelforge/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace voxelforge {

template <typename T>
void sgd_momentum_step(const std::vector<ParamView<T>>& params,
                       const std::vector<ParamView<T>>& grads, OptimState<T>& state,
                       double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (params.size() != grads.size()) {
    throw std::invalid_argument("sgd: parameter and gradient lists differ in length");
  }
  if (state.velocity.empty()) {
    for (const auto& p : params) state.velocity.emplace_back(p.values.size(), T(0));
  }
  if (state.velocity.size() != params.size()) {
    throw std::invalid_argument("sgd: optimizer state does not match parameters");
  }
  const T mu = static_cast<T>(state.momentum);
  const T decay = static_cast<T>(state.weight_decay);
  const T rate = static_cast<T>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].values;
    auto g = grads[i].values;
    auto& v = state.velocity[i];
    if (theta.size() != g.size() || theta.size() != v.size()) {
      throw std::invalid_argument("sgd: shape mismatch for " + params[i].name);
    }
    for (std::size_t j = 0; j < theta.size(); ++j) {
      v[j] = mu * v[j] - rate * (g[j] + decay * theta[j]);
      theta[j] += v[j];
    }
  }
}

double one_cycle_lr(double epoch) {
  if (!(epoch >= 0.0) || !std::isfinite(epoch)) {
    throw std::invalid_argument("epoch must be a non-negative number");
  }
  struct Knot {
    double epoch;
    double lr;
  };
  static constexpr Knot kKnots[] = {{0.0, 0.01}, {10.0, 0.1}, {20.0, 0.01}, {30.0, 0.0005}};
  for (std::size_t i = 1; i < std::size(kKnots); ++i) {
    if (epoch == kKnots[i].epoch) return kKnots[i].lr;
    if (epoch < kKnots[i].epoch) {
      const Knot a = kKnots[i - 1];
      const Knot b = kKnots[i];
      const double t = (epoch - a.epoch) / (b.epoch - a.epoch);
      return a.lr + t * (b.lr - a.lr);
    }
  }
  return kKnots[std::size(kKnots) - 1].lr;
}

template void sgd_momentum_step(const std::vector<ParamView<float>>&,
                                const std::vector<ParamView<float>>&,
                                OptimState<float>&, double);
template void sgd_momentum_step(const std::vector<ParamView<double>>&,
                                const std::vector<ParamView<double>>&,
                                OptimState<double>&, double);

}  // namespace voxelforge
