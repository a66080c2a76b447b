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

#include "voxelforge/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "voxelforge/errors.hpp"
#include "voxelforge/layers.hpp"

namespace voxelforge {
namespace {

template <typename T>
Tensor5<T> stack(const std::vector<const Tensor5<T>*>& parts) {
  auto shape = parts.front()->shape();
  shape[0] = 0;
  for (const auto* p : parts) shape[0] += p->n();
  Tensor5<T> out(shape);
  T* dst = out.data();
  for (const auto* p : parts) {
    if (p->c() != out.c() || p->d() != out.d() || p->h() != out.h() || p->w() != out.w()) {
      throw DataError("batch members differ in shape");
    }
    dst = std::copy(p->data(), p->data() + p->size(), dst);
  }
  return out;
}

}  // namespace

TrainExample make_example(const PreprocessedSample& s, bool zero_edges) {
  const VoxelGridSpec& in = s.surface.values.spec();
  require_same_spec(in, s.edge.values.spec(), "make_example");
  require_same_spec(s.gt.spec(), s.grid.spec(), "make_example");
  TrainExample ex;
  ex.input = Tensor5<float>({1, 2, in.dims[2], in.dims[1], in.dims[0]}, 0.0f);
  std::copy(s.surface.values.values().begin(), s.surface.values.values().end(),
            ex.input.slab(0, 0));
  if (!zero_edges) {
    std::copy(s.edge.values.values().begin(), s.edge.values.values().end(),
              ex.input.slab(0, 1));
  }
  const VoxelGridSpec& out = s.gt.spec();
  ex.labels = Tensor5<std::uint8_t>({1, 1, out.dims[2], out.dims[1], out.dims[0]});
  std::copy(s.gt.values().begin(), s.gt.values().end(), ex.labels.data());
  ex.grid = s.grid;
  ex.gt = s.gt;
  return ex;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  if (!(clip_norm >= 0.0)) throw std::invalid_argument("clip_norm must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
  if (!one_cycle && !(constant_lr > 0.0)) {
    throw std::invalid_argument("constant learning rate must be positive");
  }
}

double scheduled_lr(const TrainConfig& config, double epoch) {
  if (!config.one_cycle) return config.constant_lr;
  return one_cycle_lr(epoch * 30.0 / config.epochs);
}

std::vector<StepLog> train(EdgeNet<float>& net, const std::vector<TrainExample>& data,
                           const TrainConfig& config,
                           const std::function<void(const StepLog&)>& on_step) {
  config.validate();
  if (data.empty()) throw DataError("no training examples");
  const int n = static_cast<int>(data.size());
  const int per_epoch = (n + config.batch - 1) / config.batch;
  int total = config.epochs * per_epoch;
  if (config.max_steps > 0) total = std::min(total, config.max_steps);

  OptimState<float> state;
  state.momentum = config.momentum;
  state.weight_decay = config.weight_decay;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<StepLog> log;
  for (int step = 0; step < total; ++step) {
    const int epoch_index = step / per_epoch;
    const int in_epoch = step % per_epoch;
    if (in_epoch == 0) {
      std::iota(order.begin(), order.end(), 0);
      if (config.shuffle) {
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch_index),
                                        0x5348554646ull));
        for (int i = n - 1; i > 0; --i) {
          std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);
        }
      }
    }
    std::vector<const Tensor5<float>*> inputs;
    std::vector<const Tensor5<std::uint8_t>*> labels;
    std::vector<Tensor5<float>> weights;
    for (int k = in_epoch * config.batch; k < std::min(n, (in_epoch + 1) * config.batch); ++k) {
      const TrainExample& ex = data[order[k]];
      inputs.push_back(&ex.input);
      labels.push_back(&ex.labels);
      const WeightTensor w = balance_weights(
          ex.grid, derive_seed(config.seed, static_cast<std::uint64_t>(step),
                               static_cast<std::uint64_t>(order[k])));
      Tensor5<float> wt({1, 1, ex.labels.d(), ex.labels.h(), ex.labels.w()});
      std::copy(w.values.values().begin(), w.values.values().end(), wt.data());
      weights.push_back(std::move(wt));
    }
    std::vector<const Tensor5<float>*> weight_ptrs;
    for (const auto& w : weights) weight_ptrs.push_back(&w);

    StepLog entry;
    entry.step = step;
    entry.epoch = static_cast<double>(step) / per_epoch;
    entry.lr = scheduled_lr(config, entry.epoch);

    const Tensor5<float> logits = net.forward(stack(inputs));
    const Tensor5<std::uint8_t> y_labels = stack(labels);
    if (logits.n() != y_labels.n() || logits.d() != y_labels.d() ||
        logits.h() != y_labels.h() || logits.w() != y_labels.w()) {
      throw DataError("network output " + shape_string(logits.shape()) +
                      " does not match labels " + shape_string(y_labels.shape()));
    }
    require_finite(logits.values(), "network output");
    const Tensor5<float> p = softmax_channels(logits);
    CceResult<float> cce =
        weighted_cce(p, one_hot<float>(y_labels, logits.c()), stack(weight_ptrs));
    const double scale = cce.weight_sum > 0.0 ? 1.0 / cce.weight_sum : 0.0;
    entry.loss = cce.loss * scale;
    entry.weight_sum = cce.weight_sum;
    if (!std::isfinite(entry.loss)) {
      throw NumericError("non-finite loss at step " + std::to_string(step));
    }
    for (float& g : cce.grad_logits.values()) g = static_cast<float>(g * scale);
    net.backward(cce.grad_logits);
    const auto grads = net.gradients();
    double norm2 = 0.0;
    for (const auto& g : grads) {
      require_finite(std::span<const float>(g.values), "gradient of " + g.name);
      for (float v : g.values) norm2 += static_cast<double>(v) * v;
    }
    entry.grad_norm = std::sqrt(norm2);
    if (config.clip_norm > 0.0 && entry.grad_norm > config.clip_norm) {
      const auto shrink = static_cast<float>(config.clip_norm / entry.grad_norm);
      for (const auto& g : grads) {
        for (float& v : g.values) v *= shrink;
      }
    }
    const auto params = net.parameters();
    sgd_momentum_step(params, grads, state, entry.lr);
    for (const auto& p : params) {
      require_finite(std::span<const float>(p.values), "parameter " + p.name);
    }
    log.push_back(entry);
    if (on_step) on_step(entry);
  }
  return log;
}

LabelVolume logits_to_labels(const Tensor5<float>& logits, int n, const VoxelGridSpec& spec) {
  if (logits.d() != spec.dims[2] || logits.h() != spec.dims[1] || logits.w() != spec.dims[0]) {
    throw DataError("logits " + shape_string(logits.shape()) + " do not match grid " +
                    to_string(spec));
  }
  LabelVolume out(spec, kEmpty);
  const std::size_t sp = logits.spatial();
  for (std::size_t i = 0; i < sp; ++i) {
    int best = 0;
    for (int c = 1; c < logits.c(); ++c) {
      if (logits.slab(n, c)[i] > logits.slab(n, best)[i]) best = c;
    }
    out[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

LabelVolume predict(EdgeNet<float>& net, const TrainExample& example) {
  return logits_to_labels(net.forward(example.input), 0, example.gt.spec());
}

EvalReport evaluate(EdgeNet<float>& net, const std::vector<TrainExample>& data,
                    SemanticDomain domain) {
  EvalAccumulator acc(domain);
  for (const auto& ex : data) acc.add(predict(net, ex), ex.gt, ex.grid);
  return acc.report();
}

}  // namespace voxelforge
