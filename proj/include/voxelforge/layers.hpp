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

#ifndef VOXELFORGE_LAYERS_HPP_
#define VOXELFORGE_LAYERS_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "voxelforge/tensor.hpp"

namespace voxelforge {

/// 3D convolution parameters. `weights` is laid out as
/// (c_out, c_in, k, k, k) in the Tensor5 slots (n, c, d, h, w).
template <typename T>
struct Conv3Params {
  Tensor5<T> weights;
  std::vector<T> bias;
  int stride = 1;
  int dilation = 1;
  int padding = 0;

  int c_out() const { return weights.n(); }
  int c_in() const { return weights.c(); }
  int kernel() const { return weights.d(); }

  /// Zero weights and bias of the given geometry.
  static Conv3Params zeros(int c_in, int c_out, int kernel, int stride = 1,
                           int dilation = 1, int padding = 0);
  /// He fan-in normal weights, zero bias.
  static Conv3Params he_normal(int c_in, int c_out, int kernel, std::mt19937_64& rng,
                               int stride = 1, int dilation = 1, int padding = 0);

  void validate() const;
  /// floor((in + 2 pad - dilation (k - 1) - 1) / stride) + 1 per axis.
  std::array<int, 3> output_dims(const std::array<int, 3>& in) const;
};

template <typename T>
struct Conv3Grads {
  Tensor5<T> grad_x;
  Tensor5<T> grad_w;
  std::vector<T> grad_b;
};

/// Cross-correlation with stride, dilation and zero padding.
template <typename T>
Tensor5<T> conv3d_forward(const Tensor5<T>& x, const Conv3Params<T>& p);

/// Exact gradients of conv3d_forward. grad_x is skipped (left empty) when
/// `need_grad_x` is false.
template <typename T>
Conv3Grads<T> conv3d_backward(const Tensor5<T>& x, const Conv3Params<T>& p,
                              const Tensor5<T>& grad_out, bool need_grad_x = true);

template <typename T>
Tensor5<T> relu_forward(const Tensor5<T>& x);
/// Gradient through max(0, x) given the pre-activation input.
template <typename T>
Tensor5<T> relu_backward(const Tensor5<T>& pre_activation, const Tensor5<T>& grad_out);

/// Nearest-neighbour upsampling to `dims` (each at most twice the input);
/// output index i reads input index min(i / 2, n - 1).
template <typename T>
Tensor5<T> upsample_nearest(const Tensor5<T>& x, const std::array<int, 3>& dims);
template <typename T>
Tensor5<T> upsample_nearest_backward(const Tensor5<T>& grad_out,
                                     const typename Tensor5<T>::Shape& in_shape);

template <typename T>
Tensor5<T> concat_channels(const Tensor5<T>& a, const Tensor5<T>& b);
/// Splits along channels after the first `channels_a` channels.
template <typename T>
std::pair<Tensor5<T>, Tensor5<T>> split_channels(const Tensor5<T>& x, int channels_a);

/// Per-voxel softmax over the channel axis (max-subtracted).
template <typename T>
Tensor5<T> softmax_channels(const Tensor5<T>& logits);

template <typename T>
struct CceResult {
  double loss = 0.0;         // -sum(w * y * log p)
  double weight_sum = 0.0;   // sum of w over voxels
  Tensor5<T> grad_logits;    // w * (p sum(y) - y), w.r.t. the logits
};

/// Weighted categorical cross-entropy. `p` holds per-voxel distributions,
/// `y` is one-hot (or all-zero for unlabeled voxels) of the same shape and
/// `w` has shape (n, 1, d, h, w). Throws std::invalid_argument when p is not
/// a distribution (entries < 0 or sums off by more than 1e-6).
template <typename T>
CceResult<T> weighted_cce(const Tensor5<T>& p, const Tensor5<T>& y, const Tensor5<T>& w);

/// One-hot encoding of class indices (n, 1, d, h, w) with values in
/// [0, classes) or kIgnore (255), which maps to an all-zero vector.
template <typename T>
Tensor5<T> one_hot(const Tensor5<std::uint8_t>& labels, int classes);

template <typename T>
struct ResBlockParams {
  Conv3Params<T> first;
  Conv3Params<T> second;
};

template <typename T>
struct ResBlockCache {
  Tensor5<T> input;
  Tensor5<T> pre_first;  // first conv output
  Tensor5<T> act_first;  // relu of pre_first
  Tensor5<T> sum;        // second conv output + input
};

template <typename T>
struct ResBlockGrads {
  Tensor5<T> grad_x;
  Conv3Grads<T> first;
  Conv3Grads<T> second;
};

/// relu(conv2(relu(conv1(x))) + x). Both convolutions are 3x3x3, stride 1,
/// with padding equal to their dilation so the shape is preserved.
template <typename T>
ResBlockParams<T> resnet_block_params(int channels, int dilation, std::mt19937_64& rng);

template <typename T>
Tensor5<T> resnet_block_forward(const Tensor5<T>& x, const ResBlockParams<T>& p,
                                ResBlockCache<T>* cache = nullptr);
template <typename T>
ResBlockGrads<T> resnet_block_backward(const ResBlockCache<T>& cache,
                                       const ResBlockParams<T>& p,
                                       const Tensor5<T>& grad_out);

}  // namespace voxelforge

#endif  // VOXELFORGE_LAYERS_HPP_
