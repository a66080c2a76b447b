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

#ifndef VOXELFORGE_NETWORK_HPP_
#define VOXELFORGE_NETWORK_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "voxelforge/layers.hpp"
#include "voxelforge/tensor.hpp"

namespace voxelforge {

enum class FusionScheme : std::uint8_t { kEarly = 0, kMiddle = 1, kLate = 2 };

/// "ef", "mf" or "lf"; throws std::invalid_argument otherwise.
FusionScheme parse_fusion(const std::string& name);
std::string fusion_name(FusionScheme f);

struct NetworkConfig {
  int base_channels = 16;
  int levels = 2;                          // encoder resolutions after the input branch
  int class_count = 12;
  FusionScheme fusion = FusionScheme::kEarly;
  std::array<int, 3> input_dims{60, 36, 60};  // (d, h, w) = (z, y, x)
  std::vector<int> bottleneck_dilations{1, 2};
  bool zero_init_head = false;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Input dims / 4 (each input dim must be divisible by 4).
  std::array<int, 3> output_dims() const;
};

/// A named view of one parameter (or gradient) array.
template <typename T>
struct ParamView {
  std::string name;
  std::vector<int> shape;
  std::span<T> values;
};

template <typename T>
class Module;

/// Encoder-decoder with surface and edge inputs.
///
/// Every stream starts with an input branch of two stride-2 3x3x3
/// convolutions (x4 downsampling). The encoder keeps a ResNet block per
/// level, doubling channels with a stride-2 convolution between levels and
/// stacking dilated blocks at the lowest level. The decoder upsamples,
/// merges the skip connection and finishes with a 1x1x1 classifier.
///
/// kEarly feeds both channels into one stream. kMiddle gives each modality
/// its own half-width input branch and concatenates before the encoder.
/// kLate keeps separate half-width input branches and encoders, and
/// concatenates the skips and bottlenecks before the shared decoder. The
/// number of feature channels at every level is the same for all schemes.
template <typename T>
class EdgeNet {
 public:
  explicit EdgeNet(const NetworkConfig& config);
  ~EdgeNet();
  EdgeNet(EdgeNet&&) noexcept;
  EdgeNet& operator=(EdgeNet&&) noexcept;

  const NetworkConfig& config() const { return config_; }

  /// x has shape (n, 2, d, h, w): channel 0 surface F-TSDF, channel 1 edge
  /// F-TSDF. Returns logits (n, 12, d/4, h/4, w/4) and caches activations
  /// for backward().
  Tensor5<T> forward(const Tensor5<T>& x);
  /// Gradient of the loss w.r.t. the logits of the last forward(). Parameter
  /// gradients are overwritten, not accumulated.
  void backward(const Tensor5<T>& grad_logits);

  /// Parameters in declaration order (weights then bias per convolution).
  std::vector<ParamView<T>> parameters();
  std::vector<ParamView<const T>> parameters() const;
  /// Gradients matching parameters() one to one.
  std::vector<ParamView<T>> gradients();
  std::size_t parameter_count() const;
  /// Fused feature channels at each encoder level.
  std::vector<int> level_channels() const;

 private:
  struct Stream;
  struct Decoder;

  NetworkConfig config_;
  std::vector<std::unique_ptr<Stream>> streams_;
  std::unique_ptr<Decoder> decoder_;
  std::vector<int> split_;  // input channels consumed by each stream
  std::vector<int> stream_width_;
};

extern template class EdgeNet<float>;
extern template class EdgeNet<double>;

}  // namespace voxelforge

#endif  // VOXELFORGE_NETWORK_HPP_
