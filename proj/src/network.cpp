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

#include "voxelforge/network.hpp"

#include <random>
#include <stdexcept>
#include <utility>

namespace voxelforge {

FusionScheme parse_fusion(const std::string& name) {
  if (name == "ef") return FusionScheme::kEarly;
  if (name == "mf") return FusionScheme::kMiddle;
  if (name == "lf") return FusionScheme::kLate;
  throw std::invalid_argument("unknown fusion scheme '" + name + "' (ef|mf|lf)");
}

std::string fusion_name(FusionScheme f) {
  switch (f) {
    case FusionScheme::kEarly:
      return "ef";
    case FusionScheme::kMiddle:
      return "mf";
    case FusionScheme::kLate:
      return "lf";
  }
  return "?";
}

void NetworkConfig::validate() const {
  if (base_channels < 2) throw std::invalid_argument("base_channels must be >= 2");
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (class_count != 12) throw std::invalid_argument("class_count must be 12");
  if (bottleneck_dilations.empty()) {
    throw std::invalid_argument("at least one bottleneck dilation is required");
  }
  for (int d : bottleneck_dilations) {
    if (d < 1) throw std::invalid_argument("dilations must be positive");
  }
  for (int n : input_dims) {
    if (n <= 0 || n % 4 != 0) {
      throw std::invalid_argument("input dims must be positive multiples of 4");
    }
  }
}

std::array<int, 3> NetworkConfig::output_dims() const {
  return {input_dims[0] / 4, input_dims[1] / 4, input_dims[2] / 4};
}

template <typename T>
class Module {
 public:
  virtual ~Module() = default;
  virtual Tensor5<T> forward(const Tensor5<T>& x) = 0;
  virtual Tensor5<T> backward(const Tensor5<T>& grad) = 0;
  virtual void collect(const std::string& prefix, std::vector<ParamView<T>>* params,
                       std::vector<ParamView<T>>* grads) = 0;
};

namespace {

template <typename T>
void push_conv(const std::string& prefix, Conv3Params<T>& p, Conv3Grads<T>& g,
               std::vector<ParamView<T>>* params, std::vector<ParamView<T>>* grads) {
  const auto& s = p.weights.shape();
  const std::vector<int> wshape(s.begin(), s.end());
  const std::vector<int> bshape{p.c_out()};
  if (params) {
    params->push_back({prefix + ".weight", wshape, p.weights.values()});
    params->push_back({prefix + ".bias", bshape, std::span<T>(p.bias)});
  }
  if (grads) {
    grads->push_back({prefix + ".weight", wshape, g.grad_w.values()});
    grads->push_back({prefix + ".bias", bshape, std::span<T>(g.grad_b)});
  }
}

template <typename T>
Conv3Grads<T> zero_grads(const Conv3Params<T>& p) {
  Conv3Grads<T> g;
  g.grad_w = Tensor5<T>(p.weights.shape(), T(0));
  g.grad_b.assign(p.bias.size(), T(0));
  return g;
}

template <typename T>
class ConvModule final : public Module<T> {
 public:
  ConvModule(Conv3Params<T> p, bool relu) : p_(std::move(p)), relu_(relu) {
    grads_ = zero_grads(p_);
  }

  Tensor5<T> forward(const Tensor5<T>& x) override {
    input_ = x;
    pre_ = conv3d_forward(x, p_);
    return relu_ ? relu_forward(pre_) : pre_;
  }

  Tensor5<T> backward(const Tensor5<T>& grad) override {
    Conv3Grads<T> g =
        conv3d_backward(input_, p_, relu_ ? relu_backward(pre_, grad) : grad);
    // Keep the spans handed out by collect() valid.
    std::copy(g.grad_w.values().begin(), g.grad_w.values().end(),
              grads_.grad_w.values().begin());
    std::copy(g.grad_b.begin(), g.grad_b.end(), grads_.grad_b.begin());
    return std::move(g.grad_x);
  }

  void collect(const std::string& prefix, std::vector<ParamView<T>>* params,
               std::vector<ParamView<T>>* grads) override {
    push_conv(prefix, p_, grads_, params, grads);
  }

 private:
  Conv3Params<T> p_;
  bool relu_;
  Conv3Grads<T> grads_;
  Tensor5<T> input_;
  Tensor5<T> pre_;
};

template <typename T>
class ResModule final : public Module<T> {
 public:
  explicit ResModule(ResBlockParams<T> p) : p_(std::move(p)) {
    first_ = zero_grads(p_.first);
    second_ = zero_grads(p_.second);
  }

  Tensor5<T> forward(const Tensor5<T>& x) override {
    return resnet_block_forward(x, p_, &cache_);
  }

  Tensor5<T> backward(const Tensor5<T>& grad) override {
    ResBlockGrads<T> g = resnet_block_backward(cache_, p_, grad);
    std::copy(g.first.grad_w.values().begin(), g.first.grad_w.values().end(),
              first_.grad_w.values().begin());
    std::copy(g.first.grad_b.begin(), g.first.grad_b.end(), first_.grad_b.begin());
    std::copy(g.second.grad_w.values().begin(), g.second.grad_w.values().end(),
              second_.grad_w.values().begin());
    std::copy(g.second.grad_b.begin(), g.second.grad_b.end(), second_.grad_b.begin());
    return std::move(g.grad_x);
  }

  void collect(const std::string& prefix, std::vector<ParamView<T>>* params,
               std::vector<ParamView<T>>* grads) override {
    push_conv(prefix + ".conv1", p_.first, first_, params, grads);
    push_conv(prefix + ".conv2", p_.second, second_, params, grads);
  }

 private:
  ResBlockParams<T> p_;
  ResBlockCache<T> cache_;
  Conv3Grads<T> first_;
  Conv3Grads<T> second_;
};

template <typename T>
class Sequential {
 public:
  void add(std::unique_ptr<Module<T>> m) { modules_.push_back(std::move(m)); }

  Tensor5<T> forward(const Tensor5<T>& x) {
    Tensor5<T> cur = x;
    for (auto& m : modules_) cur = m->forward(cur);
    return cur;
  }

  Tensor5<T> backward(const Tensor5<T>& grad) {
    Tensor5<T> cur = grad;
    for (auto it = modules_.rbegin(); it != modules_.rend(); ++it) {
      cur = (*it)->backward(cur);
    }
    return cur;
  }

  void collect(const std::string& prefix, std::vector<ParamView<T>>* params,
               std::vector<ParamView<T>>* grads) {
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      modules_[i]->collect(prefix + "." + std::to_string(i), params, grads);
    }
  }

 private:
  std::vector<std::unique_ptr<Module<T>>> modules_;
};

template <typename T>
std::unique_ptr<Module<T>> conv(int c_in, int c_out, int k, int stride, int padding,
                                bool relu, std::mt19937_64& rng) {
  return std::make_unique<ConvModule<T>>(
      Conv3Params<T>::he_normal(c_in, c_out, k, rng, stride, 1, padding), relu);
}

template <typename T>
std::unique_ptr<Module<T>> res(int channels, int dilation, std::mt19937_64& rng) {
  return std::make_unique<ResModule<T>>(resnet_block_params<T>(channels, dilation, rng));
}

template <typename T>
void add_to(Tensor5<T>& dst, const Tensor5<T>& src) {
  require_same_shape(dst, src, "gradient accumulation");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

// Input branch plus encoder for one stream (kEarly and kLate), or input
// branch only (kMiddle, where the encoder lives in a stream of its own).
template <typename T>
struct EdgeNet<T>::Stream {
  bool has_branch = false;
  Sequential<T> branch;
  std::vector<Sequential<T>> levels;

  std::vector<Tensor5<T>> forward(const Tensor5<T>& x) {
    std::vector<Tensor5<T>> out;
    Tensor5<T> cur = has_branch ? branch.forward(x) : x;
    for (auto& level : levels) {
      cur = level.forward(cur);
      out.push_back(cur);
    }
    if (levels.empty()) out.push_back(std::move(cur));
    return out;
  }

  void backward(std::vector<Tensor5<T>> grads, Tensor5<T>* grad_input) {
    Tensor5<T> g;
    if (levels.empty()) {
      g = std::move(grads.front());
    } else {
      for (std::size_t l = levels.size(); l-- > 0;) {
        if (l + 1 < levels.size()) add_to(grads[l], g);
        g = levels[l].backward(grads[l]);
      }
    }
    if (has_branch) g = branch.backward(g);
    if (grad_input) *grad_input = std::move(g);
  }

  void collect(const std::string& prefix, std::vector<ParamView<T>>* params,
               std::vector<ParamView<T>>* grads) {
    if (has_branch) branch.collect(prefix + ".input", params, grads);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      levels[l].collect(prefix + ".enc" + std::to_string(l), params, grads);
    }
  }
};

template <typename T>
struct EdgeNet<T>::Decoder {
  std::vector<Sequential<T>> up;     // per level l < L-1: conv after upsampling
  std::vector<Sequential<T>> merge;  // per level l < L-1: conv + res after concat
  Sequential<T> head;
  std::vector<typename Tensor5<T>::Shape> below_shapes;
  std::vector<int> skip_channels;

  Tensor5<T> forward(const std::vector<Tensor5<T>>& feats) {
    const int L = static_cast<int>(feats.size());
    below_shapes.assign(feats.size(), {});
    skip_channels.assign(feats.size(), 0);
    Tensor5<T> cur = feats.back();
    for (int l = L - 2; l >= 0; --l) {
      below_shapes[l] = cur.shape();
      const auto& skip = feats[l];
      Tensor5<T> u = upsample_nearest(cur, {skip.d(), skip.h(), skip.w()});
      u = up[l].forward(u);
      skip_channels[l] = u.c();
      cur = merge[l].forward(concat_channels(u, skip));
    }
    return head.forward(cur);
  }

  std::vector<Tensor5<T>> backward(const Tensor5<T>& grad_logits) {
    const int L = static_cast<int>(below_shapes.size());
    std::vector<Tensor5<T>> grads(below_shapes.size());
    Tensor5<T> g = head.backward(grad_logits);
    for (int l = 0; l <= L - 2; ++l) {
      auto [g_up, g_skip] = split_channels(merge[l].backward(g), skip_channels[l]);
      grads[l] = std::move(g_skip);
      g = upsample_nearest_backward(up[l].backward(g_up), below_shapes[l]);
    }
    grads[L - 1] = std::move(g);
    return grads;
  }

  void collect(std::vector<ParamView<T>>* params, std::vector<ParamView<T>>* grads) {
    for (std::size_t l = up.size(); l-- > 0;) {
      up[l].collect("dec" + std::to_string(l) + ".up", params, grads);
      merge[l].collect("dec" + std::to_string(l) + ".merge", params, grads);
    }
    head.collect("head", params, grads);
  }
};

template <typename T>
EdgeNet<T>::EdgeNet(const NetworkConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const int c = config_.base_channels;
  const int L = config_.levels;
  const int half_s = (c + 1) / 2;
  const int half_e = c - half_s;

  auto make_branch = [&](Stream& s, int c_in, int width) {
    s.has_branch = true;
    s.branch.add(conv<T>(c_in, width, 3, 2, 1, true, rng));
    s.branch.add(conv<T>(width, width, 3, 2, 1, true, rng));
  };
  auto make_encoder = [&](Stream& s, int width) {
    s.levels.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      const int w = width << l;
      if (l > 0) s.levels[l].add(conv<T>(w / 2, w, 3, 2, 1, true, rng));
      if (l == L - 1) {
        for (int d : config_.bottleneck_dilations) s.levels[l].add(res<T>(w, d, rng));
      } else {
        s.levels[l].add(res<T>(w, 1, rng));
      }
    }
  };

  switch (config_.fusion) {
    case FusionScheme::kEarly: {
      auto s = std::make_unique<Stream>();
      make_branch(*s, 2, c);
      make_encoder(*s, c);
      streams_.push_back(std::move(s));
      split_ = {2};
      stream_width_ = {c};
      break;
    }
    case FusionScheme::kMiddle: {
      auto surface = std::make_unique<Stream>();
      auto edge = std::make_unique<Stream>();
      auto trunk = std::make_unique<Stream>();
      make_branch(*surface, 1, half_s);
      make_branch(*edge, 1, half_e);
      make_encoder(*trunk, c);
      streams_.push_back(std::move(surface));
      streams_.push_back(std::move(edge));
      streams_.push_back(std::move(trunk));
      split_ = {1, 1};
      stream_width_ = {half_s, half_e, c};
      break;
    }
    case FusionScheme::kLate: {
      auto surface = std::make_unique<Stream>();
      auto edge = std::make_unique<Stream>();
      make_branch(*surface, 1, half_s);
      make_encoder(*surface, half_s);
      make_branch(*edge, 1, half_e);
      make_encoder(*edge, half_e);
      streams_.push_back(std::move(surface));
      streams_.push_back(std::move(edge));
      split_ = {1, 1};
      stream_width_ = {half_s, half_e};
      break;
    }
  }

  decoder_ = std::make_unique<Decoder>();
  decoder_->up.resize(static_cast<std::size_t>(std::max(0, L - 1)));
  decoder_->merge.resize(decoder_->up.size());
  for (int l = L - 2; l >= 0; --l) {
    const int w = c << l;
    decoder_->up[l].add(conv<T>(2 * w, w, 3, 1, 1, true, rng));
    decoder_->merge[l].add(conv<T>(2 * w, w, 3, 1, 1, true, rng));
    decoder_->merge[l].add(res<T>(w, 1, rng));
  }
  if (config_.zero_init_head) {
    decoder_->head.add(std::make_unique<ConvModule<T>>(
        Conv3Params<T>::zeros(c, config_.class_count, 1), false));
  } else {
    decoder_->head.add(conv<T>(c, config_.class_count, 1, 1, 0, false, rng));
  }
}

template <typename T>
EdgeNet<T>::~EdgeNet() = default;
template <typename T>
EdgeNet<T>::EdgeNet(EdgeNet&&) noexcept = default;
template <typename T>
EdgeNet<T>& EdgeNet<T>::operator=(EdgeNet&&) noexcept = default;

template <typename T>
Tensor5<T> EdgeNet<T>::forward(const Tensor5<T>& x) {
  const auto& in = config_.input_dims;
  if (x.c() != 2 || x.d() != in[0] || x.h() != in[1] || x.w() != in[2]) {
    throw std::invalid_argument("edgenet: input " + shape_string(x.shape()) +
                                " does not match configured (n, 2, " +
                                std::to_string(in[0]) + ", " + std::to_string(in[1]) +
                                ", " + std::to_string(in[2]) + ")");
  }
  std::vector<Tensor5<T>> feats;
  switch (config_.fusion) {
    case FusionScheme::kEarly:
      feats = streams_[0]->forward(x);
      break;
    case FusionScheme::kMiddle: {
      auto [surface, edge] = split_channels(x, 1);
      Tensor5<T> a = streams_[0]->forward(surface).front();
      Tensor5<T> b = streams_[1]->forward(edge).front();
      feats = streams_[2]->forward(concat_channels(a, b));
      break;
    }
    case FusionScheme::kLate: {
      auto [surface, edge] = split_channels(x, 1);
      auto a = streams_[0]->forward(surface);
      auto b = streams_[1]->forward(edge);
      for (std::size_t l = 0; l < a.size(); ++l) {
        feats.push_back(concat_channels(a[l], b[l]));
      }
      break;
    }
  }
  return decoder_->forward(feats);
}

template <typename T>
void EdgeNet<T>::backward(const Tensor5<T>& grad_logits) {
  std::vector<Tensor5<T>> grads = decoder_->backward(grad_logits);
  switch (config_.fusion) {
    case FusionScheme::kEarly:
      streams_[0]->backward(std::move(grads), nullptr);
      break;
    case FusionScheme::kMiddle: {
      Tensor5<T> g;
      streams_[2]->backward(std::move(grads), &g);
      auto [ga, gb] = split_channels(g, stream_width_[0]);
      streams_[0]->backward({std::move(ga)}, nullptr);
      streams_[1]->backward({std::move(gb)}, nullptr);
      break;
    }
    case FusionScheme::kLate: {
      std::vector<Tensor5<T>> ga;
      std::vector<Tensor5<T>> gb;
      for (std::size_t l = 0; l < grads.size(); ++l) {
        auto [a, b] = split_channels(grads[l], stream_width_[0] << l);
        ga.push_back(std::move(a));
        gb.push_back(std::move(b));
      }
      streams_[0]->backward(std::move(ga), nullptr);
      streams_[1]->backward(std::move(gb), nullptr);
      break;
    }
  }
}

template <typename T>
std::vector<ParamView<T>> EdgeNet<T>::parameters() {
  std::vector<ParamView<T>> out;
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    streams_[i]->collect("stream" + std::to_string(i), &out, nullptr);
  }
  decoder_->collect(&out, nullptr);
  return out;
}

template <typename T>
std::vector<ParamView<const T>> EdgeNet<T>::parameters() const {
  std::vector<ParamView<const T>> out;
  for (auto& p : const_cast<EdgeNet*>(this)->parameters()) {
    out.push_back({p.name, p.shape, std::span<const T>(p.values)});
  }
  return out;
}

template <typename T>
std::vector<ParamView<T>> EdgeNet<T>::gradients() {
  std::vector<ParamView<T>> out;
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    streams_[i]->collect("stream" + std::to_string(i), nullptr, &out);
  }
  decoder_->collect(nullptr, &out);
  return out;
}

template <typename T>
std::size_t EdgeNet<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.values.size();
  return n;
}

template <typename T>
std::vector<int> EdgeNet<T>::level_channels() const {
  std::vector<int> out;
  for (int l = 0; l < config_.levels; ++l) {
    int total = 0;
    if (config_.fusion == FusionScheme::kLate) {
      for (int w : stream_width_) total += w << l;
    } else {
      total = config_.base_channels << l;
    }
    out.push_back(total);
  }
  return out;
}

template class EdgeNet<float>;
template class EdgeNet<double>;

}  // namespace voxelforge
