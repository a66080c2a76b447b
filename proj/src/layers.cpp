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

#include "voxelforge/layers.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "voxelforge/parallel.hpp"

namespace voxelforge {

std::string shape_string(const std::array<int, 5>& s) {
  std::ostringstream os;
  os << "(" << s[0] << ", " << s[1] << ", " << s[2] << ", " << s[3] << ", " << s[4]
     << ")";
  return os.str();
}

namespace {

// Output positions o in [lo, hi) whose input index o * stride + offset lies
// inside [0, n).
struct Span1 {
  int lo = 0;
  int hi = 0;
};

Span1 valid_span(int out_len, int in_len, int offset, int stride) {
  Span1 s;
  s.lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  const int last = in_len - 1 - offset;
  s.hi = last < 0 ? 0 : std::min(out_len, last / stride + 1);
  if (s.hi < s.lo) s.hi = s.lo;
  return s;
}

struct AxisPlan {
  std::vector<Span1> spans;   // per kernel tap
  std::vector<int> offsets;   // per kernel tap
};

AxisPlan plan_axis(int out_len, int in_len, int kernel, int stride, int dilation,
                   int padding) {
  AxisPlan plan;
  for (int k = 0; k < kernel; ++k) {
    const int off = k * dilation - padding;
    plan.offsets.push_back(off);
    plan.spans.push_back(valid_span(out_len, in_len, off, stride));
  }
  return plan;
}

template <typename T>
void check_conv_input(const Tensor5<T>& x, const Conv3Params<T>& p) {
  p.validate();
  if (x.c() != p.c_in()) {
    throw std::invalid_argument("conv3d: input has " + std::to_string(x.c()) +
                                " channels, kernel expects " +
                                std::to_string(p.c_in()));
  }
}

}  // namespace

template <typename T>
Conv3Params<T> Conv3Params<T>::zeros(int c_in, int c_out, int kernel, int stride,
                                     int dilation, int padding) {
  Conv3Params<T> p;
  p.weights = Tensor5<T>({c_out, c_in, kernel, kernel, kernel}, T(0));
  p.bias.assign(static_cast<std::size_t>(c_out), T(0));
  p.stride = stride;
  p.dilation = dilation;
  p.padding = padding;
  p.validate();
  return p;
}

template <typename T>
Conv3Params<T> Conv3Params<T>::he_normal(int c_in, int c_out, int kernel,
                                         std::mt19937_64& rng, int stride,
                                         int dilation, int padding) {
  Conv3Params<T> p = zeros(c_in, c_out, kernel, stride, dilation, padding);
  const double fan_in = static_cast<double>(c_in) * kernel * kernel * kernel;
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
  for (T& w : p.weights.values()) w = static_cast<T>(dist(rng));
  return p;
}

template <typename T>
void Conv3Params<T>::validate() const {
  if (weights.n() <= 0 || weights.c() <= 0 || weights.d() <= 0) {
    throw std::invalid_argument("conv3d: empty kernel");
  }
  if (weights.d() != weights.h() || weights.d() != weights.w()) {
    throw std::invalid_argument("conv3d: kernel must be cubic");
  }
  if (bias.size() != static_cast<std::size_t>(weights.n())) {
    throw std::invalid_argument("conv3d: bias length differs from c_out");
  }
  if (stride <= 0 || dilation <= 0 || padding < 0) {
    throw std::invalid_argument("conv3d: stride and dilation must be positive");
  }
}

template <typename T>
std::array<int, 3> Conv3Params<T>::output_dims(const std::array<int, 3>& in) const {
  std::array<int, 3> out{};
  for (int a = 0; a < 3; ++a) {
    const int span = in[a] + 2 * padding - dilation * (kernel() - 1) - 1;
    out[a] = span < 0 ? 0 : span / stride + 1;
  }
  return out;
}

template <typename T>
Tensor5<T> conv3d_forward(const Tensor5<T>& x, const Conv3Params<T>& p) {
  check_conv_input(x, p);
  const auto od = p.output_dims({x.d(), x.h(), x.w()});
  if (od[0] <= 0 || od[1] <= 0 || od[2] <= 0) {
    throw std::invalid_argument("conv3d: input smaller than the dilated kernel");
  }
  const int K = p.kernel();
  const int s = p.stride;
  const AxisPlan pd = plan_axis(od[0], x.d(), K, s, p.dilation, p.padding);
  const AxisPlan ph = plan_axis(od[1], x.h(), K, s, p.dilation, p.padding);
  const AxisPlan pw = plan_axis(od[2], x.w(), K, s, p.dilation, p.padding);
  const int H = x.h();
  const int W = x.w();
  const int OH = od[1];
  const int OW = od[2];

  Tensor5<T> out({x.n(), p.c_out(), od[0], od[1], od[2]});
  const int c_out = p.c_out();
  const std::size_t out_spatial = out.spatial();
  parallel_for(0, static_cast<std::size_t>(x.n()) * c_out, [&](std::size_t job) {
    const int n = static_cast<int>(job / c_out);
    const int co = static_cast<int>(job % c_out);
    T* o = out.slab(n, co);
    std::fill(o, o + out_spatial, p.bias[co]);
    for (int ci = 0; ci < p.c_in(); ++ci) {
      const T* in = x.slab(n, ci);
      const T* wk = &p.weights(co, ci, 0, 0, 0);
      for (int kd = 0; kd < K; ++kd) {
        const Span1 sd = pd.spans[kd];
        for (int kh = 0; kh < K; ++kh) {
          const Span1 sh = ph.spans[kh];
          for (int kw = 0; kw < K; ++kw) {
            const Span1 sw = pw.spans[kw];
            if (sw.lo >= sw.hi) continue;
            const T wv = wk[(kd * K + kh) * K + kw];
            for (int zo = sd.lo; zo < sd.hi; ++zo) {
              const int zi = zo * s + pd.offsets[kd];
              for (int yo = sh.lo; yo < sh.hi; ++yo) {
                const int yi = yo * s + ph.offsets[kh];
                T* orow = o + (static_cast<std::size_t>(zo) * OH + yo) * OW;
                const T* irow =
                    in + (static_cast<std::size_t>(zi) * H + yi) * W + pw.offsets[kw];
                if (s == 1) {
                  for (int xo = sw.lo; xo < sw.hi; ++xo) orow[xo] += wv * irow[xo];
                } else {
                  for (int xo = sw.lo; xo < sw.hi; ++xo) orow[xo] += wv * irow[xo * s];
                }
              }
            }
          }
        }
      }
    }
  });
  return out;
}

template <typename T>
Conv3Grads<T> conv3d_backward(const Tensor5<T>& x, const Conv3Params<T>& p,
                              const Tensor5<T>& grad_out, bool need_grad_x) {
  check_conv_input(x, p);
  const auto od = p.output_dims({x.d(), x.h(), x.w()});
  const typename Tensor5<T>::Shape expected{x.n(), p.c_out(), od[0], od[1], od[2]};
  if (grad_out.shape() != expected) {
    throw std::invalid_argument("conv3d_backward: grad_out shape " +
                                shape_string(grad_out.shape()) + ", expected " +
                                shape_string(expected));
  }
  const int K = p.kernel();
  const int s = p.stride;
  const AxisPlan pd = plan_axis(od[0], x.d(), K, s, p.dilation, p.padding);
  const AxisPlan ph = plan_axis(od[1], x.h(), K, s, p.dilation, p.padding);
  const AxisPlan pw = plan_axis(od[2], x.w(), K, s, p.dilation, p.padding);
  const int H = x.h();
  const int W = x.w();
  const int OH = od[1];
  const int OW = od[2];
  const int c_in = p.c_in();
  const int c_out = p.c_out();
  const int N = x.n();
  const std::size_t out_spatial = grad_out.spatial();

  Conv3Grads<T> g;
  g.grad_w = Tensor5<T>(p.weights.shape(), T(0));
  g.grad_b.assign(static_cast<std::size_t>(c_out), T(0));

  parallel_for(0, static_cast<std::size_t>(c_out), [&](std::size_t job) {
    const int co = static_cast<int>(job);
    T bias_acc = 0;
    for (int n = 0; n < N; ++n) {
      const T* go = grad_out.slab(n, co);
      for (std::size_t i = 0; i < out_spatial; ++i) bias_acc += go[i];
      for (int ci = 0; ci < c_in; ++ci) {
        const T* in = x.slab(n, ci);
        T* gw = &g.grad_w(co, ci, 0, 0, 0);
        for (int kd = 0; kd < K; ++kd) {
          const Span1 sd = pd.spans[kd];
          for (int kh = 0; kh < K; ++kh) {
            const Span1 sh = ph.spans[kh];
            for (int kw = 0; kw < K; ++kw) {
              const Span1 sw = pw.spans[kw];
              if (sw.lo >= sw.hi) continue;
              T acc = 0;
              for (int zo = sd.lo; zo < sd.hi; ++zo) {
                const int zi = zo * s + pd.offsets[kd];
                for (int yo = sh.lo; yo < sh.hi; ++yo) {
                  const int yi = yo * s + ph.offsets[kh];
                  const T* grow = go + (static_cast<std::size_t>(zo) * OH + yo) * OW;
                  const T* irow =
                      in + (static_cast<std::size_t>(zi) * H + yi) * W + pw.offsets[kw];
                  if (s == 1) {
                    for (int xo = sw.lo; xo < sw.hi; ++xo) acc += grow[xo] * irow[xo];
                  } else {
                    for (int xo = sw.lo; xo < sw.hi; ++xo) acc += grow[xo] * irow[xo * s];
                  }
                }
              }
              gw[(kd * K + kh) * K + kw] += acc;
            }
          }
        }
      }
    }
    g.grad_b[co] = bias_acc;
  });

  if (!need_grad_x) return g;

  g.grad_x = Tensor5<T>(x.shape(), T(0));
  parallel_for(0, static_cast<std::size_t>(N) * c_in, [&](std::size_t job) {
    const int n = static_cast<int>(job / c_in);
    const int ci = static_cast<int>(job % c_in);
    T* gx = g.grad_x.slab(n, ci);
    for (int co = 0; co < c_out; ++co) {
      const T* go = grad_out.slab(n, co);
      const T* wk = &p.weights(co, ci, 0, 0, 0);
      for (int kd = 0; kd < K; ++kd) {
        const Span1 sd = pd.spans[kd];
        for (int kh = 0; kh < K; ++kh) {
          const Span1 sh = ph.spans[kh];
          for (int kw = 0; kw < K; ++kw) {
            const Span1 sw = pw.spans[kw];
            if (sw.lo >= sw.hi) continue;
            const T wv = wk[(kd * K + kh) * K + kw];
            for (int zo = sd.lo; zo < sd.hi; ++zo) {
              const int zi = zo * s + pd.offsets[kd];
              for (int yo = sh.lo; yo < sh.hi; ++yo) {
                const int yi = yo * s + ph.offsets[kh];
                const T* grow = go + (static_cast<std::size_t>(zo) * OH + yo) * OW;
                T* xrow = gx + (static_cast<std::size_t>(zi) * H + yi) * W + pw.offsets[kw];
                if (s == 1) {
                  for (int xo = sw.lo; xo < sw.hi; ++xo) xrow[xo] += wv * grow[xo];
                } else {
                  for (int xo = sw.lo; xo < sw.hi; ++xo) xrow[xo * s] += wv * grow[xo];
                }
              }
            }
          }
        }
      }
    }
  });
  return g;
}

template <typename T>
Tensor5<T> relu_forward(const Tensor5<T>& x) {
  Tensor5<T> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
  return out;
}

template <typename T>
Tensor5<T> relu_backward(const Tensor5<T>& pre_activation, const Tensor5<T>& grad_out) {
  require_same_shape(pre_activation, grad_out, "relu_backward");
  Tensor5<T> out(grad_out.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = pre_activation[i] > T(0) ? grad_out[i] : T(0);
  }
  return out;
}

template <typename T>
Tensor5<T> upsample_nearest(const Tensor5<T>& x, const std::array<int, 3>& dims) {
  for (int a = 0; a < 3; ++a) {
    const int in = x.shape()[2 + a];
    if (dims[a] <= 0 || dims[a] > 2 * in) {
      throw std::invalid_argument("upsample_nearest: target must be in (0, 2 * input]");
    }
  }
  Tensor5<T> out({x.n(), x.c(), dims[0], dims[1], dims[2]});
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < x.c(); ++c) {
      for (int z = 0; z < dims[0]; ++z) {
        const int zs = std::min(z / 2, x.d() - 1);
        for (int y = 0; y < dims[1]; ++y) {
          const int ys = std::min(y / 2, x.h() - 1);
          for (int w = 0; w < dims[2]; ++w) {
            out(n, c, z, y, w) = x(n, c, zs, ys, std::min(w / 2, x.w() - 1));
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor5<T> upsample_nearest_backward(const Tensor5<T>& grad_out,
                                     const typename Tensor5<T>::Shape& in_shape) {
  if (grad_out.n() != in_shape[0] || grad_out.c() != in_shape[1]) {
    throw std::invalid_argument("upsample_nearest_backward: batch/channel mismatch");
  }
  Tensor5<T> g(in_shape, T(0));
  for (int n = 0; n < grad_out.n(); ++n) {
    for (int c = 0; c < grad_out.c(); ++c) {
      for (int z = 0; z < grad_out.d(); ++z) {
        const int zs = std::min(z / 2, g.d() - 1);
        for (int y = 0; y < grad_out.h(); ++y) {
          const int ys = std::min(y / 2, g.h() - 1);
          for (int w = 0; w < grad_out.w(); ++w) {
            g(n, c, zs, ys, std::min(w / 2, g.w() - 1)) += grad_out(n, c, z, y, w);
          }
        }
      }
    }
  }
  return g;
}

template <typename T>
Tensor5<T> concat_channels(const Tensor5<T>& a, const Tensor5<T>& b) {
  if (a.n() != b.n() || a.d() != b.d() || a.h() != b.h() || a.w() != b.w()) {
    throw std::invalid_argument("concat_channels: incompatible shapes " +
                                shape_string(a.shape()) + " and " +
                                shape_string(b.shape()));
  }
  Tensor5<T> out({a.n(), a.c() + b.c(), a.d(), a.h(), a.w()});
  const std::size_t sp = a.spatial();
  for (int n = 0; n < a.n(); ++n) {
    for (int c = 0; c < a.c(); ++c) std::copy_n(a.slab(n, c), sp, out.slab(n, c));
    for (int c = 0; c < b.c(); ++c) {
      std::copy_n(b.slab(n, c), sp, out.slab(n, a.c() + c));
    }
  }
  return out;
}

template <typename T>
std::pair<Tensor5<T>, Tensor5<T>> split_channels(const Tensor5<T>& x, int channels_a) {
  if (channels_a < 0 || channels_a > x.c()) {
    throw std::invalid_argument("split_channels: split point out of range");
  }
  Tensor5<T> a({x.n(), channels_a, x.d(), x.h(), x.w()});
  Tensor5<T> b({x.n(), x.c() - channels_a, x.d(), x.h(), x.w()});
  const std::size_t sp = x.spatial();
  for (int n = 0; n < x.n(); ++n) {
    for (int c = 0; c < a.c(); ++c) std::copy_n(x.slab(n, c), sp, a.slab(n, c));
    for (int c = 0; c < b.c(); ++c) std::copy_n(x.slab(n, channels_a + c), sp, b.slab(n, c));
  }
  return {std::move(a), std::move(b)};
}

template <typename T>
Tensor5<T> softmax_channels(const Tensor5<T>& logits) {
  Tensor5<T> out(logits.shape());
  const std::size_t sp = logits.spatial();
  const int C = logits.c();
  for (int n = 0; n < logits.n(); ++n) {
    for (std::size_t i = 0; i < sp; ++i) {
      T max_v = -std::numeric_limits<T>::infinity();
      for (int c = 0; c < C; ++c) max_v = std::max(max_v, logits.slab(n, c)[i]);
      T sum = 0;
      for (int c = 0; c < C; ++c) {
        const T e = std::exp(logits.slab(n, c)[i] - max_v);
        out.slab(n, c)[i] = e;
        sum += e;
      }
      for (int c = 0; c < C; ++c) out.slab(n, c)[i] /= sum;
    }
  }
  return out;
}

template <typename T>
CceResult<T> weighted_cce(const Tensor5<T>& p, const Tensor5<T>& y, const Tensor5<T>& w) {
  require_same_shape(p, y, "weighted_cce");
  if (w.n() != p.n() || w.c() != 1 || w.d() != p.d() || w.h() != p.h() ||
      w.w() != p.w()) {
    throw std::invalid_argument("weighted_cce: weight shape must be (n, 1, d, h, w)");
  }
  CceResult<T> r;
  r.grad_logits = Tensor5<T>(p.shape(), T(0));
  const std::size_t sp = p.spatial();
  const int C = p.c();
  for (int n = 0; n < p.n(); ++n) {
    const T* wn = w.slab(n, 0);
    for (std::size_t i = 0; i < sp; ++i) {
      double total = 0.0;
      for (int c = 0; c < C; ++c) {
        const T pv = p.slab(n, c)[i];
        if (!(pv >= T(0))) throw std::invalid_argument("weighted_cce: negative probability");
        total += pv;
      }
      if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("weighted_cce: probabilities do not sum to 1");
      }
      const T wv = wn[i];
      r.weight_sum += wv;
      if (wv == T(0)) continue;
      // Unlabeled voxels have y = 0 and contribute neither loss nor gradient.
      T ysum = T(0);
      for (int c = 0; c < C; ++c) ysum += y.slab(n, c)[i];
      for (int c = 0; c < C; ++c) {
        const T yv = y.slab(n, c)[i];
        const T pv = p.slab(n, c)[i];
        if (yv != T(0)) r.loss -= static_cast<double>(wv) * yv * std::log(static_cast<double>(pv));
        r.grad_logits.slab(n, c)[i] = wv * (pv * ysum - yv);
      }
    }
  }
  return r;
}

template <typename T>
Tensor5<T> one_hot(const Tensor5<std::uint8_t>& labels, int classes) {
  if (labels.c() != 1) throw std::invalid_argument("one_hot: labels need one channel");
  Tensor5<T> out({labels.n(), classes, labels.d(), labels.h(), labels.w()}, T(0));
  const std::size_t sp = labels.spatial();
  for (int n = 0; n < labels.n(); ++n) {
    const std::uint8_t* l = labels.slab(n, 0);
    for (std::size_t i = 0; i < sp; ++i) {
      if (l[i] == 255) continue;
      if (l[i] >= classes) throw std::invalid_argument("one_hot: label out of range");
      out.slab(n, l[i])[i] = T(1);
    }
  }
  return out;
}

template <typename T>
ResBlockParams<T> resnet_block_params(int channels, int dilation, std::mt19937_64& rng) {
  ResBlockParams<T> p;
  p.first = Conv3Params<T>::he_normal(channels, channels, 3, rng, 1, dilation, dilation);
  p.second = Conv3Params<T>::he_normal(channels, channels, 3, rng, 1, dilation, dilation);
  return p;
}

template <typename T>
Tensor5<T> resnet_block_forward(const Tensor5<T>& x, const ResBlockParams<T>& p,
                                ResBlockCache<T>* cache) {
  if (p.first.c_in() != x.c() || p.first.c_out() != x.c() ||
      p.second.c_in() != x.c() || p.second.c_out() != x.c()) {
    throw std::invalid_argument("resnet_block: channel mismatch");
  }
  Tensor5<T> pre_first = conv3d_forward(x, p.first);
  Tensor5<T> act_first = relu_forward(pre_first);
  Tensor5<T> sum = conv3d_forward(act_first, p.second);
  require_same_shape(sum, x, "resnet_block");
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i];
  Tensor5<T> out = relu_forward(sum);
  if (cache) {
    cache->input = x;
    cache->pre_first = std::move(pre_first);
    cache->act_first = std::move(act_first);
    cache->sum = std::move(sum);
  }
  return out;
}

template <typename T>
ResBlockGrads<T> resnet_block_backward(const ResBlockCache<T>& cache,
                                       const ResBlockParams<T>& p,
                                       const Tensor5<T>& grad_out) {
  ResBlockGrads<T> g;
  const Tensor5<T> grad_sum = relu_backward(cache.sum, grad_out);
  g.second = conv3d_backward(cache.act_first, p.second, grad_sum);
  const Tensor5<T> grad_pre_first = relu_backward(cache.pre_first, g.second.grad_x);
  g.first = conv3d_backward(cache.input, p.first, grad_pre_first);
  g.grad_x = g.first.grad_x;
  for (std::size_t i = 0; i < g.grad_x.size(); ++i) g.grad_x[i] += grad_sum[i];
  return g;
}

#define VOXELFORGE_INSTANTIATE_LAYERS(T)                                              \
  template struct Conv3Params<T>;                                                    \
  template Tensor5<T> conv3d_forward(const Tensor5<T>&, const Conv3Params<T>&);       \
  template Conv3Grads<T> conv3d_backward(const Tensor5<T>&, const Conv3Params<T>&,    \
                                         const Tensor5<T>&, bool);                    \
  template Tensor5<T> relu_forward(const Tensor5<T>&);                                \
  template Tensor5<T> relu_backward(const Tensor5<T>&, const Tensor5<T>&);            \
  template Tensor5<T> upsample_nearest(const Tensor5<T>&, const std::array<int, 3>&); \
  template Tensor5<T> upsample_nearest_backward(const Tensor5<T>&,                    \
                                                const Tensor5<T>::Shape&);            \
  template Tensor5<T> concat_channels(const Tensor5<T>&, const Tensor5<T>&);          \
  template std::pair<Tensor5<T>, Tensor5<T>> split_channels(const Tensor5<T>&, int);  \
  template Tensor5<T> softmax_channels(const Tensor5<T>&);                            \
  template CceResult<T> weighted_cce(const Tensor5<T>&, const Tensor5<T>&,            \
                                     const Tensor5<T>&);                              \
  template Tensor5<T> one_hot(const Tensor5<std::uint8_t>&, int);                     \
  template ResBlockParams<T> resnet_block_params(int, int, std::mt19937_64&);          \
  template Tensor5<T> resnet_block_forward(const Tensor5<T>&, const ResBlockParams<T>&, \
                                           ResBlockCache<T>*);                         \
  template ResBlockGrads<T> resnet_block_backward(const ResBlockCache<T>&,            \
                                                  const ResBlockParams<T>&,           \
                                                  const Tensor5<T>&);

VOXELFORGE_INSTANTIATE_LAYERS(float)
VOXELFORGE_INSTANTIATE_LAYERS(double)

#undef VOXELFORGE_INSTANTIATE_LAYERS

}  // namespace voxelforge
