#pragma once

// The weight-shared embedding CNN f(x): conv (valid, stride 1) -> ReLU ->
// max-pool per block, global average pool over time, dense projection, and
// optional L2 normalization. Templated on the scalar type: float for
// training/inference builds, double for gradient-check tests. The same
// parameter set evaluates every leg of a triplet; weight sharing is the
// evaluation convention, not a copy.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/cycles.hpp"
#include "heartsiam/rng.hpp"

namespace heartsiam {

struct ConvSpec {
  int out_channels = 0;
  int kernel = 0;
  int pool = 1;
};

struct ArchConfig {
  int in_channels = static_cast<int>(kCycleBands);
  int in_length = static_cast<int>(kCycleLength);
  std::vector<ConvSpec> blocks = {{8, 5, 4}, {16, 5, 4}, {32, 5, 4}};
  int embedding_dim = 64;
  bool l2_normalize = true;

  void validate() const {
    if (in_channels < 1 || in_length < 1) throw ConfigError("arch: bad input shape");
    if (embedding_dim < 2) throw ConfigError("arch: embedding_dim must be at least 2");
    if (blocks.empty()) throw ConfigError("arch: at least one conv block required");
    int len = in_length;
    for (const auto& b : blocks) {
      if (b.kernel < 1 || b.kernel % 2 == 0) throw ConfigError("arch: kernel must be odd");
      if (b.pool < 1) throw ConfigError("arch: pool must be >= 1");
      if (b.out_channels < 1) throw ConfigError("arch: out_channels must be >= 1");
      len = len - b.kernel + 1;
      if (len < 1) throw ConfigError("arch: conv output collapses to zero length");
      len /= b.pool;
      if (len < 1) throw ConfigError("arch: pool output collapses to zero length");
    }
  }

  std::vector<int> block_output_lengths() const {
    std::vector<int> lens;
    int len = in_length;
    for (const auto& b : blocks) {
      len = (len - b.kernel + 1) / b.pool;
      lens.push_back(len);
    }
    return lens;
  }

  std::size_t parameter_count() const {
    std::size_t count = 0;
    int in_ch = in_channels;
    for (const auto& b : blocks) {
      count += static_cast<std::size_t>(b.out_channels) * in_ch * b.kernel + b.out_channels;
      in_ch = b.out_channels;
    }
    count += static_cast<std::size_t>(embedding_dim) * in_ch + embedding_dim;
    return count;
  }
};

template <typename T>
struct NetParams {
  ArchConfig arch;
  // conv_w[b]: [out_ch, in_ch, kernel] row-major; dense_w: [dim, last_ch]
  std::vector<std::vector<T>> conv_w;
  std::vector<std::vector<T>> conv_b;
  std::vector<T> dense_w;
  std::vector<T> dense_b;

  static NetParams zeros_like(const ArchConfig& arch) {
    NetParams p;
    p.arch = arch;
    int in_ch = arch.in_channels;
    for (const auto& b : arch.blocks) {
      p.conv_w.emplace_back(static_cast<std::size_t>(b.out_channels) * in_ch * b.kernel, T(0));
      p.conv_b.emplace_back(static_cast<std::size_t>(b.out_channels), T(0));
      in_ch = b.out_channels;
    }
    p.dense_w.assign(static_cast<std::size_t>(arch.embedding_dim) * in_ch, T(0));
    p.dense_b.assign(static_cast<std::size_t>(arch.embedding_dim), T(0));
    return p;
  }

  template <typename F>
  void for_each_tensor(F&& f) {
    for (std::size_t b = 0; b < conv_w.size(); ++b) {
      f("conv" + std::to_string(b) + ".weight", conv_w[b]);
      f("conv" + std::to_string(b) + ".bias", conv_b[b]);
    }
    f(std::string("dense.weight"), dense_w);
    f(std::string("dense.bias"), dense_b);
  }

  template <typename F>
  void for_each_tensor(F&& f) const {
    for (std::size_t b = 0; b < conv_w.size(); ++b) {
      f("conv" + std::to_string(b) + ".weight", conv_w[b]);
      f("conv" + std::to_string(b) + ".bias", conv_b[b]);
    }
    f(std::string("dense.weight"), dense_w);
    f(std::string("dense.bias"), dense_b);
  }
};

template <typename T>
NetParams<T> init_params(const ArchConfig& arch, std::uint64_t seed) {
  arch.validate();
  NetParams<T> p = NetParams<T>::zeros_like(arch);
  int in_ch = arch.in_channels;
  for (std::size_t b = 0; b < arch.blocks.size(); ++b) {
    const auto& blk = arch.blocks[b];
    const double fan_in = static_cast<double>(in_ch) * blk.kernel;
    const double fan_out = static_cast<double>(blk.out_channels) * blk.kernel;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    rng::Counter r(rng::chain(rng::chain(seed, "init.conv"), b));
    for (auto& w : p.conv_w[b]) w = static_cast<T>(r.next_uniform(-limit, limit));
    in_ch = blk.out_channels;
  }
  {
    const double fan_in = in_ch;
    const double fan_out = arch.embedding_dim;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    rng::Counter r(rng::chain(seed, "init.dense"));
    for (auto& w : p.dense_w) w = static_cast<T>(r.next_uniform(-limit, limit));
  }
  return p;
}

// Intermediate activations kept for the backward pass.
template <typename T>
struct ForwardCache {
  std::vector<std::vector<T>> inputs;     // per block: input activation (ch x len)
  std::vector<std::vector<T>> conv_pre;   // per block: conv output before ReLU
  std::vector<std::vector<int>> argmax;   // per block: pool source index
  std::vector<T> gap;                     // global average pooled features
  std::vector<T> pre_norm;                // dense output before normalization
  T norm = T(0);
};

namespace detail {

template <typename T>
void conv_valid(const T* in, int in_ch, int in_len, const T* w, const T* bias, int out_ch,
                int kernel, T* out) {
  const int out_len = in_len - kernel + 1;
  for (int oc = 0; oc < out_ch; ++oc) {
    T* dst = out + static_cast<std::size_t>(oc) * out_len;
    for (int t = 0; t < out_len; ++t) dst[t] = bias[oc];
    for (int ic = 0; ic < in_ch; ++ic) {
      const T* src = in + static_cast<std::size_t>(ic) * in_len;
      const T* wrow = w + (static_cast<std::size_t>(oc) * in_ch + ic) * kernel;
      for (int j = 0; j < kernel; ++j) {
        const T wj = wrow[j];
        const T* s = src + j;
        for (int t = 0; t < out_len; ++t) dst[t] += wj * s[t];
      }
    }
  }
}

template <typename T>
void check_finite(const std::vector<T>& v, const char* where) {
  for (T x : v)
    if (!std::isfinite(static_cast<double>(x)))
      throw NumericError(std::string("non-finite activation in ") + where);
}

}  // namespace detail

// One branch evaluation. `cache` enables the backward pass; `check` scans
// each layer output for non-finite values and names the offending layer.
template <typename T>
std::vector<T> forward(const NetParams<T>& params, const T* input, ForwardCache<T>* cache = nullptr,
                       bool check = false) {
  const ArchConfig& arch = params.arch;
  int in_ch = arch.in_channels;
  int in_len = arch.in_length;
  std::vector<T> act(input, input + static_cast<std::size_t>(in_ch) * in_len);

  for (std::size_t b = 0; b < arch.blocks.size(); ++b) {
    const auto& blk = arch.blocks[b];
    const int conv_len = in_len - blk.kernel + 1;
    std::vector<T> conv_out(static_cast<std::size_t>(blk.out_channels) * conv_len);
    detail::conv_valid(act.data(), in_ch, in_len, params.conv_w[b].data(), params.conv_b[b].data(),
                       blk.out_channels, blk.kernel, conv_out.data());
    if (check) detail::check_finite(conv_out, ("conv block " + std::to_string(b)).c_str());
    if (cache) cache->conv_pre.push_back(conv_out);
    for (T& v : conv_out) v = v > T(0) ? v : T(0);

    const int pool_len = conv_len / blk.pool;
    std::vector<T> pooled(static_cast<std::size_t>(blk.out_channels) * pool_len);
    std::vector<int> argmax(cache ? pooled.size() : 0);
    for (int c = 0; c < blk.out_channels; ++c) {
      const T* src = conv_out.data() + static_cast<std::size_t>(c) * conv_len;
      T* dst = pooled.data() + static_cast<std::size_t>(c) * pool_len;
      for (int t = 0; t < pool_len; ++t) {
        int best = t * blk.pool;
        for (int j = 1; j < blk.pool; ++j)
          if (src[t * blk.pool + j] > src[best]) best = t * blk.pool + j;
        dst[t] = src[best];
        if (cache) argmax[static_cast<std::size_t>(c) * pool_len + t] = best;
      }
    }

    if (cache) {
      cache->inputs.push_back(std::move(act));
      cache->argmax.push_back(std::move(argmax));
    }
    act = std::move(pooled);
    in_ch = blk.out_channels;
    in_len = pool_len;
  }

  // global average pool over time
  std::vector<T> gap(static_cast<std::size_t>(in_ch));
  for (int c = 0; c < in_ch; ++c) {
    T acc = T(0);
    const T* src = act.data() + static_cast<std::size_t>(c) * in_len;
    for (int t = 0; t < in_len; ++t) acc += src[t];
    gap[static_cast<std::size_t>(c)] = acc / static_cast<T>(in_len);
  }

  std::vector<T> out(static_cast<std::size_t>(arch.embedding_dim));
  for (int d = 0; d < arch.embedding_dim; ++d) {
    T acc = params.dense_b[static_cast<std::size_t>(d)];
    const T* wrow = params.dense_w.data() + static_cast<std::size_t>(d) * in_ch;
    for (int c = 0; c < in_ch; ++c) acc += wrow[c] * gap[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(d)] = acc;
  }
  if (check) detail::check_finite(out, "dense layer");

  if (cache) {
    cache->gap = gap;
    cache->pre_norm = out;
  }

  if (arch.l2_normalize) {
    T norm_sq = T(0);
    for (T v : out) norm_sq += v * v;
    const T norm = std::sqrt(norm_sq);
    if (norm > T(0)) {
      for (T& v : out) v /= norm;
    } else {
      // normalize(0) convention: unit vector e1
      out.assign(out.size(), T(0));
      out[0] = T(1);
    }
    if (cache) cache->norm = norm;
  }
  return out;
}

template <typename T>
std::vector<T> forward(const NetParams<T>& params, const CycleSegment& segment) {
  if (params.arch.in_channels != static_cast<int>(kCycleBands) ||
      params.arch.in_length != static_cast<int>(kCycleLength) ||
      segment.data.size() != kCycleBands * kCycleLength)
    throw ConfigError("forward: segment shape does not match the architecture input");
  std::vector<T> input(segment.data.size());
  for (std::size_t i = 0; i < input.size(); ++i) input[i] = static_cast<T>(segment.data[i]);
  return forward(params, input.data());
}

// Accumulates parameter gradients for one branch evaluation into `grads`.
// d_embedding is the loss gradient w.r.t. the (possibly normalized) output.
template <typename T>
void backward(const NetParams<T>& params, const ForwardCache<T>& cache,
              const std::vector<T>& d_embedding, NetParams<T>& grads) {
  const ArchConfig& arch = params.arch;
  const int dim = arch.embedding_dim;
  const int last_ch = arch.blocks.back().out_channels;

  std::vector<T> d_pre(static_cast<std::size_t>(dim));
  if (arch.l2_normalize) {
    if (cache.norm > T(0)) {
      // y = v / r; dv = (dy - y (y . dy)) / r
      T dot = T(0);
      std::vector<T> y(static_cast<std::size_t>(dim));
      for (int d = 0; d < dim; ++d) {
        y[static_cast<std::size_t>(d)] = cache.pre_norm[static_cast<std::size_t>(d)] / cache.norm;
        dot += y[static_cast<std::size_t>(d)] * d_embedding[static_cast<std::size_t>(d)];
      }
      for (int d = 0; d < dim; ++d)
        d_pre[static_cast<std::size_t>(d)] =
            (d_embedding[static_cast<std::size_t>(d)] - y[static_cast<std::size_t>(d)] * dot) /
            cache.norm;
    } else {
      // constant e1 output: zero gradient
      std::fill(d_pre.begin(), d_pre.end(), T(0));
    }
  } else {
    d_pre = d_embedding;
  }

  // dense layer
  std::vector<T> d_gap(static_cast<std::size_t>(last_ch), T(0));
  for (int d = 0; d < dim; ++d) {
    const T g = d_pre[static_cast<std::size_t>(d)];
    grads.dense_b[static_cast<std::size_t>(d)] += g;
    T* wgrad = grads.dense_w.data() + static_cast<std::size_t>(d) * last_ch;
    const T* wrow = params.dense_w.data() + static_cast<std::size_t>(d) * last_ch;
    for (int c = 0; c < last_ch; ++c) {
      wgrad[c] += g * cache.gap[static_cast<std::size_t>(c)];
      d_gap[static_cast<std::size_t>(c)] += g * wrow[c];
    }
  }

  // global average pool
  const auto lens = arch.block_output_lengths();
  const int gap_len = lens.back();
  std::vector<T> d_act(static_cast<std::size_t>(last_ch) * gap_len);
  for (int c = 0; c < last_ch; ++c) {
    const T g = d_gap[static_cast<std::size_t>(c)] / static_cast<T>(gap_len);
    for (int t = 0; t < gap_len; ++t) d_act[static_cast<std::size_t>(c) * gap_len + t] = g;
  }

  // blocks in reverse
  int in_ch = arch.in_channels;
  std::vector<int> in_chs, in_lens;
  int len = arch.in_length;
  for (const auto& blk : arch.blocks) {
    in_chs.push_back(in_ch);
    in_lens.push_back(len);
    len = (len - blk.kernel + 1) / blk.pool;
    in_ch = blk.out_channels;
  }

  for (int b = static_cast<int>(arch.blocks.size()) - 1; b >= 0; --b) {
    const auto& blk = arch.blocks[static_cast<std::size_t>(b)];
    const int block_in_ch = in_chs[static_cast<std::size_t>(b)];
    const int block_in_len = in_lens[static_cast<std::size_t>(b)];
    const int conv_len = block_in_len - blk.kernel + 1;
    const int pool_len = conv_len / blk.pool;

    // unpool through the recorded argmax, then the ReLU mask
    std::vector<T> d_conv(static_cast<std::size_t>(blk.out_channels) * conv_len, T(0));
    const auto& argmax = cache.argmax[static_cast<std::size_t>(b)];
    for (int c = 0; c < blk.out_channels; ++c)
      for (int t = 0; t < pool_len; ++t)
        d_conv[static_cast<std::size_t>(c) * conv_len +
               argmax[static_cast<std::size_t>(c) * pool_len + t]] +=
            d_act[static_cast<std::size_t>(c) * pool_len + t];
    const auto& pre = cache.conv_pre[static_cast<std::size_t>(b)];
    for (std::size_t i = 0; i < d_conv.size(); ++i)
      if (pre[i] <= T(0)) d_conv[i] = T(0);

    const auto& input = cache.inputs[static_cast<std::size_t>(b)];
    auto& wgrad = grads.conv_w[static_cast<std::size_t>(b)];
    auto& bgrad = grads.conv_b[static_cast<std::size_t>(b)];
    const auto& w = params.conv_w[static_cast<std::size_t>(b)];

    std::vector<T> d_input;
    if (b > 0) d_input.assign(static_cast<std::size_t>(block_in_ch) * block_in_len, T(0));

    for (int oc = 0; oc < blk.out_channels; ++oc) {
      const T* dout = d_conv.data() + static_cast<std::size_t>(oc) * conv_len;
      T bacc = T(0);
      for (int t = 0; t < conv_len; ++t) bacc += dout[t];
      bgrad[static_cast<std::size_t>(oc)] += bacc;
      for (int ic = 0; ic < block_in_ch; ++ic) {
        const T* src = input.data() + static_cast<std::size_t>(ic) * block_in_len;
        T* wg = wgrad.data() + (static_cast<std::size_t>(oc) * block_in_ch + ic) * blk.kernel;
        for (int j = 0; j < blk.kernel; ++j) {
          T acc = T(0);
          const T* s = src + j;
          for (int t = 0; t < conv_len; ++t) acc += s[t] * dout[t];
          wg[j] += acc;
        }
        if (b > 0) {
          const T* wrow = w.data() + (static_cast<std::size_t>(oc) * block_in_ch + ic) * blk.kernel;
          T* din = d_input.data() + static_cast<std::size_t>(ic) * block_in_len;
          for (int j = 0; j < blk.kernel; ++j) {
            const T wj = wrow[j];
            T* d = din + j;
            for (int t = 0; t < conv_len; ++t) d[t] += wj * dout[t];
          }
        }
      }
    }
    d_act = std::move(d_input);
  }
}

}  // namespace heartsiam
