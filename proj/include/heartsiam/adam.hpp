#pragma once

// Adam with bias correction.

#include <cmath>
#include <cstdint>

#include "heartsiam/common.hpp"
#include "heartsiam/net.hpp"

namespace heartsiam {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig cfg;
  NetParams<T> m;
  NetParams<T> v;
  std::int64_t t = 0;

  static AdamState init(const ArchConfig& arch, const AdamConfig& cfg = {}) {
    AdamState s;
    s.cfg = cfg;
    s.m = NetParams<T>::zeros_like(arch);
    s.v = NetParams<T>::zeros_like(arch);
    return s;
  }
};

template <typename T>
void adam_step(AdamState<T>& state, NetParams<T>& params, const NetParams<T>& grads) {
  state.t += 1;
  const T b1 = static_cast<T>(state.cfg.beta1);
  const T b2 = static_cast<T>(state.cfg.beta2);
  const T lr = static_cast<T>(state.cfg.lr);
  const T eps = static_cast<T>(state.cfg.eps);
  const T bc1 = T(1) - static_cast<T>(std::pow(state.cfg.beta1, static_cast<double>(state.t)));
  const T bc2 = T(1) - static_cast<T>(std::pow(state.cfg.beta2, static_cast<double>(state.t)));

  auto update = [&](std::vector<T>& p, const std::vector<T>& g, std::vector<T>& m,
                    std::vector<T>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (T(1) - b1) * g[i];
      v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
      const T mhat = m[i] / bc1;
      const T vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  };
  for (std::size_t b = 0; b < params.conv_w.size(); ++b) {
    update(params.conv_w[b], grads.conv_w[b], state.m.conv_w[b], state.v.conv_w[b]);
    update(params.conv_b[b], grads.conv_b[b], state.m.conv_b[b], state.v.conv_b[b]);
  }
  update(params.dense_w, grads.dense_w, state.m.dense_w, state.v.dense_w);
  update(params.dense_b, grads.dense_b, state.m.dense_b, state.v.dense_b);
}

}  // namespace heartsiam
