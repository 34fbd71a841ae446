#pragma once

// Triplet margin loss max(0, ||ea-ep||^2 - ||ea-en||^2 + alpha) and its batch
// mean with reverse-mode parameter gradients. Triplets whose hinge is
// inactive contribute exactly zero gradient.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/net.hpp"
#include "heartsiam/sampler.hpp"

namespace heartsiam {

struct LossConfig {
  double alpha = 0.5;

  void validate() const {
    if (alpha < 0.0) throw ConfigError("loss: alpha must be non-negative");
  }
};

template <typename T>
T triplet_loss(std::span<const T> ea, std::span<const T> ep, std::span<const T> en,
               const LossConfig& cfg = {}) {
  cfg.validate();
  if (ea.size() != ep.size() || ea.size() != en.size())
    throw ConfigError("triplet_loss: embedding dimension mismatch");
  T d_ap = T(0), d_an = T(0);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    const T dp = ea[i] - ep[i];
    const T dn = ea[i] - en[i];
    d_ap += dp * dp;
    d_an += dn * dn;
  }
  const T v = d_ap - d_an + static_cast<T>(cfg.alpha);
  return v > T(0) ? v : T(0);
}

template <typename T>
struct BatchResult {
  T mean_loss = T(0);
  NetParams<T> grads;
  std::size_t active_hinges = 0;
};

// Raw pointers to the three legs of one triplet, each arch.in_channels x
// arch.in_length.
template <typename T>
struct TripletInputs {
  const T* anchor = nullptr;
  const T* positive = nullptr;
  const T* negative = nullptr;
};

// Converts one pooled segment to the scalar type of the net.
template <typename T>
void segment_input(const CycleSegment& seg, std::vector<T>& out) {
  out.resize(seg.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(seg.data[i]);
}

// Mean triplet loss over the batch plus gradients w.r.t. every parameter.
// Gradient contributions are accumulated in ascending triplet order, keeping
// the reduction bit-deterministic.
template <typename T>
BatchResult<T> loss_and_grads(const NetParams<T>& params, std::span<const TripletInputs<T>> batch,
                              const LossConfig& cfg = {}) {
  cfg.validate();
  if (batch.empty()) throw ConfigError("loss_and_grads: empty batch");

  BatchResult<T> result;
  result.grads = NetParams<T>::zeros_like(params.arch);
  const int dim = params.arch.embedding_dim;

  double total = 0.0;
  for (const TripletInputs<T>& t : batch) {
    ForwardCache<T> ca, cp, cn;
    const std::vector<T> ea = forward(params, t.anchor, &ca, true);
    const std::vector<T> ep = forward(params, t.positive, &cp, true);
    const std::vector<T> en = forward(params, t.negative, &cn, true);

    T d_ap = T(0), d_an = T(0);
    for (int i = 0; i < dim; ++i) {
      const T dp = ea[static_cast<std::size_t>(i)] - ep[static_cast<std::size_t>(i)];
      const T dn = ea[static_cast<std::size_t>(i)] - en[static_cast<std::size_t>(i)];
      d_ap += dp * dp;
      d_an += dn * dn;
    }
    const T hinge = d_ap - d_an + static_cast<T>(cfg.alpha);
    if (!std::isfinite(static_cast<double>(hinge)))
      throw NumericError("loss_and_grads: non-finite triplet loss");
    if (hinge <= T(0)) continue;  // inactive: zero loss, zero gradient

    total += static_cast<double>(hinge);
    ++result.active_hinges;

    // d loss / d ea = 2 (en - ep); / d ep = -2 (ea - ep); / d en = 2 (ea - en)
    std::vector<T> da(static_cast<std::size_t>(dim)), dp(static_cast<std::size_t>(dim)),
        dn(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      da[k] = T(2) * (en[k] - ep[k]);
      dp[k] = T(-2) * (ea[k] - ep[k]);
      dn[k] = T(2) * (ea[k] - en[k]);
    }
    backward(params, ca, da, result.grads);
    backward(params, cp, dp, result.grads);
    backward(params, cn, dn, result.grads);
  }

  const T scale = T(1) / static_cast<T>(batch.size());
  result.mean_loss = static_cast<T>(total) * scale;
  result.grads.for_each_tensor([&](const std::string&, std::vector<T>& v) {
    for (T& x : v) x *= scale;
  });
  return result;
}

// Pool-indexed convenience overload used by the training loop.
template <typename T>
BatchResult<T> loss_and_grads(const NetParams<T>& params, const SegmentPool& pool,
                              std::span<const Triplet> batch, const LossConfig& cfg = {}) {
  if (batch.empty()) throw ConfigError("loss_and_grads: empty batch");
  std::vector<std::vector<T>> storage;
  storage.reserve(batch.size() * 3);
  std::vector<TripletInputs<T>> inputs(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t leg :
         {batch[i].anchor, batch[i].positive, batch[i].negative}) {
      storage.emplace_back();
      segment_input(pool.segments[leg], storage.back());
    }
    inputs[i].anchor = storage[3 * i].data();
    inputs[i].positive = storage[3 * i + 1].data();
    inputs[i].negative = storage[3 * i + 2].data();
  }
  return loss_and_grads(params, std::span<const TripletInputs<T>>(inputs), cfg);
}

}  // namespace heartsiam
