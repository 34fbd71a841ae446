#pragma once

// Training loop: seeded shuffle per epoch, fixed-size batches (final short
// batch kept), mean-loss gradients, Adam updates. Bit-deterministic given
// (triplets, arch, config, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "heartsiam/adam.hpp"
#include "heartsiam/loss.hpp"
#include "heartsiam/net.hpp"
#include "heartsiam/rng.hpp"
#include "heartsiam/sampler.hpp"

namespace heartsiam {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double lr = 1e-4;
  LossConfig loss;
  std::uint64_t seed = 0;
};

template <typename T>
struct TrainResult {
  NetParams<T> params;
  std::vector<double> epoch_loss;  // triplet-weighted mean per epoch
};

template <typename T>
TrainResult<T> train(const SegmentPool& pool, const std::vector<Triplet>& triplets,
                     const ArchConfig& arch, const TrainConfig& cfg) {
  if (triplets.empty()) throw DataError("train: no triplets");
  if (cfg.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  cfg.loss.validate();

  TrainResult<T> result;
  result.params = init_params<T>(arch, rng::chain(cfg.seed, "init"));
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  AdamState<T> adam = AdamState<T>::init(arch, adam_cfg);

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Triplet> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng::Counter shuffle_rng(
        rng::chain(rng::chain(cfg.seed, "shuffle"), static_cast<std::uint64_t>(epoch)));
    rng::shuffle(order, shuffle_rng);

    double epoch_total = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(triplets[order[i]]);

      BatchResult<T> res;
      try {
        res = loss_and_grads(result.params, pool, batch, cfg.loss);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index) + ")");
      }
      if (!std::isfinite(static_cast<double>(res.mean_loss)))
        throw NumericError("train: non-finite loss (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ")");
      epoch_total += static_cast<double>(res.mean_loss) * static_cast<double>(batch.size());
      adam_step(adam, result.params, res.grads);
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(triplets.size()));
  }
  return result;
}

}  // namespace heartsiam
