#pragma once

// Per-state emission probabilities: one-vs-rest logistic regressions over the
// feature vector, trained by full-batch gradient descent. Posteriors are
// normalized across states to sum to one.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/features.hpp"
#include "heartsiam/hsmm.hpp"

namespace heartsiam {

struct EmissionTrainConfig {
  int iterations = 500;
  double step = 0.1;
  double l2 = 1e-4;
};

struct EmissionModel {
  std::size_t n_features = 0;
  std::size_t n_states = 0;
  std::vector<double> weights;  // n_states x n_features, row-major
  std::vector<double> bias;     // n_states
  std::vector<double> feat_mean;
  std::vector<double> feat_std;

  bool empty() const { return weights.empty(); }
};

namespace detail {
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace detail

// frames: n x n_features row-major; labels: per-frame state index.
inline EmissionModel fit_emission(const std::vector<double>& frames, std::size_t n_features,
                                  const std::vector<int>& labels, std::size_t n_states,
                                  const EmissionTrainConfig& cfg = {}) {
  if (n_features == 0 || frames.size() % n_features != 0)
    throw ConfigError("fit_emission: feature matrix shape mismatch");
  const std::size_t n = frames.size() / n_features;
  if (labels.size() != n) throw ConfigError("fit_emission: labels do not align with frames");
  if (n == 0) throw DataError("fit_emission: no training frames");

  std::vector<std::size_t> state_count(n_states, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= n_states)
      throw DataError("fit_emission: label outside the state set");
    state_count[static_cast<std::size_t>(l)]++;
  }
  for (std::size_t s = 0; s < n_states; ++s)
    if (state_count[s] == 0)
      throw DataError(std::string("fit_emission: state ") +
                      heart_state_name(static_cast<HeartState>(s)) + " absent from labels");

  EmissionModel model;
  model.n_features = n_features;
  model.n_states = n_states;
  model.feat_mean.assign(n_features, 0.0);
  model.feat_std.assign(n_features, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < n_features; ++f) model.feat_mean[f] += frames[i * n_features + f];
  for (double& m : model.feat_mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < n_features; ++f) {
      const double d = frames[i * n_features + f] - model.feat_mean[f];
      model.feat_std[f] += d * d;
    }
  for (double& s : model.feat_std) s = std::max(std::sqrt(s / static_cast<double>(n)), kZNormStdFloor);

  std::vector<double> x(frames.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < n_features; ++f)
      x[i * n_features + f] = (frames[i * n_features + f] - model.feat_mean[f]) / model.feat_std[f];

  model.weights.assign(n_states * n_features, 0.0);
  model.bias.assign(n_states, 0.0);

  // one-vs-rest, full batch: order-independent in the training rows
  std::vector<double> grad_w(n_features);
  for (std::size_t s = 0; s < n_states; ++s) {
    double* w = model.weights.data() + s * n_features;
    double& b = model.bias[s];
    for (int it = 0; it < cfg.iterations; ++it) {
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.data() + i * n_features;
        double z = b;
        for (std::size_t f = 0; f < n_features; ++f) z += w[f] * xi[f];
        const double err = detail::sigmoid(z) -
                           (labels[i] == static_cast<int>(s) ? 1.0 : 0.0);
        for (std::size_t f = 0; f < n_features; ++f) grad_w[f] += err * xi[f];
        grad_b += err;
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t f = 0; f < n_features; ++f)
        w[f] -= cfg.step * (grad_w[f] * inv_n + cfg.l2 * w[f]);
      b -= cfg.step * grad_b * inv_n;
    }
  }
  return model;
}

// Per-frame state posteriors normalized to sum 1; rows of the result align
// with rows of `frames`.
inline std::vector<double> emission_posteriors(const EmissionModel& model,
                                               const std::vector<double>& frames) {
  if (model.n_features == 0) throw ConfigError("emission_posteriors: empty model");
  if (frames.size() % model.n_features != 0)
    throw ConfigError("emission_posteriors: feature matrix shape mismatch");
  const std::size_t n = frames.size() / model.n_features;
  std::vector<double> post(n * model.n_states);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t s = 0; s < model.n_states; ++s) {
      double z = model.bias[s];
      for (std::size_t f = 0; f < model.n_features; ++f) {
        const double xf = (frames[i * model.n_features + f] - model.feat_mean[f]) / model.feat_std[f];
        z += model.weights[s * model.n_features + f] * xf;
      }
      const double p = detail::sigmoid(z);
      post[i * model.n_states + s] = p;
      total += p;
    }
    if (total <= 0.0) total = 1.0;
    for (std::size_t s = 0; s < model.n_states; ++s) post[i * model.n_states + s] /= total;
  }
  return post;
}

// Floor-clamped log of the normalized posteriors, ready for hsmm_viterbi.
inline std::vector<double> emission_log_probs(const EmissionModel& model,
                                              const std::vector<double>& frames) {
  std::vector<double> post = emission_posteriors(model, frames);
  for (double& p : post) p = std::log(std::max(p, 1e-12));
  return post;
}

}  // namespace heartsiam
