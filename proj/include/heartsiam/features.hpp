#pragma once

// Segmentation feature matrix: [homomorphic envelope, Hilbert envelope],
// mean-decimated from the processing rate to the feature rate, then
// z-normalized per column over the record.

#include <cmath>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/envelope.hpp"

namespace heartsiam {

inline constexpr double kFeatureRateHz = 50.0;
inline constexpr double kZNormStdFloor = 1e-9;

// T x n_features, row-major.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

namespace detail {

inline std::vector<double> mean_decimate(std::span<const double> x, std::size_t factor) {
  const std::size_t t = x.size() / factor;
  std::vector<double> out(t);
  for (std::size_t i = 0; i < t; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < factor; ++j) acc += x[i * factor + j];
    out[i] = acc / static_cast<double>(factor);
  }
  return out;
}

inline void znormalize(std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  double sd = std::sqrt(var / n);
  if (sd < kZNormStdFloor) {
    // degenerate (constant) column: emit zeros
    for (double& x : v) x = 0.0;
    return;
  }
  for (double& x : v) x = (x - mean) / sd;
}

}  // namespace detail

inline FeatureMatrix feature_matrix(std::span<const double> x, double fs,
                                    double feature_rate = kFeatureRateHz) {
  if (static_cast<double>(x.size()) < fs)
    throw DataError("feature_matrix: record shorter than 1 s");
  const auto factor = static_cast<std::size_t>(std::llround(fs / feature_rate));
  if (factor == 0 || fs != factor * feature_rate)
    throw ConfigError("feature_matrix: fs must be an integer multiple of the feature rate");

  std::vector<double> homo = detail::mean_decimate(homomorphic_envelope(x, fs), factor);
  std::vector<double> hilb = detail::mean_decimate(hilbert_envelope(x), factor);
  detail::znormalize(homo);
  detail::znormalize(hilb);

  FeatureMatrix f;
  f.rows = homo.size();
  f.cols = 2;
  f.data.resize(f.rows * 2);
  for (std::size_t t = 0; t < f.rows; ++t) {
    f.data[t * 2] = homo[t];
    f.data[t * 2 + 1] = hilb[t];
  }
  return f;
}

}  // namespace heartsiam
