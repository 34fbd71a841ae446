#pragma once

// Sample-rate conversion by windowed-sinc interpolation: low-pass at
// 0.45 * min(fs_in, fs_out), Hann window, 64 taps, kernel centered at the
// exact continuous source position of each output sample (zero phase). Tap
// weights are renormalized per output position so constants pass through
// exactly, including at the edges.

#include <cmath>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

inline constexpr int kResampleHalfTaps = 32;

inline std::vector<double> resample_to_rate(std::span<const double> x, double fs_in,
                                            double fs_out) {
  if (!(fs_in > 0.0) || !(fs_out > 0.0))
    throw ConfigError("resample_to_rate: sample rates must be positive");
  if (fs_in == fs_out) return std::vector<double>(x.begin(), x.end());
  const std::size_t n_in = x.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * fs_out / fs_in));
  std::vector<double> y(n_out, 0.0);
  if (n_in == 0 || n_out == 0) return y;

  const double fcn = 0.45 * std::min(fs_in, fs_out) / fs_in;  // cycles per input sample
  const double step = fs_in / fs_out;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double c = static_cast<double>(i) * step;
    auto k0 = static_cast<long long>(std::ceil(c)) - kResampleHalfTaps;
    auto k1 = static_cast<long long>(std::floor(c)) + kResampleHalfTaps;
    if (k0 < 0) k0 = 0;
    if (k1 > static_cast<long long>(n_in) - 1) k1 = static_cast<long long>(n_in) - 1;
    double acc = 0.0, wsum = 0.0;
    for (long long k = k0; k <= k1; ++k) {
      const double u = static_cast<double>(k) - c;
      const double t = kPi * fcn * u;
      const double sinc = (std::abs(t) < 1e-12) ? 1.0 : std::sin(2.0 * t) / (2.0 * t);
      const double win = 0.5 * (1.0 + std::cos(kPi * u / kResampleHalfTaps));
      const double w = sinc * win;
      acc += w * x[static_cast<std::size_t>(k)];
      wsum += w;
    }
    y[i] = (wsum != 0.0) ? acc / wsum : 0.0;
  }
  return y;
}

}  // namespace heartsiam
