#pragma once

// Spike removal over non-overlapping windows: while the loudest window's
// maximum absolute amplitude (MAA) exceeds threshold * median(MAA), zero the
// span around that window's peak out to the nearest zero-crossings inside the
// window, then recompute. Window 500 ms and threshold 3 by default.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

struct SpikeConfig {
  double window_s = 0.5;
  double threshold = 3.0;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline std::vector<double> remove_spikes(std::span<const double> x, double fs,
                                         const SpikeConfig& cfg = {}) {
  const auto win = static_cast<std::size_t>(std::llround(cfg.window_s * fs));
  if (win == 0) throw ConfigError("remove_spikes: window too small for sample rate");
  if (x.size() < win)
    throw DataError("remove_spikes: signal shorter than one " +
                    std::to_string(cfg.window_s) + " s window");

  std::vector<double> y(x.begin(), x.end());
  const std::size_t n_win = y.size() / win;

  auto window_maa = [&](std::size_t w) {
    double maa = 0.0;
    for (std::size_t i = w * win; i < (w + 1) * win; ++i) maa = std::max(maa, std::abs(y[i]));
    return maa;
  };

  std::vector<double> maa(n_win);
  for (std::size_t w = 0; w < n_win; ++w) maa[w] = window_maa(w);

  while (true) {
    const std::size_t loudest =
        static_cast<std::size_t>(std::max_element(maa.begin(), maa.end()) - maa.begin());
    if (!(maa[loudest] > cfg.threshold * detail::median_of(maa))) break;

    const std::size_t lo = loudest * win, hi = (loudest + 1) * win;
    std::size_t peak = lo;
    for (std::size_t i = lo; i < hi; ++i)
      if (std::abs(y[i]) > std::abs(y[peak])) peak = i;

    // expand to the nearest zero-crossings within the window
    std::size_t start = peak;
    while (start > lo && !(y[start - 1] == 0.0 || y[start - 1] * y[peak] < 0.0)) --start;
    std::size_t end = peak;
    while (end + 1 < hi && !(y[end + 1] == 0.0 || y[end + 1] * y[peak] < 0.0)) ++end;

    for (std::size_t i = start; i <= end; ++i) y[i] = 0.0;
    maa[loudest] = window_maa(loudest);
  }
  return y;
}

}  // namespace heartsiam
