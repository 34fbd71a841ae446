#pragma once

// Four-band analysis decomposition. Each band is a zero-phase order-2
// Butterworth band-pass (filtfilt), rows ordered low band to high band.

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/iir.hpp"

namespace heartsiam {

using BandEdges = std::array<std::pair<double, double>, 4>;

inline constexpr BandEdges kDefaultBandEdges = {{{25.0, 45.0}, {45.0, 80.0}, {80.0, 200.0}, {200.0, 400.0}}};

struct BandStack {
  std::array<std::vector<double>, 4> bands;
  BandEdges band_edges = kDefaultBandEdges;
  double fs = 0.0;

  std::size_t length() const { return bands[0].size(); }
};

inline std::vector<double> bandpass(std::span<const double> x, double fs, double lo, double hi) {
  return filtfilt(butter_bandpass2(lo, hi, fs), x);
}

inline BandStack decompose(std::span<const double> x, double fs,
                           const BandEdges& edges = kDefaultBandEdges) {
  BandStack stack;
  stack.band_edges = edges;
  stack.fs = fs;
  for (std::size_t k = 0; k < edges.size(); ++k)
    stack.bands[k] = bandpass(x, fs, edges[k].first, edges[k].second);
  return stack;
}

}  // namespace heartsiam
