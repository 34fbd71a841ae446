#pragma once

// Heart-rate estimation from the homomorphic envelope at the feature rate:
// cycle length is the autocorrelation argmax in the 0.5-2 s lag range,
// systole length the argmax between 0.2 s and half a cycle. The duration
// model for Viterbi decoding is derived from these two estimates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/hsmm.hpp"

namespace heartsiam {

struct HeartRateEstimate {
  int cycle_ticks = 0;
  int systole_ticks = 0;
  bool low_confidence = false;
};

struct DurationConfig {
  double s1_mean_s = 0.12;
  double s2_mean_s = 0.10;
  double std_frac = 0.25;        // std as a fraction of the mean
  double min_duration_s = 0.04;  // lower clamp
  double max_factor = 2.0;       // upper clamp as a multiple of the mean
};

inline HeartRateEstimate estimate_heart_rate(std::span<const double> env, double feature_rate) {
  const auto n = env.size();
  const int lag_lo = static_cast<int>(std::llround(0.5 * feature_rate));
  const int lag_hi = static_cast<int>(std::llround(2.0 * feature_rate));
  if (n < static_cast<std::size_t>(lag_hi) + 1)
    throw DataError("estimate_heart_rate: envelope shorter than the maximum lag window");

  double mean = 0.0;
  for (double v : env) mean += v;
  mean /= static_cast<double>(n);

  auto autocorr = [&](int lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < n; ++t)
      acc += (env[t] - mean) * (env[t + static_cast<std::size_t>(lag)] - mean);
    return acc;
  };

  HeartRateEstimate est;
  double best = -std::numeric_limits<double>::infinity();
  for (int lag = lag_lo; lag <= lag_hi; ++lag) {
    const double c = autocorr(lag);
    if (c > best) {
      best = c;
      est.cycle_ticks = lag;
    }
  }
  est.low_confidence = !(best > 1e-12);

  const int sys_lo = static_cast<int>(std::llround(0.2 * feature_rate));
  const int sys_hi = std::max(sys_lo, est.cycle_ticks / 2);
  double best_sys = -std::numeric_limits<double>::infinity();
  est.systole_ticks = sys_lo;
  for (int lag = sys_lo; lag <= sys_hi; ++lag) {
    const double c = autocorr(lag);
    if (c > best_sys) {
      best_sys = c;
      est.systole_ticks = lag;
    }
  }
  return est;
}

inline DurationModel make_duration_model(const HeartRateEstimate& hr, double feature_rate,
                                         const DurationConfig& cfg = {}) {
  const double s1 = cfg.s1_mean_s * feature_rate;
  const double s2 = cfg.s2_mean_s * feature_rate;
  const double sys = std::max(static_cast<double>(hr.systole_ticks) - s1, 1.0);
  const double dia = std::max(static_cast<double>(hr.cycle_ticks) - s1 - sys - s2, 1.0);

  DurationModel model;
  for (double mean : {s1, sys, s2, dia}) {
    StateDuration d;
    d.mean = mean;
    d.std = std::max(cfg.std_frac * mean, 0.5);
    d.min = std::max(1, std::min(static_cast<int>(std::llround(cfg.min_duration_s * feature_rate)),
                                 static_cast<int>(std::floor(mean))));
    d.max = std::max(static_cast<int>(std::ceil(cfg.max_factor * mean)), d.min);
    model.states.push_back(d);
  }
  model.validate();
  return model;
}

}  // namespace heartsiam
