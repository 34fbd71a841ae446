#pragma once

// Per-record segmentation: envelope features -> emission posteriors ->
// heart-rate-conditioned duration model -> duration-explicit Viterbi.

#include <span>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/emission.hpp"
#include "heartsiam/features.hpp"
#include "heartsiam/heartrate.hpp"
#include "heartsiam/hsmm.hpp"

namespace heartsiam {

struct SegmentationConfig {
  double feature_rate = kFeatureRateHz;
  DurationConfig durations;
};

inline StateSequence segment_record(std::span<const double> x, double fs,
                                    const EmissionModel& emission,
                                    const SegmentationConfig& cfg = {}) {
  const FeatureMatrix feats = feature_matrix(x, fs, cfg.feature_rate);

  // heart rate from the raw (pre-normalization) homomorphic envelope; the
  // z-normalized column works equally well since autocorrelation of a
  // mean-removed signal is shift/scale invariant
  std::vector<double> homo(feats.rows);
  for (std::size_t t = 0; t < feats.rows; ++t) homo[t] = feats.at(t, 0);
  const HeartRateEstimate hr = estimate_heart_rate(homo, cfg.feature_rate);
  const DurationModel durations = make_duration_model(hr, cfg.feature_rate, cfg.durations);

  const std::vector<double> log_probs = emission_log_probs(emission, feats.data);
  StateSequence seq = hsmm_viterbi(log_probs, kNumHeartStates, durations, cfg.feature_rate);
  seq.low_confidence = hr.low_confidence;
  return seq;
}

}  // namespace heartsiam
