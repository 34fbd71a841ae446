#pragma once

// Duration-explicit Viterbi decoding for a hidden semi-Markov model with
// deterministic cyclic transitions (state s is always followed by
// (s+1) mod n_states). Durations carry Gaussian log-densities restricted to
// [min, max] ticks; the first and last segments of a recording may be
// truncated below the minimum since the recording can start or stop
// mid-state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

enum class HeartState : int { S1 = 0, Sys = 1, S2 = 2, Dia = 3 };

inline constexpr int kNumHeartStates = 4;

inline const char* heart_state_name(HeartState s) {
  switch (s) {
    case HeartState::S1: return "S1";
    case HeartState::Sys: return "Sys";
    case HeartState::S2: return "S2";
    default: return "Dia";
  }
}

inline HeartState heart_state_from_name(const std::string& name) {
  if (name == "S1") return HeartState::S1;
  if (name == "Sys") return HeartState::Sys;
  if (name == "S2") return HeartState::S2;
  if (name == "Dia") return HeartState::Dia;
  throw DataError("unknown heart state '" + name + "'");
}

struct StateSequence {
  std::vector<int> states;  // indices into the cyclic state set
  double feature_rate = 0.0;
  bool low_confidence = false;
};

struct StateDuration {
  double mean = 0.0;  // ticks
  double std = 0.0;   // ticks
  int min = 1;
  int max = 1;
};

struct DurationModel {
  std::vector<StateDuration> states;

  void validate() const {
    for (const auto& s : states) {
      if (!(s.mean > 0.0) || !(s.std > 0.0))
        throw ConfigError("duration model: mean and std must be positive");
      if (!(s.min <= s.mean && s.mean <= s.max))
        throw ConfigError("duration model: need min <= mean <= max per state");
      if (s.min < 1) throw ConfigError("duration model: min duration below 1 tick");
    }
  }
};

inline double duration_log_prob(const StateDuration& d, int ticks) {
  const double z = (static_cast<double>(ticks) - d.mean) / d.std;
  return -0.5 * z * z - std::log(d.std) - 0.5 * std::log(2.0 * kPi);
}

// log_emission is T x n_states row-major. Returns the maximum-likelihood
// state sequence. Ties prefer the shorter duration, then the lower-indexed
// state.
inline StateSequence hsmm_viterbi(const std::vector<double>& log_emission, std::size_t n_states,
                                  const DurationModel& dur, double feature_rate) {
  if (n_states == 0 || dur.states.size() != n_states)
    throw ConfigError("hsmm_viterbi: duration model does not match state count");
  dur.validate();
  if (log_emission.size() % n_states != 0)
    throw ConfigError("hsmm_viterbi: emission matrix shape mismatch");
  const std::size_t t_len = log_emission.size() / n_states;
  if (t_len == 0) throw DataError("hsmm_viterbi: empty observation sequence");

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // prefix[s][t] = sum of log emissions of state s over ticks [0, t)
  std::vector<std::vector<double>> prefix(n_states, std::vector<double>(t_len + 1, 0.0));
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t t = 0; t < t_len; ++t)
      prefix[s][t + 1] = prefix[s][t] + log_emission[t * n_states + s];
  auto emit_sum = [&](std::size_t s, std::size_t from, std::size_t to) {
    return prefix[s][to] - prefix[s][from];
  };

  // best[t][s]: best score of a segmentation of [0, t) whose segment in state
  // s ends exactly at t and is not the final segment (so its duration obeys
  // the minimum unless it is the opening, possibly truncated, segment).
  // back_d[t][s]: chosen duration; 0 marks "opening segment spanning [0, t)".
  std::vector<std::vector<double>> best(t_len + 1, std::vector<double>(n_states, kNegInf));
  std::vector<std::vector<int>> back_d(t_len + 1, std::vector<int>(n_states, -1));

  for (std::size_t t = 1; t + 1 <= t_len; ++t) {
    for (std::size_t s = 0; s < n_states; ++s) {
      const auto& ds = dur.states[s];
      const std::size_t prev = (s + n_states - 1) % n_states;
      double score = kNegInf;
      int arg = -1;
      // ascending duration with strict improvement keeps the shortest
      // duration on ties
      const int dtop = std::min(ds.max, static_cast<int>(t));
      for (int d = 1; d <= dtop; ++d) {
        double cand;
        if (d == static_cast<int>(t)) {
          cand = duration_log_prob(ds, d) + emit_sum(s, 0, t);  // opening segment
        } else if (d >= ds.min) {
          const std::size_t t0 = t - static_cast<std::size_t>(d);
          if (best[t0][prev] == kNegInf) continue;
          cand = best[t0][prev] + duration_log_prob(ds, d) + emit_sum(s, t0, t);
        } else {
          continue;
        }
        if (cand > score) {
          score = cand;
          arg = (d == static_cast<int>(t)) ? 0 : d;
        }
      }
      best[t][s] = score;
      back_d[t][s] = arg;
    }
  }

  // Final segment ends at t_len and may be truncated below the minimum.
  // Scan durations ascending, states ascending inside, so ties resolve to the
  // shorter duration first, then the lower state index.
  double final_score = kNegInf;
  std::size_t final_state = 0;
  int final_d = -1;
  int dmax_all = 0;
  for (const auto& ds : dur.states) dmax_all = std::max(dmax_all, ds.max);
  const int dtop = std::min(dmax_all, static_cast<int>(t_len));
  for (int d = 1; d <= dtop; ++d) {
    for (std::size_t s = 0; s < n_states; ++s) {
      const auto& ds = dur.states[s];
      if (d > ds.max) continue;
      double cand;
      if (d == static_cast<int>(t_len)) {
        cand = duration_log_prob(ds, d) + emit_sum(s, 0, t_len);  // single-segment recording
      } else {
        const std::size_t t0 = t_len - static_cast<std::size_t>(d);
        const std::size_t prev = (s + n_states - 1) % n_states;
        if (best[t0][prev] == kNegInf) continue;
        cand = best[t0][prev] + duration_log_prob(ds, d) + emit_sum(s, t0, t_len);
      }
      if (cand > final_score) {
        final_score = cand;
        final_state = s;
        final_d = (d == static_cast<int>(t_len)) ? 0 : d;
      }
    }
  }
  if (final_score == kNegInf)
    throw DataError("hsmm_viterbi: no feasible segmentation (sequence too short for the "
                    "duration model)");

  // backtrack
  StateSequence seq;
  seq.feature_rate = feature_rate;
  seq.states.assign(t_len, 0);
  std::size_t t = t_len;
  std::size_t s = final_state;
  int d = final_d;
  while (true) {
    const std::size_t span = (d == 0) ? t : static_cast<std::size_t>(d);
    for (std::size_t i = t - span; i < t; ++i) seq.states[i] = static_cast<int>(s);
    if (d == 0) break;
    t -= span;
    s = (s + n_states - 1) % n_states;
    d = back_d[t][s];
  }
  return seq;
}

}  // namespace heartsiam
