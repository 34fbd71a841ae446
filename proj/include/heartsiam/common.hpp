#pragma once

// Shared domain types and error categories used across the pipeline.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace heartsiam {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

enum class Label { Normal, Abnormal, Unknown };

inline const char* label_name(Label l) {
  switch (l) {
    case Label::Normal: return "Normal";
    case Label::Abnormal: return "Abnormal";
    default: return "Unknown";
  }
}

inline Label opposite(Label l) {
  if (l == Label::Normal) return Label::Abnormal;
  if (l == Label::Abnormal) return Label::Normal;
  return Label::Unknown;
}

// Error categories map onto CLI exit codes: ConfigError -> 1, DataError -> 2,
// NumericError -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool valid_domain(char d) { return d >= 'a' && d <= 'f'; }

// One labeled recording. Samples are amplitudes in [-1, 1] once loaded from
// 16-bit PCM; fs is the sample rate in Hz.
struct PcgRecord {
  std::string record_id;
  char domain = 'a';
  Label label = Label::Unknown;
  double fs = 0.0;
  std::vector<double> samples;
};

// Scale so that max |sample| == 1. All-zero input is left untouched, which
// makes the operation idempotent.
inline void normalize_samples(std::vector<double>& samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return;
  for (double& v : samples) v /= peak;
}

inline void normalize(PcgRecord& rec) { normalize_samples(rec.samples); }

}  // namespace heartsiam
