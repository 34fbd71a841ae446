#pragma once

// Deterministic synthetic multi-domain PCG generator with ground-truth state
// sequences. Domains differ by sensor coloration band and noise floor; the
// abnormal class adds band-limited murmur noise during systole.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "heartsiam/annotations.hpp"
#include "heartsiam/common.hpp"
#include "heartsiam/hsmm.hpp"
#include "heartsiam/iir.hpp"
#include "heartsiam/manifest.hpp"
#include "heartsiam/rng.hpp"
#include "heartsiam/wav.hpp"

namespace heartsiam {

struct SynthProfile {
  char domain = 'a';
  double color_center_hz = 150.0;
  double color_width_hz = 250.0;
  double noise_rms = 0.02;
  double s1_freq_hz = 60.0;
  double s1_dur_s = 0.12;
  double s2_freq_hz = 90.0;
  double s2_dur_s = 0.10;
  double cycle_mean_s = 0.8;
  double cycle_std_s = 0.05;
  double murmur_lo_hz = 150.0;
  double murmur_hi_hz = 350.0;
  double murmur_ratio = 0.4;

  void validate() const {
    auto below_nyquist = [](double f) { return f > 0.0 && f < 500.0; };
    if (!below_nyquist(s1_freq_hz) || !below_nyquist(s2_freq_hz) ||
        !below_nyquist(murmur_lo_hz) || !below_nyquist(murmur_hi_hz))
      throw ConfigError("synth profile: frequencies must lie in (0, 500) Hz");
    if (!(s1_dur_s > 0.0 && s2_dur_s > 0.0))
      throw ConfigError("synth profile: burst durations must be positive");
    if (!(cycle_mean_s >= 0.4 && cycle_mean_s <= 1.5))
      throw ConfigError("synth profile: cycle mean outside [0.4, 1.5] s");
  }
};

inline constexpr double kSynthFs = 2000.0;  // matches the challenge recordings

struct SynthRecord {
  PcgRecord record;
  std::vector<int> states;  // ground truth at the feature rate (50 Hz)
};

inline SynthRecord gen_record(const SynthProfile& profile, Label label, double duration_s,
                              std::uint64_t key) {
  profile.validate();
  if (duration_s < 3.0) throw ConfigError("gen_record: duration must be at least 3 s");
  rng::Counter rng(key);

  const auto n = static_cast<std::size_t>(std::llround(duration_s * kSynthFs));
  std::vector<double> clean(n, 0.0);
  std::vector<int> state_at(n, static_cast<int>(HeartState::Dia));
  std::vector<std::pair<std::size_t, std::size_t>> systoles;

  auto add_burst = [&](double t0, double t1, double freq, double amp) {
    const double c = 0.5 * (t0 + t1);
    const double sigma = (t1 - t0) / 6.0;
    const double phase = rng.next_uniform(0.0, 2.0 * kPi);
    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(t0 * kSynthFs)));
    const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil(t1 * kSynthFs)));
    for (std::size_t i = i0; i < i1; ++i) {
      const double t = static_cast<double>(i) / kSynthFs;
      const double w = std::exp(-0.5 * std::pow((t - c) / sigma, 2.0));
      clean[i] += amp * w * std::sin(2.0 * kPi * freq * (t - c) + phase);
    }
  };
  auto mark = [&](double t0, double t1, HeartState s) {
    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(t0 * kSynthFs)));
    const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil(t1 * kSynthFs)));
    for (std::size_t i = i0; i < i1; ++i) state_at[i] = static_cast<int>(s);
  };

  double t = 0.0;
  while (t * kSynthFs < static_cast<double>(n)) {
    double cycle = profile.cycle_mean_s + profile.cycle_std_s * rng.next_normal();
    const double lo = std::max(0.4, profile.cycle_mean_s - 3.0 * profile.cycle_std_s);
    const double hi = std::min(1.5, profile.cycle_mean_s + 3.0 * profile.cycle_std_s);
    cycle = std::min(std::max(cycle, lo), hi);

    const double s1_end = t + profile.s1_dur_s;
    const double sys_end = std::max(t + 0.3 * cycle, s1_end + 0.05);
    const double s2_end = sys_end + profile.s2_dur_s;
    const double dia_end = std::max(t + cycle, s2_end + 0.05);

    mark(t, s1_end, HeartState::S1);
    mark(s1_end, sys_end, HeartState::Sys);
    mark(sys_end, s2_end, HeartState::S2);
    mark(s2_end, dia_end, HeartState::Dia);
    add_burst(t, s1_end, profile.s1_freq_hz, 1.0);
    add_burst(sys_end, s2_end, profile.s2_freq_hz, 0.8);
    systoles.emplace_back(static_cast<std::size_t>(std::floor(s1_end * kSynthFs)),
                          std::min(n, static_cast<std::size_t>(std::ceil(sys_end * kSynthFs))));
    t = dia_end;
  }

  double clean_rms = 0.0;
  for (double v : clean) clean_rms += v * v;
  clean_rms = std::sqrt(clean_rms / static_cast<double>(n));

  if (label == Label::Abnormal && profile.murmur_ratio > 0.0) {
    // band-limited noise confined to the systolic windows
    std::vector<double> murmur(n, 0.0);
    for (const auto& [i0, i1] : systoles) {
      if (i1 <= i0) continue;
      const double c = 0.5 * static_cast<double>(i0 + i1);
      const double sigma = static_cast<double>(i1 - i0) / 5.0;
      for (std::size_t i = i0; i < i1 && i < n; ++i) {
        const double w = std::exp(-0.5 * std::pow((static_cast<double>(i) - c) / sigma, 2.0));
        murmur[i] = w * rng.next_normal();
      }
    }
    murmur = filtfilt(butter_bandpass2(profile.murmur_lo_hz, profile.murmur_hi_hz, kSynthFs),
                      murmur);
    double m_rms = 0.0;
    std::size_t m_count = 0;
    for (const auto& [i0, i1] : systoles)
      for (std::size_t i = i0; i < i1 && i < n; ++i, ++m_count) m_rms += murmur[i] * murmur[i];
    m_rms = std::sqrt(m_rms / std::max<std::size_t>(m_count, 1));
    if (m_rms > 0.0) {
      const double gain = profile.murmur_ratio * clean_rms / m_rms;
      for (std::size_t i = 0; i < n; ++i) clean[i] += gain * murmur[i];
    }
  }

  // sensor coloration, then the sensor noise floor
  const double color_lo = std::max(1.0, profile.color_center_hz - profile.color_width_hz / 2.0);
  const double color_hi =
      std::min(0.49 * kSynthFs, profile.color_center_hz + profile.color_width_hz / 2.0);
  std::vector<double> colored = filtfilt(butter_bandpass2(color_lo, color_hi, kSynthFs), clean);
  for (double& v : colored) v += profile.noise_rms * rng.next_normal();

  // leave headroom before 16-bit quantization
  double peak = 0.0;
  for (double v : colored) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : colored) v *= 0.9 / peak;

  SynthRecord out;
  out.record.domain = profile.domain;
  out.record.label = label;
  out.record.fs = kSynthFs;
  out.record.samples = std::move(colored);

  // ground truth at 50 Hz on the 1000 Hz processing timeline: tick t covers
  // [t, t+1)/50 s; take the state at the window center
  const std::size_t n_1000 = n / 2;
  const std::size_t ticks = n_1000 / 20;
  out.states.resize(ticks);
  for (std::size_t k = 0; k < ticks; ++k) {
    const std::size_t center = k * 40 + 20;
    out.states[k] = state_at[std::min(center, n - 1)];
  }
  return out;
}

struct SynthDatasetConfig {
  std::vector<SynthProfile> profiles;
  std::size_t n_per_class = 10;
  // optional per-(domain,label) overrides for imbalanced datasets
  std::map<std::pair<char, Label>, std::size_t> cell_counts;
  double duration_s = 10.0;
  std::uint64_t seed = 1;

  std::size_t count_for(char domain, Label label) const {
    auto it = cell_counts.find({domain, label});
    return it == cell_counts.end() ? n_per_class : it->second;
  }
};

struct SynthDataset {
  DatasetIndex index;
  std::string manifest_path;
  std::string annotations_path;
};

inline SynthDataset gen_dataset(const SynthDatasetConfig& cfg, const std::string& out_dir) {
  if (cfg.profiles.empty()) throw ConfigError("gen_dataset: no profiles configured");
  std::filesystem::create_directories(out_dir);

  SynthDataset out;
  out.manifest_path = (std::filesystem::path(out_dir) / "manifest.csv").string();
  out.annotations_path = (std::filesystem::path(out_dir) / "annotations.csv").string();

  std::ofstream ann(out.annotations_path, std::ios::trunc);
  if (!ann) throw DataError("gen_dataset: cannot open " + out.annotations_path);
  ann << kAnnotationHeader << "\n";

  std::vector<RecordDescriptor> descriptors;
  for (const auto& profile : cfg.profiles) {
    std::size_t serial = 0;
    for (Label label : {Label::Normal, Label::Abnormal}) {
      const std::size_t count = cfg.count_for(profile.domain, label);
      for (std::size_t i = 0; i < count; ++i, ++serial) {
        char id[16];
        std::snprintf(id, sizeof(id), "%c%04zu", profile.domain, serial);
        const std::uint64_t key = rng::chain(
            rng::chain(rng::chain(cfg.seed, "record"), static_cast<std::uint64_t>(profile.domain)),
            serial);
        SynthRecord rec = gen_record(profile, label, cfg.duration_s, key);
        rec.record.record_id = id;

        const std::string wav_path = (std::filesystem::path(out_dir) / (std::string(id) + ".wav")).string();
        write_wav(wav_path, kSynthFs, rec.record.samples);
        append_annotations(ann, id, rec.states);
        descriptors.push_back({id, wav_path, profile.domain, label});
      }
    }
  }
  write_manifest(out.manifest_path, descriptors);
  out.index = load_manifest(out.manifest_path);
  return out;
}

}  // namespace heartsiam
