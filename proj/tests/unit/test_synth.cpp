#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "heartsiam/annotations.hpp"
#include "heartsiam/iir.hpp"
#include "heartsiam/synth.hpp"
#include "heartsiam/wav.hpp"

using namespace heartsiam;

namespace {

SynthProfile test_profile(char domain = 'a') {
  SynthProfile p;
  p.domain = domain;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("gen_record is bit-deterministic in its key") {
  const SynthProfile profile = test_profile();
  const auto a = gen_record(profile, Label::Abnormal, 8.0, 12345);
  const auto b = gen_record(profile, Label::Abnormal, 8.0, 12345);
  REQUIRE(a.record.samples == b.record.samples);
  REQUIRE(a.states == b.states);
  const auto c = gen_record(profile, Label::Abnormal, 8.0, 12346);
  REQUIRE(a.record.samples != c.record.samples);
}

TEST_CASE("ground-truth states follow the cyclic order and cover the record") {
  const auto rec = gen_record(test_profile(), Label::Normal, 10.0, 77);
  REQUIRE(rec.states.size() == rec.record.samples.size() / 40);  // 50 Hz vs 2 kHz
  for (std::size_t t = 1; t < rec.states.size(); ++t) {
    const int a = rec.states[t - 1], b = rec.states[t];
    REQUIRE((b == a || b == (a + 1) % 4));
  }
  // all four states appear
  std::set<int> seen(rec.states.begin(), rec.states.end());
  REQUIRE(seen == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("murmur raises systolic energy in the murmur band for abnormal records") {
  const SynthProfile profile = test_profile();
  const Iir band = butter_bandpass2(profile.murmur_lo_hz, profile.murmur_hi_hz, kSynthFs);

  auto band_rms_by_state = [&](const SynthRecord& rec, HeartState state) {
    const auto filtered = filtfilt(band, rec.record.samples);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < rec.states.size(); ++t) {
      if (rec.states[t] != static_cast<int>(state)) continue;
      for (std::size_t i = t * 40; i < (t + 1) * 40 && i < filtered.size(); ++i, ++count)
        acc += filtered[i] * filtered[i];
    }
    return std::sqrt(acc / static_cast<double>(std::max<std::size_t>(count, 1)));
  };

  const auto normal = gen_record(profile, Label::Normal, 10.0, 400);
  const double n_sys = band_rms_by_state(normal, HeartState::Sys);
  const double n_dia = band_rms_by_state(normal, HeartState::Dia);
  REQUIRE(n_sys <= 3.0 * n_dia);

  const auto abnormal = gen_record(profile, Label::Abnormal, 10.0, 400);
  const double a_sys = band_rms_by_state(abnormal, HeartState::Sys);
  const double a_dia = band_rms_by_state(abnormal, HeartState::Dia);
  REQUIRE(a_sys > 3.0 * a_dia);

  // murmur-to-signal ratio implies a floor on the systolic murmur-band RMS;
  // coloration and windowing can only shave part of it
  double full_rms = 0.0;
  for (double v : abnormal.record.samples) full_rms += v * v;
  full_rms = std::sqrt(full_rms / static_cast<double>(abnormal.record.samples.size()));
  REQUIRE(a_sys >= 0.4 * profile.murmur_ratio * full_rms);
}

TEST_CASE("generated cycle durations stay within four sigma of the profile") {
  const SynthProfile profile = test_profile();
  const auto rec = gen_record(profile, Label::Normal, 20.0, 31);
  // S1 onsets delimit cycles
  std::vector<std::size_t> onsets;
  for (std::size_t t = 0; t < rec.states.size(); ++t)
    if (rec.states[t] == 0 && (t == 0 || rec.states[t - 1] != 0)) onsets.push_back(t);
  REQUIRE(onsets.size() >= 10);
  for (std::size_t i = 1; i < onsets.size(); ++i) {
    const double cycle_s = static_cast<double>(onsets[i] - onsets[i - 1]) / 50.0;
    REQUIRE(cycle_s >= profile.cycle_mean_s - 4.0 * profile.cycle_std_s - 0.04);
    REQUIRE(cycle_s <= profile.cycle_mean_s + 4.0 * profile.cycle_std_s + 0.04);
  }
}

TEST_CASE("gen_dataset writes a loadable, reproducible tree") {
  const auto dir1 = std::filesystem::temp_directory_path() / "hs_synth_ds1";
  const auto dir2 = std::filesystem::temp_directory_path() / "hs_synth_ds2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);

  SynthDatasetConfig cfg;
  cfg.profiles = {test_profile('a'), test_profile('b')};
  cfg.profiles[1].color_center_hz = 200.0;
  cfg.n_per_class = 10;
  cfg.duration_s = 4.0;
  cfg.seed = 5;

  const SynthDataset ds = gen_dataset(cfg, dir1.string());
  REQUIRE(ds.index.records.size() == 40);
  for (char d : {'a', 'b'}) {
    REQUIRE(ds.index.count(d, Label::Normal) == 10);
    REQUIRE(ds.index.count(d, Label::Abnormal) == 10);
  }

  // WAVs round-trip through the reader/writer unchanged
  const auto& first = ds.index.records.front();
  const WavData wav = load_wav(first.path);
  REQUIRE(wav.fs == kSynthFs);
  const auto copy_path = dir1 / "copy.wav";
  write_wav(copy_path.string(), wav.fs, wav.samples);
  REQUIRE(slurp(copy_path) == slurp(first.path));

  // annotations load and align with the manifest
  const AnnotationMap ann = load_annotations(ds.annotations_path);
  REQUIRE(ann.size() == 40);
  for (const auto& rec : ds.index.records) REQUIRE(ann.count(rec.record_id) == 1);

  // regeneration is byte-identical
  const SynthDataset ds2 = gen_dataset(cfg, dir2.string());
  for (std::size_t i = 0; i < ds.index.records.size(); ++i) {
    REQUIRE(slurp(ds.index.records[i].path) == slurp(ds2.index.records[i].path));
  }
  REQUIRE(slurp(ds.manifest_path).size() > 0);
  REQUIRE(slurp(ds.annotations_path) == slurp(ds2.annotations_path));
}

TEST_CASE("per-cell counts support imbalanced datasets") {
  const auto dir = std::filesystem::temp_directory_path() / "hs_synth_imb";
  std::filesystem::remove_all(dir);
  SynthDatasetConfig cfg;
  cfg.profiles = {test_profile('a')};
  cfg.n_per_class = 5;
  cfg.cell_counts[{'a', Label::Abnormal}] = 2;
  cfg.duration_s = 4.0;
  const SynthDataset ds = gen_dataset(cfg, dir.string());
  REQUIRE(ds.index.count('a', Label::Normal) == 5);
  REQUIRE(ds.index.count('a', Label::Abnormal) == 2);
}

TEST_CASE("short durations are rejected") {
  REQUIRE_THROWS_AS(gen_record(test_profile(), Label::Normal, 2.0, 1), ConfigError);
}
