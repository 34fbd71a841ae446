#pragma once

// Cardiac-cycle windows: one 4 x 2500 segment per S1 onset, zero-padded past
// the record end, plus the binary per-record segment cache (magic "HSSG").

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "heartsiam/bands.hpp"
#include "heartsiam/common.hpp"
#include "heartsiam/hsmm.hpp"

namespace heartsiam {

inline constexpr std::size_t kCycleBands = 4;
inline constexpr std::size_t kCycleLength = 2500;
inline constexpr std::size_t kMinCycleSamples = 500;

struct CycleSegment {
  std::vector<float> data;  // kCycleBands x kCycleLength, row-major
  std::string record_id;
  char domain = 'a';
  Label label = Label::Unknown;
  std::uint64_t cycle_start_index = 0;

  float at(std::size_t band, std::size_t t) const { return data[band * kCycleLength + t]; }
};

struct ExtractResult {
  std::vector<CycleSegment> segments;
  bool no_onset = false;  // warning flag: no S1 onset was found
};

inline ExtractResult extract_cycles(const BandStack& stack, const StateSequence& seq,
                                    const std::string& record_id, char domain, Label label) {
  if (seq.feature_rate <= 0.0) throw ConfigError("extract_cycles: missing feature rate");
  const auto factor = static_cast<std::size_t>(std::llround(stack.fs / seq.feature_rate));
  if (factor == 0 || stack.fs != static_cast<double>(factor) * seq.feature_rate)
    throw ConfigError("extract_cycles: band rate must be an integer multiple of the feature rate");

  const std::size_t n = stack.length();
  ExtractResult result;
  for (std::size_t t = 0; t < seq.states.size(); ++t) {
    const bool is_onset = seq.states[t] == static_cast<int>(HeartState::S1) &&
                          (t == 0 || seq.states[t - 1] != static_cast<int>(HeartState::S1));
    if (!is_onset) continue;
    const std::size_t onset = t * factor;  // sample-and-hold upsampling
    if (onset >= n || n - onset < kMinCycleSamples) continue;

    CycleSegment seg;
    seg.record_id = record_id;
    seg.domain = domain;
    seg.label = label;
    seg.cycle_start_index = onset;
    seg.data.assign(kCycleBands * kCycleLength, 0.0f);
    const std::size_t span = std::min(kCycleLength, n - onset);
    for (std::size_t b = 0; b < kCycleBands; ++b)
      for (std::size_t i = 0; i < span; ++i)
        seg.data[b * kCycleLength + i] = static_cast<float>(stack.bands[b][onset + i]);
    result.segments.push_back(std::move(seg));
  }
  result.no_onset = result.segments.empty();
  return result;
}

// ---- segment cache -------------------------------------------------------
// magic "HSSG", u32 version = 1, u32 segment count, then per segment
// 4 x 2500 little-endian f32 row-major followed by u64 cycle_start_index.

inline constexpr char kSegmentCacheMagic[4] = {'H', 'S', 'S', 'G'};
inline constexpr std::uint32_t kSegmentCacheVersion = 1;

namespace detail {
template <typename T>
void write_le(std::ofstream& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));  // little-endian host
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}
}  // namespace detail

inline void write_segment_cache(const std::string& path, const std::vector<CycleSegment>& segments) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("write_segment_cache: cannot open " + path);
  out.write(kSegmentCacheMagic, 4);
  detail::write_le<std::uint32_t>(out, kSegmentCacheVersion);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(segments.size()));
  for (const auto& seg : segments) {
    if (seg.data.size() != kCycleBands * kCycleLength)
      throw DataError("write_segment_cache: segment with bad shape");
    for (float v : seg.data) detail::write_le<float>(out, v);
    detail::write_le<std::uint64_t>(out, seg.cycle_start_index);
  }
  if (!out) throw DataError("write_segment_cache: short write to " + path);
}

// Reads data and start indices; record metadata is attached by the caller
// (the cache is keyed by record id through its file name).
inline std::vector<CycleSegment> read_segment_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_segment_cache: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSegmentCacheMagic, 4) != 0)
    throw DataError("read_segment_cache: bad magic in " + path);
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kSegmentCacheVersion)
    throw DataError("read_segment_cache: unsupported version " + std::to_string(version) + " in " +
                    path);
  const auto count = detail::read_le<std::uint32_t>(in);
  std::vector<CycleSegment> segments(count);
  for (auto& seg : segments) {
    seg.data.resize(kCycleBands * kCycleLength);
    for (float& v : seg.data) v = detail::read_le<float>(in);
    seg.cycle_start_index = detail::read_le<std::uint64_t>(in);
    if (!in) throw DataError("read_segment_cache: truncated file " + path);
  }
  return segments;
}

}  // namespace heartsiam
