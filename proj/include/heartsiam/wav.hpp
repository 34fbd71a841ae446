#pragma once

// Minimal RIFF/WAVE reader and writer: PCM format 1, mono, 16-bit
// little-endian. Anything else is rejected with an error naming the field.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(static_cast<std::uint16_t>(p[0]) |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

struct WavData {
  double fs = 0.0;
  std::vector<double> samples;  // scaled to [-1, 1] by 1/32768
};

inline WavData load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_wav: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || bytes.compare(0, 4, "RIFF") != 0)
    throw DataError("load_wav: missing RIFF header in " + path);
  if (bytes.compare(8, 4, "WAVE") != 0)
    throw DataError("load_wav: missing WAVE form type in " + path);

  WavData wav;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const std::string id = bytes.substr(pos, 4);
    const std::uint32_t size = detail::read_u32le(p + pos + 4);
    pos += 8;
    if (pos + size > n) throw DataError("load_wav: truncated chunk '" + id + "' in " + path);
    if (id == "fmt ") {
      if (size < 16) throw DataError("load_wav: fmt chunk too small in " + path);
      const std::uint16_t format = detail::read_u16le(p + pos);
      const std::uint16_t channels = detail::read_u16le(p + pos + 2);
      const std::uint32_t fs = detail::read_u32le(p + pos + 4);
      const std::uint16_t bits = detail::read_u16le(p + pos + 14);
      if (format != 1)
        throw DataError("load_wav: unsupported format code " + std::to_string(format) +
                        " (PCM required) in " + path);
      if (channels != 1)
        throw DataError("load_wav: unsupported channel count " + std::to_string(channels) +
                        " (mono required) in " + path);
      if (bits != 16)
        throw DataError("load_wav: unsupported bits per sample " + std::to_string(bits) +
                        " (16 required) in " + path);
      wav.fs = static_cast<double>(fs);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError("load_wav: data chunk before fmt chunk in " + path);
      const std::size_t count = size / 2;
      wav.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto u = detail::read_u16le(p + pos + 2 * i);
        wav.samples[i] = static_cast<double>(static_cast<std::int16_t>(u)) / 32768.0;
      }
      have_data = true;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }
  if (!have_fmt) throw DataError("load_wav: missing fmt chunk in " + path);
  if (!have_data) throw DataError("load_wav: missing data chunk in " + path);
  return wav;
}

// Canonical 44-byte header followed by 16-bit PCM. Samples are expected in
// [-1, 1]; values are scaled by 32768, rounded, and clamped.
inline void write_wav(const std::string& path, double fs, const std::vector<double>& samples) {
  std::string out;
  out.reserve(44 + samples.size() * 2);
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out += "RIFF";
  detail::put_u32le(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  const auto ifs = static_cast<std::uint32_t>(fs);
  detail::put_u32le(out, ifs);
  detail::put_u32le(out, ifs * 2);  // byte rate
  detail::put_u16le(out, 2);        // block align
  detail::put_u16le(out, 16);       // bits per sample
  out += "data";
  detail::put_u32le(out, data_bytes);
  for (double v : samples) {
    double scaled = std::nearbyint(v * 32768.0);
    if (scaled > 32767.0) scaled = 32767.0;
    if (scaled < -32768.0) scaled = -32768.0;
    detail::put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("write_wav: cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("write_wav: short write to " + path);
}

}  // namespace heartsiam
