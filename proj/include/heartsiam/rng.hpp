#pragma once

// Counter-based deterministic RNG. Every random draw in the pipeline is keyed
// by (seed, context tags...), so independent work items produce the same
// samples no matter how the work is scheduled. The generator is splitmix64
// over a derived key; key derivation is a fixed mixing chain.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace heartsiam::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t chain(std::uint64_t key, std::uint64_t value) {
  return mix64((key + kGamma) ^ mix64(value));
}

inline std::uint64_t chain(std::uint64_t key, std::string_view tag) {
  std::uint64_t h = key + kGamma;
  for (char c : tag) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return h;
}

class Counter {
 public:
  explicit Counter(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform in [0, n). Lemire's multiply-shift with rejection.
  std::uint64_t next_index(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller; consumes two uniforms per call.
  double next_normal() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

template <typename T>
void shuffle(std::vector<T>& v, Counter& rng) {
  // Hand-rolled Fisher-Yates; std::shuffle's draw sequence is
  // implementation-defined and would break cross-toolchain determinism.
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.next_index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace heartsiam::rng
