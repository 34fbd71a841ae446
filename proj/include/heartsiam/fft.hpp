#pragma once

// Complex FFT: iterative radix-2 for power-of-two sizes, Bluestein's chirp-z
// for everything else. Plenty fast for the record lengths this pipeline sees.

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

namespace detail {

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace detail

// Forward (inverse=false) or inverse (with 1/N scaling) DFT of arbitrary size.
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a,
                                             bool inverse = false) {
  const std::size_t n = a.size();
  if (n == 0) throw NumericError("fft: empty input");
  if ((n & (n - 1)) == 0) {
    detail::fft_pow2(a, inverse);
    return a;
  }
  // Bluestein: x_k * c_k convolved with conj(chirp), c_k = exp(-i*pi*k^2/n).
  // k^2 mod 2n keeps the chirp phase exact for large k.
  const std::size_t m = detail::next_pow2(2 * n - 1);
  std::vector<std::complex<double>> chirp(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double theta = kPi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = std::complex<double>(std::cos(theta), sign * std::sin(theta));
  }
  std::vector<std::complex<double>> fa(m), fb(m);
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
  detail::fft_pow2(fa, false);
  detail::fft_pow2(fb, false);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  detail::fft_pow2(fa, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fa[k] * chirp[k];
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : out) x *= inv;
  }
  return out;
}

inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x,
                                                  bool inverse = false) {
  std::vector<std::complex<double>> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = std::complex<double>(x[i], 0.0);
  return fft(std::move(a), inverse);
}

}  // namespace heartsiam
