#pragma once

// Envelope features for segmentation: the homomorphic envelope
// exp(LPF(ln(|x| + eps))) with an 8 Hz zero-phase low-pass, and the Hilbert
// envelope (magnitude of the FFT analytic signal).

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"
#include "heartsiam/fft.hpp"
#include "heartsiam/iir.hpp"

namespace heartsiam {

inline constexpr double kHomomorphicEps = 1e-6;
inline constexpr double kHomomorphicCutoffHz = 8.0;

inline std::vector<double> homomorphic_envelope(std::span<const double> x, double fs) {
  if (x.empty()) throw DataError("homomorphic_envelope: empty input");
  std::vector<double> logmag(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) logmag[i] = std::log(std::abs(x[i]) + kHomomorphicEps);
  const Iir lp = butter_lowpass1(kHomomorphicCutoffHz, fs);
  std::vector<double> smooth = filtfilt(lp, logmag);
  for (double& v : smooth) v = std::exp(v);
  return smooth;
}

inline std::vector<double> hilbert_envelope(std::span<const double> x) {
  if (x.empty()) throw DataError("hilbert_envelope: empty input");
  const std::size_t n = x.size();
  if (n == 1) return {std::abs(x[0])};
  std::vector<std::complex<double>> spec = fft_real(std::vector<double>(x.begin(), x.end()));
  // analytic signal: keep DC (and Nyquist for even n), double positive bins,
  // zero negative bins
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < half; ++k) spec[k] *= 2.0;
  if (n % 2 == 1) spec[half] *= 2.0;
  for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
  spec = fft(std::move(spec), true);
  std::vector<double> env(n);
  for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(spec[i]);
  return env;
}

}  // namespace heartsiam
