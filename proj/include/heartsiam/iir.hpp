#pragma once

// IIR filtering: direct form II transposed of arbitrary order, zero-phase
// forward-backward application, and the two Butterworth designs the pipeline
// needs (order-2 band-pass for the analysis bands, order-1 low-pass for the
// homomorphic envelope). Designs use the bilinear transform with prewarped
// edge frequencies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "heartsiam/common.hpp"

namespace heartsiam {

struct Iir {
  std::vector<double> b;  // numerator, b[0] applied to x[n]
  std::vector<double> a;  // denominator, a[0] == 1

  int order() const { return static_cast<int>(a.size()) - 1; }
};

namespace detail {

// Initial delay-line state such that a constant input x0 produces the
// filter's steady-state response from the very first sample. For DF2T with
// y_ss = H(1)*x0 the delays are d_k = sum_{j>=k} (b_j*x0 - a_j*y_ss).
inline std::vector<double> steady_state_zi(const Iir& f, double x0) {
  const std::size_t n = f.a.size();
  double sb = 0.0, sa = 0.0;
  for (double v : f.b) sb += v;
  for (double v : f.a) sa += v;
  const double y_ss = (sa != 0.0) ? (sb / sa) * x0 : 0.0;
  std::vector<double> d(n, 0.0);  // d[0] unused
  double acc = 0.0;
  for (std::size_t k = n - 1; k >= 1; --k) {
    acc += f.b[k] * x0 - f.a[k] * y_ss;
    d[k] = acc;
  }
  return d;
}

inline void iir_apply(const Iir& f, std::span<const double> x, std::vector<double>& y,
                      std::vector<double> d) {
  const std::size_t n = f.a.size();
  y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = f.b[0] * xi + d[1];
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = f.b[k] * xi - f.a[k] * yi + d[k + 1];
    d[n - 1] = f.b[n - 1] * xi - f.a[n - 1] * yi;
    y[i] = yi;
  }
}

}  // namespace detail

// Single forward pass with steady-state initial conditions.
inline std::vector<double> iir_filter(const Iir& f, std::span<const double> x) {
  std::vector<double> y;
  if (x.empty()) return y;
  detail::iir_apply(f, x, y, detail::steady_state_zi(f, x[0]));
  return y;
}

// Zero-phase filtering: odd-reflect pad by 3x filter order, filter forward,
// reverse, filter again, reverse, trim. Linear in the input.
inline std::vector<double> filtfilt(const Iir& f, std::span<const double> x) {
  if (x.empty()) return {};
  const std::size_t n = x.size();
  const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(f.order()),
                                                n > 1 ? n - 1 : 0);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  std::vector<double> y;
  detail::iir_apply(f, ext, y, detail::steady_state_zi(f, ext[0]));
  std::reverse(y.begin(), y.end());
  std::vector<double> z;
  detail::iir_apply(f, y, z, detail::steady_state_zi(f, y[0]));
  std::reverse(z.begin(), z.end());
  return std::vector<double>(z.begin() + static_cast<std::ptrdiff_t>(pad),
                             z.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

// Order-1 Butterworth low-pass (bilinear transform, prewarped cutoff).
inline Iir butter_lowpass1(double fc, double fs) {
  if (!(fc > 0.0 && fc < fs / 2.0)) throw ConfigError("butter_lowpass1: invalid cutoff");
  const double w = std::tan(kPi * fc / fs);
  const double k = w / (1.0 + w);
  return Iir{{k, k}, {1.0, (w - 1.0) / (w + 1.0)}};
}

// Order-2 Butterworth band-pass (two pole pairs; effectively order 4 when run
// forward-backward). Designed from the analog prototype via pole mapping and
// the bilinear transform; unit gain at the prewarped geometric band center.
inline Iir butter_bandpass2(double lo, double hi, double fs) {
  if (!(0.0 < lo && lo < hi && hi < fs / 2.0))
    throw ConfigError("butter_bandpass2: invalid band edges (" + std::to_string(lo) + ", " +
                      std::to_string(hi) + ") at fs=" + std::to_string(fs));
  using cd = std::complex<double>;
  const double wl = std::tan(kPi * lo / fs);
  const double wh = std::tan(kPi * hi / fs);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  // Analog prototype poles for N=2 Butterworth, mapped LP->BP:
  // s^2 - p*bw*s + w0^2 = 0 for each prototype pole p.
  const cd proto[2] = {cd(-std::sqrt(0.5), std::sqrt(0.5)), cd(-std::sqrt(0.5), -std::sqrt(0.5))};
  cd zpoles[4];
  int np = 0;
  for (const cd& p : proto) {
    const cd disc = std::sqrt(p * p * (bw * bw) - 4.0 * w0sq);
    const cd s1 = (p * bw + disc) * 0.5;
    const cd s2 = (p * bw - disc) * 0.5;
    // bilinear s -> z with c = 1 (edges prewarped above)
    zpoles[np++] = (1.0 + s1) / (1.0 - s1);
    zpoles[np++] = (1.0 + s2) / (1.0 - s2);
  }

  // Zeros: two at z=+1 (from s=0) and two at z=-1 -> b(z^-1) = 1,0,-2,0,1.
  std::vector<double> b = {1.0, 0.0, -2.0, 0.0, 1.0};

  // Expand denominator polynomial from the pole set; roots come in conjugate
  // pairs so the coefficients are real.
  std::vector<cd> ac = {1.0};
  for (int i = 0; i < 4; ++i) {
    std::vector<cd> next(ac.size() + 1, cd(0.0, 0.0));
    for (std::size_t j = 0; j < ac.size(); ++j) {
      next[j] += ac[j];
      next[j + 1] -= ac[j] * zpoles[i];
    }
    ac = std::move(next);
  }
  std::vector<double> a(ac.size());
  for (std::size_t i = 0; i < ac.size(); ++i) a[i] = ac[i].real();

  // Normalize to unit gain at the band center.
  const double theta0 = 2.0 * std::atan(std::sqrt(w0sq));
  const cd z_inv = std::exp(cd(0.0, -theta0));
  cd num(0.0, 0.0), den(0.0, 0.0);
  cd zp(1.0, 0.0);
  for (std::size_t i = 0; i < b.size(); ++i, zp *= z_inv) {
    num += b[i] * zp;
    den += a[i] * zp;
  }
  const double gain = std::abs(den / num);
  for (double& v : b) v *= gain;
  return Iir{std::move(b), std::move(a)};
}

}  // namespace heartsiam
