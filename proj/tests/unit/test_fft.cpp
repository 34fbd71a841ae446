#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "heartsiam/fft.hpp"
#include "heartsiam/rng.hpp"

using namespace heartsiam;
using cd = std::complex<double>;

namespace {

// quadratic-time reference DFT
std::vector<cd> naive_dft(const std::vector<cd>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<cd> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    cd acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double ang = sign * 2.0 * kPi * static_cast<double>(j * k) / static_cast<double>(n);
      acc += x[k] * cd(std::cos(ang), std::sin(ang));
    }
    out[j] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

std::vector<cd> random_signal(std::size_t n, std::uint64_t seed) {
  rng::Counter r(seed);
  std::vector<cd> x(n);
  for (auto& v : x) v = cd(r.next_normal(), r.next_normal());
  return x;
}

}  // namespace

TEST_CASE("fft matches the naive DFT for power-of-two and odd sizes") {
  for (std::size_t n : {2u, 7u, 12u, 16u, 31u, 100u}) {
    const auto x = random_signal(n, 1000 + n);
    const auto fast = fft(x);
    const auto slow = naive_dft(x, false);
    double scale = 0.0;
    for (const auto& v : slow) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(fast[k] - slow[k]) < 1e-9 * scale);
  }
}

TEST_CASE("inverse fft inverts forward fft") {
  for (std::size_t n : {8u, 15u, 33u}) {
    const auto x = random_signal(n, 7 * n);
    const auto y = fft(fft(x), true);
    for (std::size_t k = 0; k < n; ++k) REQUIRE(std::abs(y[k] - x[k]) < 1e-10);
  }
}

TEST_CASE("fft of a pure tone concentrates in one bin") {
  const std::size_t n = 250;  // exercises Bluestein
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * kPi * 10.0 * i / n);
  const auto spec = fft_real(x);
  REQUIRE(std::abs(spec[10]) * 2.0 / n == Catch::Approx(1.0).margin(1e-9));
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (k == 10) continue;
    REQUIRE(std::abs(spec[k]) * 2.0 / n < 1e-9);
  }
}
