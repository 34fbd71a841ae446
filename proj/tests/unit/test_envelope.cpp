#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heartsiam/envelope.hpp"
#include "heartsiam/rng.hpp"

using namespace heartsiam;

namespace {
constexpr double kFs = 1000.0;
}

TEST_CASE("homomorphic envelope of zero input sits at the epsilon floor") {
  const std::vector<double> x(2000, 0.0);
  const auto env = homomorphic_envelope(x, kFs);
  REQUIRE(env.size() == x.size());
  for (double v : env) REQUIRE(v == Catch::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("homomorphic envelope peaks near an amplitude burst") {
  rng::Counter r(5);
  const std::size_t n = 4000;
  std::vector<double> x(n);
  const double center = 2000.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(-0.5 * std::pow((static_cast<double>(i) - center) / 60.0, 2.0));
    x[i] = (0.02 + w) * r.next_normal();
  }
  const auto env = homomorphic_envelope(x, kFs);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (env[i] > env[peak]) peak = i;
  REQUIRE(std::abs(static_cast<double>(peak) - center) <= 50.0);  // +-50 ms at 1 kHz
}

TEST_CASE("homomorphic envelope is homogeneous up to the epsilon floor") {
  rng::Counter r(17);
  std::vector<double> x(3000);
  for (auto& v : x) v = r.next_normal();
  const auto e1 = homomorphic_envelope(x, kFs);
  for (auto& v : x) v *= 2.0;
  const auto e2 = homomorphic_envelope(x, kFs);
  for (std::size_t i = 0; i < x.size(); ++i)
    REQUIRE(e2[i] == Catch::Approx(2.0 * e1[i]).epsilon(1e-3));
}

TEST_CASE("hilbert envelope of a pure sine is its amplitude") {
  const std::size_t n = 5000;
  const double amp = 0.7;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * 40.0 * i / kFs);
  const auto env = hilbert_envelope(x);
  for (std::size_t i = n / 10; i < 9 * n / 10; ++i)
    REQUIRE(env[i] == Catch::Approx(amp).epsilon(0.02));
}

TEST_CASE("hilbert envelope of zero is zero and of DC is its magnitude") {
  const std::vector<double> zeros(100, 0.0);
  for (double v : hilbert_envelope(zeros)) REQUIRE(v == Catch::Approx(0.0).margin(1e-12));

  const std::vector<double> dc(100, -0.3);
  for (double v : hilbert_envelope(dc)) REQUIRE(v == Catch::Approx(0.3).margin(1e-9));
}
