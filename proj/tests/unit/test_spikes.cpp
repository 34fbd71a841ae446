#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "heartsiam/rng.hpp"
#include "heartsiam/spikes.hpp"

using namespace heartsiam;

namespace {

constexpr double kFs = 1000.0;

std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
  rng::Counter r(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = r.next_normal();
  return x;
}

double max_maa_ratio(const std::vector<double>& x, std::size_t win) {
  std::vector<double> maa;
  for (std::size_t w = 0; w + 1 <= x.size() / win; ++w) {
    double m = 0.0;
    for (std::size_t i = w * win; i < (w + 1) * win; ++i) m = std::max(m, std::abs(x[i]));
    maa.push_back(m);
  }
  std::sort(maa.begin(), maa.end());
  const std::size_t n = maa.size();
  const double median = (n % 2 == 1) ? maa[n / 2] : 0.5 * (maa[n / 2 - 1] + maa[n / 2]);
  return maa.back() / median;
}

}  // namespace

TEST_CASE("quiet noise passes through untouched") {
  const auto x = gaussian_noise(5000, 11);
  REQUIRE(max_maa_ratio(x, 500) < 3.0);  // precondition of the scenario
  const auto y = remove_spikes(x, kFs);
  REQUIRE(y == x);
}

TEST_CASE("an injected spike is removed until the MAA predicate holds") {
  auto x = gaussian_noise(5000, 23);
  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / x.size());
  x[2750] += 20.0 * rms;
  const auto y = remove_spikes(x, kFs);
  REQUIRE(y.size() == x.size());
  REQUIRE(max_maa_ratio(y, 500) <= 3.0);
}

TEST_CASE("all-zero input stays all-zero") {
  const std::vector<double> x(1000, 0.0);
  const auto y = remove_spikes(x, kFs);
  for (double v : y) REQUIRE(v == 0.0);
}

TEST_CASE("spike removal never raises the maximum amplitude") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    auto x = gaussian_noise(3000, seed);
    x[seed * 413 % x.size()] += 25.0;
    double before = 0.0;
    for (double v : x) before = std::max(before, std::abs(v));
    const auto y = remove_spikes(x, kFs);
    double after = 0.0;
    for (double v : y) after = std::max(after, std::abs(v));
    REQUIRE(after <= before);
  }
}

TEST_CASE("signals shorter than one window are rejected") {
  const std::vector<double> x(400, 0.0);
  REQUIRE_THROWS_AS(remove_spikes(x, kFs), DataError);
}
