#include <doctest.h>

#include <cmath>
#include <random>

#include "erpaug/error.hpp"
#include "erpaug/stats.hpp"
#include "oracles.hpp"

using namespace erpaug;

namespace {

PairedSample sample_from(const std::vector<double>& a, const std::vector<double>& b) {
  return PairedSample{"a", "b", a, b};
}

}  // namespace

TEST_CASE("Holm fixture") {
  const std::vector<double> p{0.01, 0.04, 0.03};
  const auto h = holm_correction(p);
  REQUIRE(h.size() == 3);
  CHECK(h[0] == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(h[2] == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(holm_correction(std::vector<double>{0.2}) == std::vector<double>{0.2});
  CHECK(holm_correction(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
  CHECK(holm_correction(std::vector<double>{0.6, 0.7})[1] == 1.0);
  CHECK(holm_correction(std::vector<double>{}).empty());
}

TEST_CASE("Holm bounds and monotonicity on random inputs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> p(1 + k % 9);
    for (auto& v : p) v = u(rng) * u(rng);
    const auto h = holm_correction(p);
    const double m = static_cast<double>(p.size());
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(h[i] >= p[i]);
      CHECK(h[i] <= std::min(1.0, m * p[i]) + 1e-15);
    }
    for (std::size_t i = 1; i < order.size(); ++i) CHECK(h[order[i]] >= h[order[i - 1]]);
  }
}

TEST_CASE("sign-flip test against exhaustive enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.4, 0.9);
  for (std::size_t n = 2; n <= 12; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> a(n), b(n), d(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = u(rng);
        b[i] = std::clamp(a[i] - 0.03 + 0.05 * (u(rng) - 0.65), 0.0, 1.0);
        d[i] = a[i] - b[i];
      }
      CAPTURE(n);
      const double p = paired_permutation_test(sample_from(a, b), 10000, 1);
      CHECK(p == doctest::Approx(oracle::exhaustive_sign_flip(d)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sign-flip special cases") {
  const std::vector<double> v{0.7, 0.8, 0.65, 0.9};
  CHECK(paired_permutation_test(sample_from(v, v), 1000, 0) == 1.0);
  // Differences (+e, -e, 0).
  CHECK(paired_permutation_test(sample_from({0.6, 0.5, 0.7}, {0.5, 0.6, 0.7}), 1000, 0) == 1.0);

  std::vector<double> a(20), b(20);
  for (int i = 0; i < 20; ++i) {
    b[static_cast<std::size_t>(i)] = 0.5 + 0.01 * i;
    a[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] + 0.1;
  }
  const double p = paired_permutation_test(sample_from(a, b), 10000, 7);
  CHECK(p <= 0.001);
  CHECK(p == doctest::Approx(1.0 / 10001.0).epsilon(1e-12));
}

TEST_CASE("sign-flip symmetry and determinism") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.3, 0.9);
  std::vector<double> a(16), b(16);
  for (std::size_t i = 0; i < 16; ++i) a[i] = u(rng), b[i] = std::clamp(a[i] - 0.02 + 0.1 * (u(rng) - 0.6), 0.0, 1.0);
  const double ab = paired_permutation_test(sample_from(a, b), 5000, 3);
  const double ba = paired_permutation_test(sample_from(b, a), 5000, 3);
  CHECK(ab == ba);
  CHECK(ab == paired_permutation_test(sample_from(a, b), 5000, 3));
  CHECK(ab > 0.0);
  CHECK(ab <= 1.0);
}

TEST_CASE("paired sample validation") {
  CHECK_THROWS_AS(paired_permutation_test(sample_from({0.5, 0.6}, {0.5}), 1000, 0), LengthMismatch);
  CHECK_THROWS_AS(paired_permutation_test(sample_from({0.5}, {0.5}), 1000, 0), TooFewSamples);
  CHECK_THROWS_AS(paired_permutation_test(sample_from({0.5, 1.2}, {0.5, 0.1}), 1000, 0), DataError);
  CHECK_THROWS_AS(paired_permutation_test(sample_from({0.5, 0.6}, {0.5, 0.1}), 999, 0), InvalidSpec);
}
