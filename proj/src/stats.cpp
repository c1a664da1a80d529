#include "erpaug/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "erpaug/error.hpp"

namespace erpaug {

void PairedSample::validate() const {
  if (values_a.size() != values_b.size()) {
    throw LengthMismatch("paired sample '" + condition_a + "' vs '" + condition_b + "' has " +
                         std::to_string(values_a.size()) + " and " + std::to_string(values_b.size()) + " values");
  }
  if (values_a.size() < 2) throw TooFewSamples("paired tests need at least two pairs");
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!std::all_of(values_a.begin(), values_a.end(), in_unit) ||
      !std::all_of(values_b.begin(), values_b.end(), in_unit)) {
    throw OutOfBounds("paired values must lie in [0, 1]");
  }
}

double paired_permutation_test(const PairedSample& sample, std::size_t n_permutations, std::uint64_t seed) {
  sample.validate();
  if (n_permutations < 1000) throw InvalidSpec("permutation tests need at least 1000 permutations");
  const std::size_t n = sample.values_a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = sample.values_a[i] - sample.values_b[i];

  // Sums instead of means: the 1/n factor does not change the ranking.
  const double observed = std::abs(std::accumulate(d.begin(), d.end(), 0.0));
  const double scale = std::accumulate(d.begin(), d.end(), 0.0, [](double s, double v) { return s + std::abs(v); });
  const double cut = observed - 1e-12 * std::max(scale, 1.0);

  if (n < 63 && (std::uint64_t{1} << n) <= n_permutations) {
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (mask >> i) & 1U ? -d[i] : d[i];
      if (std::abs(s) >= cut) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
  }

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n_permutations; ++k) {
    double s = 0.0;
    for (double v : d) s += flip(rng) ? -v : v;
    if (std::abs(s) >= cut) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_permutations + 1);
}

std::vector<double> holm_correction(std::span<const double> p_values) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("p-values must lie in [0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double adjusted = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, adjusted);
    out[order[k]] = running;
  }
  return out;
}

}  // namespace erpaug
