#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace erpaug {

struct PairedSample {
  std::string condition_a;
  std::string condition_b;
  std::vector<double> values_a;
  std::vector<double> values_b;

  // Equal lengths of at least two, values in [0, 1].
  void validate() const;
};

// Two-sided sign-flip test on the mean paired difference. All 2^n sign
// patterns are enumerated when that is no more than n_permutations;
// otherwise n_permutations random flips give p = (hits + 1) / (N + 1).
// Throws LengthMismatch or InvalidSpec (n_permutations < 1000).
double paired_permutation_test(const PairedSample& sample, std::size_t n_permutations, std::uint64_t seed);

// Holm step-down adjustment, monotone, capped at 1, in input order.
std::vector<double> holm_correction(std::span<const double> p_values);

}  // namespace erpaug
