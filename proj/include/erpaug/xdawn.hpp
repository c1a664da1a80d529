#pragma once

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"

namespace erpaug {

struct XdawnFilters {
  // C x n_filters, columns ordered by decreasing Rayleigh quotient.
  Eigen::MatrixXd filters;
  // Generalised Rayleigh quotient of every column.
  Eigen::VectorXd quotients;
  // Shrinkage weight applied to the total covariance (0 when full rank).
  double shrinkage = 0.0;
};

// Covariance of the positive-class average response and of all concatenated
// training epochs, both per time sample.
Eigen::MatrixXd evoked_covariance(const EpochSet& train);
Eigen::MatrixXd total_covariance(const EpochSet& train);

// Spatial filters maximising (w' S_evoked w) / (w' S_total w), found by
// whitening S_total and diagonalising the whitened evoked covariance. A rank
// deficient S_total is shrunk towards a scaled identity instead of failing.
XdawnFilters xdawn_fit(const EpochSet& train, std::size_t n_filters);

// X -> W' X for every epoch; the result has no electrode geometry.
EpochSet xdawn_apply(const EpochSet& set, const Eigen::MatrixXd& filters);

}  // namespace erpaug
