#pragma once

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"

namespace erpaug {

// One row per epoch.
using FeatureMatrix = Eigen::MatrixXd;

std::size_t slope_window_count(std::size_t samples, std::size_t width, std::size_t stride);

// Least-squares line slope (per sample) of every sliding window of every
// channel, concatenated channel-major. Throws WindowTooLarge.
FeatureMatrix slope_features(const EpochSet& set, std::size_t width_samples, std::size_t stride_samples);

// Raw samples of every channel, concatenated channel-major.
FeatureMatrix raw_features(const EpochSet& set);

// Per-feature z-scoring learned on training rows. Constant features get unit
// scale so they map to zero.
struct FeatureNormalization {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureNormalization fit(const FeatureMatrix& train);
  FeatureMatrix apply(const FeatureMatrix& features) const;
};

}  // namespace erpaug
