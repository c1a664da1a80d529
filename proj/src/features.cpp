#include "erpaug/features.hpp"

#include <cmath>

#include "erpaug/error.hpp"

namespace erpaug {

std::size_t slope_window_count(std::size_t samples, std::size_t width, std::size_t stride) {
  if (width < 2) throw WindowTooLarge("slope windows need at least two samples");
  if (stride < 1) throw WindowTooLarge("slope window stride must be positive");
  if (width > samples) {
    throw WindowTooLarge("slope window of " + std::to_string(width) + " samples exceeds " +
                         std::to_string(samples) + "-sample epochs");
  }
  return (samples - width) / stride + 1;
}

FeatureMatrix slope_features(const EpochSet& set, std::size_t width_samples, std::size_t stride_samples) {
  const std::size_t windows = slope_window_count(set.samples(), width_samples, stride_samples);
  const auto w = static_cast<Eigen::Index>(width_samples);

  // slope = sum (t - tbar) y / sum (t - tbar)^2, the same weights for every window.
  Eigen::RowVectorXd weights(w);
  const double tbar = static_cast<double>(w - 1) / 2.0;
  for (Eigen::Index t = 0; t < w; ++t) weights(t) = static_cast<double>(t) - tbar;
  weights /= weights.squaredNorm();

  const auto channels = static_cast<Eigen::Index>(set.channels());
  FeatureMatrix out(static_cast<Eigen::Index>(set.size()), channels * static_cast<Eigen::Index>(windows));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& e = set.epochs[i];
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < channels; ++c) {
      for (std::size_t k = 0; k < windows; ++k) {
        const auto start = static_cast<Eigen::Index>(k * stride_samples);
        out(row, c * static_cast<Eigen::Index>(windows) + static_cast<Eigen::Index>(k)) =
            weights.dot(e.row(c).segment(start, w));
      }
    }
  }
  return out;
}

FeatureMatrix raw_features(const EpochSet& set) {
  const auto channels = static_cast<Eigen::Index>(set.channels());
  const auto samples = static_cast<Eigen::Index>(set.samples());
  FeatureMatrix out(static_cast<Eigen::Index>(set.size()), channels * samples);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& e = set.epochs[i];
    for (Eigen::Index c = 0; c < channels; ++c) {
      out.row(static_cast<Eigen::Index>(i)).segment(c * samples, samples) = e.row(c);
    }
  }
  return out;
}

FeatureNormalization FeatureNormalization::fit(const FeatureMatrix& train) {
  if (train.rows() == 0) throw TooFewSamples("feature normalisation needs training rows");
  FeatureNormalization n;
  n.mean = train.colwise().mean();
  const Eigen::MatrixXd centered = train.rowwise() - n.mean;
  n.scale = (centered.colwise().squaredNorm() / static_cast<double>(train.rows())).cwiseSqrt();
  for (Eigen::Index j = 0; j < n.scale.size(); ++j) {
    if (!(n.scale(j) > 1e-12)) n.scale(j) = 1.0;
  }
  return n;
}

FeatureMatrix FeatureNormalization::apply(const FeatureMatrix& features) const {
  if (features.cols() != mean.size()) throw ShapeMismatch("feature dimension differs from training");
  return (features.rowwise() - mean).array().rowwise() / scale.array();
}

}  // namespace erpaug
