#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"
#include "erpaug/geometry.hpp"

namespace erpaug {

// Smooth scalp map centred on a point of the unit sphere.
struct SourcePattern {
  Eigen::Vector3d center = Eigen::Vector3d::UnitZ();
  double width = 0.6;  // radians
  double gain = 1.0;

  void validate() const;
};

// gain * exp(-(angle(center, position) / width)^2).
double scalp_field(const SourcePattern& pattern, const Eigen::Vector3d& position);

struct ErpSpec {
  double peak_ms = 300.0;
  double width_ms = 80.0;  // standard deviation of the Gaussian bump
  double amplitude = 1.0;
  double latency_jitter_ms = 0.0;
  // Relative standard deviation of the per-trial amplitude.
  double amplitude_jitter = 0.0;
};

struct NoiseSpec {
  double pink_gain = 1.0;
  double white_gain = 0.1;
  // Angular length scale (radians) of the Gaussian spatial covariance.
  double spatial_correlation_scale = 0.5;
};

struct SessionSpec {
  MontageName montage = MontageName::Cap64;
  std::size_t n_positive = 120;
  std::size_t n_negative = 720;
  double inter_marker_ms = 1000.0;
  double sampling_rate_hz = 1000.0;
  // Quiet lead-in and tail around the marker train.
  double margin_ms = 1500.0;
  ErpSpec erp;
  NoiseSpec noise;
  SourcePattern pattern;
  // Physical displacement of the cap; the recorded labels stay nominal.
  std::optional<RotationSpec> cap_rotation;
  std::uint64_t seed = 0;

  // Throws InvalidSpec naming the offending field.
  void validate() const;
};

// Continuous recording with markers in random class order. The stream is
// spatially correlated pink noise plus white noise; every positive marker adds
// a Gaussian bump, clipped to its own inter-marker interval and weighted by the
// scalp field at the true (possibly rotated) electrode positions. The returned
// montage is the nominal one.
Session generate_session(const SessionSpec& spec);

}  // namespace erpaug
