#pragma once

#include <span>
#include <vector>

#include "erpaug/epochs.hpp"
#include "erpaug/rbf.hpp"

namespace erpaug {

struct RotationAugmentPlan {
  std::vector<Axis> axes;
  double angle_deg = 18.0;
  Kernel kernel{KernelKind::Cubic};
  // Add both +angle and -angle copies.
  bool symmetric = true;
  double ridge = kDefaultRidge;

  void validate() const;
};

struct TimeShiftPlan {
  // Additional marker offsets; offset 0 (the original cut) is always kept.
  std::vector<double> offsets_ms;

  void validate(double epoch_length_ms) const;
};

// Every epoch mapped through the same resampler. Works for any angle,
// including zero.
EpochSet resample_epochs(const EpochSet& epochs, const RotationSpec& rotation, const Kernel& kernel,
                         double ridge = kDefaultRidge);

// Originals first (bit-identical), then for every axis the +angle copies and,
// for symmetric plans, the -angle copies. Size |e| (1 + 2 |axes|) for symmetric
// plans. Epochs must already be standardised per channel.
EpochSet rotational_augment(const EpochSet& epochs, const RotationAugmentPlan& plan);
// Union over several plans: originals once, then the copies of each plan.
EpochSet rotational_augment(const EpochSet& epochs, std::span<const RotationAugmentPlan> plans);

// Every epoch replaced by its copy resampled at the rotated positions.
EpochSet cap_shift_replace(const EpochSet& epochs, Axis axis, double angle_deg, const Kernel& kernel,
                           double ridge = kDefaultRidge);

// Cuts one epoch per marker at offset 0 and at every plan offset (all relative
// to `base_offset_ms`). A marker is dropped entirely, and counted, if any of
// its windows leaves the recording, so every kept marker contributes
// 1 + |offsets| epochs and the class ratio is preserved exactly.
SegmentResult temporal_augment(const ContinuousRecording& stream, std::span<const Marker> markers,
                               const Window& window_ms, const TimeShiftPlan& plan,
                               const std::optional<Montage>& montage, double base_offset_ms = 0.0);

}  // namespace erpaug
