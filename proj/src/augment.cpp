#include "erpaug/augment.hpp"

#include <algorithm>
#include <cmath>

#include "erpaug/error.hpp"

namespace erpaug {

void RotationAugmentPlan::validate() const {
  if (axes.empty()) throw InvalidSpec("rotation augmentation needs at least one axis");
  if (!(angle_deg > 0.0) || angle_deg > 180.0) {
    throw InvalidSpec("rotation augmentation angle must lie in (0, 180] degrees");
  }
  for (std::size_t i = 0; i < axes.size(); ++i) {
    for (std::size_t j = i + 1; j < axes.size(); ++j) {
      if (axes[i] == axes[j]) throw InvalidSpec("rotation augmentation repeats an axis");
    }
  }
}

void TimeShiftPlan::validate(double epoch_length_ms) const {
  for (std::size_t i = 0; i < offsets_ms.size(); ++i) {
    const double o = offsets_ms[i];
    if (!std::isfinite(o) || o == 0.0) throw InvalidSpec("time shift offsets must be finite and nonzero");
    if (std::abs(o) >= epoch_length_ms) {
      throw InvalidSpec("time shift offset " + std::to_string(o) + " ms is not shorter than the epoch");
    }
    for (std::size_t j = i + 1; j < offsets_ms.size(); ++j) {
      if (offsets_ms[j] == o) throw InvalidSpec("time shift offsets must be distinct");
    }
  }
}

namespace {

void require_geometry(const EpochSet& epochs) {
  if (!epochs.montage) throw ShapeMismatch("spatial resampling needs electrode positions");
  if (!epochs.empty() && epochs.montage->size() != epochs.channels()) {
    throw ShapeMismatch("montage has " + std::to_string(epochs.montage->size()) +
                        " channels, epochs have " + std::to_string(epochs.channels()));
  }
}

void append_resampled(EpochSet& out, const EpochSet& in, const SpatialResampler& r) {
  const Provenance prov = Provenance::rotated(r.rotation().axis, r.rotation().angle_deg);
  for (std::size_t i = 0; i < in.size(); ++i) {
    out.push_back(apply_resampler(r, in.epochs[i]), in.labels[i], prov);
  }
}

}  // namespace

EpochSet resample_epochs(const EpochSet& epochs, const RotationSpec& rotation, const Kernel& kernel,
                         double ridge) {
  require_geometry(epochs);
  const SpatialResampler r = build_resampler(*epochs.montage, rotation, kernel, ridge);
  EpochSet out = epochs.empty_like();
  append_resampled(out, epochs, r);
  return out;
}

EpochSet rotational_augment(const EpochSet& epochs, std::span<const RotationAugmentPlan> plans) {
  require_geometry(epochs);
  EpochSet out = epochs;
  std::size_t extra = 0;
  for (const auto& plan : plans) {
    plan.validate();
    extra += plan.axes.size() * (plan.symmetric ? 2 : 1);
  }
  out.epochs.reserve(epochs.size() * (1 + extra));
  out.labels.reserve(out.epochs.capacity());
  out.provenance.reserve(out.epochs.capacity());
  for (const auto& plan : plans) {
    for (Axis axis : plan.axes) {
      append_resampled(out, epochs, build_resampler(*epochs.montage, {axis, plan.angle_deg}, plan.kernel, plan.ridge));
      if (plan.symmetric) {
        append_resampled(out, epochs,
                         build_resampler(*epochs.montage, {axis, -plan.angle_deg}, plan.kernel, plan.ridge));
      }
    }
  }
  return out;
}

EpochSet rotational_augment(const EpochSet& epochs, const RotationAugmentPlan& plan) {
  return rotational_augment(epochs, std::span<const RotationAugmentPlan>(&plan, 1));
}

EpochSet cap_shift_replace(const EpochSet& epochs, Axis axis, double angle_deg, const Kernel& kernel,
                           double ridge) {
  return resample_epochs(epochs, {axis, angle_deg}, kernel, ridge);
}

SegmentResult temporal_augment(const ContinuousRecording& stream, std::span<const Marker> markers,
                               const Window& window_ms, const TimeShiftPlan& plan,
                               const std::optional<Montage>& montage, double base_offset_ms) {
  plan.validate(window_ms.length_ms());
  std::vector<double> offsets{0.0};
  offsets.insert(offsets.end(), plan.offsets_ms.begin(), plan.offsets_ms.end());

  const std::int64_t length = ms_to_samples(window_ms.length_ms(), stream.sampling_rate_hz);
  const auto n_samples = static_cast<std::int64_t>(stream.samples());
  std::vector<Marker> kept;
  std::size_t dropped = 0;
  for (const auto& m : markers) {
    const bool fits = std::all_of(offsets.begin(), offsets.end(), [&](double o) {
      const std::int64_t first =
          m.sample + ms_to_samples(window_ms.start_ms + base_offset_ms + o, stream.sampling_rate_hz);
      return first >= 0 && first + length <= n_samples;
    });
    if (fits) {
      kept.push_back(m);
    } else {
      ++dropped;
    }
  }

  SegmentResult out;
  out.dropped = dropped;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    SegmentResult part = segment(stream, kept, window_ms, montage, base_offset_ms + offsets[k]);
    if (k == 0) {
      out.epochs = std::move(part.epochs);
      continue;
    }
    for (std::size_t i = 0; i < part.epochs.size(); ++i) {
      out.epochs.push_back(std::move(part.epochs.epochs[i]), part.epochs.labels[i], part.epochs.provenance[i]);
    }
  }
  return out;
}

}  // namespace erpaug
