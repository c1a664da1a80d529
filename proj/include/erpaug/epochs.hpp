#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erpaug/geometry.hpp"

namespace erpaug {

enum class Label { Negative, Positive };

inline Label opposite(Label l) { return l == Label::Positive ? Label::Negative : Label::Positive; }

struct Marker {
  std::int64_t sample = 0;
  Label label = Label::Negative;
};

// Channels x samples. Eigen's column-major storage keeps every time frame
// contiguous, matching the on-disk layout.
struct ContinuousRecording {
  double sampling_rate_hz = 0.0;
  Eigen::MatrixXd data;

  std::size_t channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t samples() const { return static_cast<std::size_t>(data.cols()); }
};

struct Session {
  ContinuousRecording recording;
  std::vector<Marker> markers;
  Montage montage;
};

struct Provenance {
  enum class Kind { Original, Rotated, Shifted };
  Kind kind = Kind::Original;
  Axis axis = Axis::Z;
  double angle_deg = 0.0;
  double shift_ms = 0.0;

  static Provenance original() { return {}; }
  static Provenance rotated(Axis axis, double angle_deg) { return {Kind::Rotated, axis, angle_deg, 0.0}; }
  static Provenance shifted(double ms) { return {Kind::Shifted, Axis::Z, 0.0, ms}; }

  std::string to_string() const;
  bool operator==(const Provenance&) const = default;
};

// Labelled set of equally shaped C x Tn epochs.
struct EpochSet {
  std::vector<Eigen::MatrixXd> epochs;
  std::vector<Label> labels;
  std::vector<Provenance> provenance;
  double sampling_rate_hz = 0.0;
  // Electrode geometry of the channels; empty once epochs hold pseudo-channels.
  std::optional<Montage> montage;

  std::size_t size() const { return epochs.size(); }
  bool empty() const { return epochs.empty(); }
  std::size_t channels() const { return epochs.empty() ? 0 : static_cast<std::size_t>(epochs.front().rows()); }
  std::size_t samples() const { return epochs.empty() ? 0 : static_cast<std::size_t>(epochs.front().cols()); }
  std::size_t count(Label label) const;

  // Throws ShapeMismatch / InvalidSpec when the invariants do not hold.
  void validate() const;
  void push_back(Eigen::MatrixXd epoch, Label label, Provenance prov);
  // Same metadata (rate, montage), no epochs.
  EpochSet empty_like() const;
};

// Epoch window relative to the marker, [start_ms, end_ms).
struct Window {
  double start_ms = 0.0;
  double end_ms = 1000.0;
  double length_ms() const { return end_ms - start_ms; }
};

std::int64_t ms_to_samples(double ms, double rate_hz);

struct SegmentResult {
  EpochSet epochs;
  // Markers whose window did not fit inside the recording.
  std::size_t dropped = 0;
};

// One epoch per marker whose window, shifted by `offset_ms`, lies inside the
// stream; the rest are dropped and counted. Epochs have
// round(window_length * rate) samples.
SegmentResult segment(const ContinuousRecording& stream, std::span<const Marker> markers,
                      const Window& window_ms, const std::optional<Montage>& montage,
                      double offset_ms = 0.0);

// Keeps the given channels of every epoch, in the given order.
EpochSet select_channels(const EpochSet& set, const std::vector<std::string>& labels);

// Stratified subsample of `fraction` of each class, deterministic per seed;
// original relative order is preserved.
std::vector<std::size_t> stratified_subset(std::span<const Label> labels, double fraction,
                                           std::uint64_t seed);

}  // namespace erpaug
