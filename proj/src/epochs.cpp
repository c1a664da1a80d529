#include "erpaug/epochs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "erpaug/error.hpp"

namespace erpaug {

std::string Provenance::to_string() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Original: return "original";
    case Kind::Rotated: s << "rotated(" << erpaug::to_string(axis) << "," << angle_deg << ")"; break;
    case Kind::Shifted: s << "shifted(" << shift_ms << ")"; break;
  }
  return s.str();
}

std::size_t EpochSet::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void EpochSet::validate() const {
  if (!(sampling_rate_hz > 0.0)) throw InvalidSpec("epoch set sampling rate must be positive");
  if (labels.size() != epochs.size() || provenance.size() != epochs.size()) {
    throw ShapeMismatch("epoch set has " + std::to_string(epochs.size()) + " epochs, " +
                        std::to_string(labels.size()) + " labels and " +
                        std::to_string(provenance.size()) + " provenance tags");
  }
  for (const auto& e : epochs) {
    if (e.rows() != epochs.front().rows() || e.cols() != epochs.front().cols()) {
      throw ShapeMismatch("epochs in a set must share one shape");
    }
  }
  if (montage && !epochs.empty() && montage->size() != channels()) {
    throw ShapeMismatch("montage has " + std::to_string(montage->size()) + " channels, epochs have " +
                        std::to_string(channels()));
  }
}

void EpochSet::push_back(Eigen::MatrixXd epoch, Label label, Provenance prov) {
  if (!epochs.empty() && (epoch.rows() != epochs.front().rows() || epoch.cols() != epochs.front().cols())) {
    throw ShapeMismatch("epoch shape differs from the rest of the set");
  }
  epochs.push_back(std::move(epoch));
  labels.push_back(label);
  provenance.push_back(prov);
}

EpochSet EpochSet::empty_like() const {
  EpochSet out;
  out.sampling_rate_hz = sampling_rate_hz;
  out.montage = montage;
  return out;
}

std::int64_t ms_to_samples(double ms, double rate_hz) {
  return static_cast<std::int64_t>(std::llround(ms * rate_hz / 1000.0));
}

SegmentResult segment(const ContinuousRecording& stream, std::span<const Marker> markers,
                      const Window& window_ms, const std::optional<Montage>& montage,
                      double offset_ms) {
  if (!(stream.sampling_rate_hz > 0.0)) throw InvalidSpec("recording sampling rate must be positive");
  if (!(window_ms.end_ms > window_ms.start_ms)) throw InvalidSpec("epoch window must have positive length");
  if (montage && montage->size() != stream.channels()) {
    throw ShapeMismatch("montage channel count does not match recording");
  }
  const std::int64_t length = ms_to_samples(window_ms.length_ms(), stream.sampling_rate_hz);
  const std::int64_t start_offset = ms_to_samples(window_ms.start_ms + offset_ms, stream.sampling_rate_hz);
  const auto n_samples = static_cast<std::int64_t>(stream.samples());

  SegmentResult out;
  out.epochs.sampling_rate_hz = stream.sampling_rate_hz;
  out.epochs.montage = montage;
  const Provenance prov = offset_ms == 0.0 ? Provenance::original() : Provenance::shifted(offset_ms);
  for (const auto& m : markers) {
    const std::int64_t first = m.sample + start_offset;
    if (first < 0 || first + length > n_samples) {
      ++out.dropped;
      continue;
    }
    out.epochs.push_back(stream.data.middleCols(first, length), m.label, prov);
  }
  return out;
}

EpochSet select_channels(const EpochSet& set, const std::vector<std::string>& labels) {
  if (!set.montage) throw InvalidSpec("channel selection needs a montage");
  std::vector<Eigen::Index> rows;
  for (const auto& l : labels) {
    const auto idx = set.montage->index_of(l);
    if (!idx) throw UnknownLabel("epoch set has no channel '" + l + "'");
    rows.push_back(static_cast<Eigen::Index>(*idx));
  }
  EpochSet out = set.empty_like();
  out.montage = set.montage->subset(labels);
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.push_back(set.epochs[i](rows, Eigen::all), set.labels[i], set.provenance[i]);
  }
  return out;
}

std::vector<std::size_t> stratified_subset(std::span<const Label> labels, double fraction,
                                           std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidSpec("training fraction must lie in (0, 1]");
  std::vector<std::size_t> keep;
  std::mt19937_64 rng(seed);
  for (Label cls : {Label::Negative, Label::Positive}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::max<std::size_t>(std::min(n, idx.size()), idx.empty() ? 0 : 1));
    keep.insert(keep.end(), idx.begin(), idx.end());
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace erpaug
