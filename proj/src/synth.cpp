#include "erpaug/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "erpaug/error.hpp"

namespace erpaug {

namespace {

// Independent random streams so that changing one noise term leaves the
// others untouched.
enum Stream : std::uint64_t { kOrder = 1, kTrial = 2, kPink = 3, kWhite = 4 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream s) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(s)};
  return std::mt19937_64(seq);
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  // atan2 keeps full precision near 0 and pi.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw InvalidSpec(std::string("session spec field '") + field + "' " + rule);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Unit-variance noise with a 1/f power spectrum, one row per source.
Eigen::MatrixXd pink_sources(std::size_t rows, std::size_t samples, std::mt19937_64& rng) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(samples));
  if (samples < 2) return out;
  const std::size_t n = next_pow2(samples);
  std::normal_distribution<double> normal;
  Eigen::FFT<double> fft;
  std::vector<double> time(n);
  std::vector<std::complex<double>> spectrum;
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : time) v = normal(rng);
    fft.fwd(spectrum, time);
    spectrum[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) spectrum[k] /= std::sqrt(static_cast<double>(std::min(k, n - k)));
    fft.inv(time, spectrum);
    Eigen::Map<const Eigen::RowVectorXd> head(time.data(), static_cast<Eigen::Index>(samples));
    const double mean = head.mean();
    const double sd = std::sqrt((head.array() - mean).square().mean());
    out.row(static_cast<Eigen::Index>(r)) = (head.array() - mean) / (sd > 0.0 ? sd : 1.0);
  }
  return out;
}

// Symmetric square root of the Gaussian covariance over great-circle distance.
Eigen::MatrixXd spatial_mixing(const std::vector<Eigen::Vector3d>& positions, double scale) {
  const auto c = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd k(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const double d = angle_between(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
      k(i, j) = std::exp(-(d / scale) * (d / scale));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

void SourcePattern::validate() const {
  require(width > 0.0 && std::isfinite(width), "pattern.width", "must be positive");
  require(std::abs(center.norm() - 1.0) <= 1e-9, "pattern.center", "must be a unit vector");
  require(std::isfinite(gain), "pattern.gain", "must be finite");
}

double scalp_field(const SourcePattern& pattern, const Eigen::Vector3d& position) {
  const double a = angle_between(pattern.center, position) / pattern.width;
  return pattern.gain * std::exp(-a * a);
}

void SessionSpec::validate() const {
  require(n_positive > 0, "n_positive", "must be positive");
  require(n_negative > 0, "n_negative", "must be positive");
  require(inter_marker_ms > 0.0 && std::isfinite(inter_marker_ms), "inter_marker_ms", "must be positive");
  require(sampling_rate_hz > 0.0 && std::isfinite(sampling_rate_hz), "sampling_rate_hz", "must be positive");
  require(margin_ms >= 0.0 && std::isfinite(margin_ms), "margin_ms", "must be non-negative");
  require(std::isfinite(erp.peak_ms) && erp.peak_ms < inter_marker_ms && erp.peak_ms > -margin_ms, "erp.peak_ms",
          "must lie between -margin_ms and inter_marker_ms");
  require(erp.width_ms > 0.0 && std::isfinite(erp.width_ms), "erp.width_ms", "must be positive");
  require(std::isfinite(erp.amplitude), "erp.amplitude", "must be finite");
  require(erp.latency_jitter_ms >= 0.0 && std::isfinite(erp.latency_jitter_ms), "erp.latency_jitter_ms",
          "must be non-negative");
  require(erp.amplitude_jitter >= 0.0 && std::isfinite(erp.amplitude_jitter), "erp.amplitude_jitter",
          "must be non-negative");
  require(noise.pink_gain >= 0.0 && std::isfinite(noise.pink_gain), "noise.pink_gain", "must be non-negative");
  require(noise.white_gain >= 0.0 && std::isfinite(noise.white_gain), "noise.white_gain", "must be non-negative");
  require(noise.spatial_correlation_scale > 0.0 && std::isfinite(noise.spatial_correlation_scale),
          "noise.spatial_correlation_scale", "must be positive");
  pattern.validate();
  if (cap_rotation) cap_rotation->validate();
}

Session generate_session(const SessionSpec& spec) {
  spec.validate();
  Montage nominal = standard_positions(spec.montage);
  const Montage actual = spec.cap_rotation ? rotate_montage(nominal, *spec.cap_rotation) : nominal;
  const double rate = spec.sampling_rate_hz;
  const std::size_t n_markers = spec.n_positive + spec.n_negative;
  const auto step = static_cast<double>(ms_to_samples(spec.inter_marker_ms, rate));
  const std::int64_t lead = ms_to_samples(spec.margin_ms, rate);
  const auto total = static_cast<std::size_t>(2 * lead + static_cast<std::int64_t>(step) *
                                                            static_cast<std::int64_t>(n_markers));
  const std::size_t channels = nominal.size();

  std::vector<Label> order(n_markers, Label::Negative);
  std::fill(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(spec.n_positive), Label::Positive);
  auto order_rng = stream_rng(spec.seed, kOrder);
  std::shuffle(order.begin(), order.end(), order_rng);

  Session session{{rate, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels),
                                               static_cast<Eigen::Index>(total))},
                  {},
                  std::move(nominal)};
  Eigen::MatrixXd& data = session.recording.data;

  if (spec.noise.pink_gain > 0.0) {
    auto rng = stream_rng(spec.seed, kPink);
    const Eigen::MatrixXd sources = pink_sources(channels, total, rng);
    data.noalias() += spec.noise.pink_gain * spatial_mixing(actual.positions(), spec.noise.spatial_correlation_scale) *
                      sources;
  }
  if (spec.noise.white_gain > 0.0) {
    auto rng = stream_rng(spec.seed, kWhite);
    std::normal_distribution<double> normal;
    for (Eigen::Index t = 0; t < data.cols(); ++t) {
      for (Eigen::Index c = 0; c < data.rows(); ++c) data(c, t) += spec.noise.white_gain * normal(rng);
    }
  }

  Eigen::VectorXd field(static_cast<Eigen::Index>(channels));
  for (std::size_t c = 0; c < channels; ++c) {
    field(static_cast<Eigen::Index>(c)) = scalp_field(spec.pattern, actual.positions()[c]);
  }
  auto trial_rng = stream_rng(spec.seed, kTrial);
  std::normal_distribution<double> normal;
  const double sigma = spec.erp.width_ms * rate / 1000.0;
  const auto reach = static_cast<std::int64_t>(std::ceil(6.0 * sigma));
  session.markers.reserve(n_markers);
  for (std::size_t k = 0; k < n_markers; ++k) {
    const std::int64_t sample = lead + static_cast<std::int64_t>(step) * static_cast<std::int64_t>(k);
    session.markers.push_back({sample, order[k]});
    if (order[k] != Label::Positive) continue;
    // Both draws happen for every target so the jitter settings do not
    // reshuffle each other.
    const double lat = normal(trial_rng) * spec.erp.latency_jitter_ms;
    const double amp = spec.erp.amplitude * (1.0 + spec.erp.amplitude_jitter * normal(trial_rng));
    if (amp == 0.0) continue;
    const double peak = static_cast<double>(sample) + (spec.erp.peak_ms + lat) * rate / 1000.0;
    const auto centre = static_cast<std::int64_t>(std::llround(peak));
    // The response stays inside its own trial: nothing before the marker,
    // nothing after the next one.
    const std::int64_t first = std::max<std::int64_t>(sample, centre - reach);
    const std::int64_t last = std::min<std::int64_t>(sample + static_cast<std::int64_t>(step) - 1, centre + reach);
    for (std::int64_t t = first; t <= last; ++t) {
      const double z = (static_cast<double>(t) - peak) / sigma;
      data.col(static_cast<Eigen::Index>(t)) += (amp * std::exp(-0.5 * z * z)) * field;
    }
  }
  return session;
}

}  // namespace erpaug
