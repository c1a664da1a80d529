#include "erpaug/signal.hpp"

#include <cmath>
#include <complex>
#include <deque>

#include <unsupported/Eigen/FFT>

#include "erpaug/error.hpp"

namespace erpaug {

namespace {

Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// Bins to keep for an n-point transform.
std::vector<bool> band_mask(Eigen::Index n, double rate_hz, const Band& band) {
  std::vector<bool> keep(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = static_cast<double>(std::min(k, n - k)) * rate_hz / static_cast<double>(n);
    const bool below = band.low_hz > 0.0 && f < band.low_hz;
    keep[static_cast<std::size_t>(k)] = !below && f <= band.high_hz;
  }
  return keep;
}

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& epoch, const std::vector<bool>& keep) {
  const Eigen::Index n = epoch.cols();
  Eigen::MatrixXd out(epoch.rows(), n);
  auto& fft = thread_fft();
  std::vector<double> time(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index c = 0; c < epoch.rows(); ++c) {
    for (Eigen::Index t = 0; t < n; ++t) time[static_cast<std::size_t>(t)] = epoch(c, t);
    fft.fwd(spectrum, time);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      if (!keep[k]) spectrum[k] = 0.0;
    }
    fft.inv(time, spectrum);
    for (Eigen::Index t = 0; t < n; ++t) out(c, t) = time[static_cast<std::size_t>(t)];
  }
  return out;
}

void validate_band(double rate_hz, const Band& band) {
  const double nyquist = rate_hz / 2.0;
  if (!(band.low_hz >= 0.0) || !(band.high_hz > band.low_hz) || band.high_hz > nyquist) {
    throw BandOutOfRange("band [" + std::to_string(band.low_hz) + ", " + std::to_string(band.high_hz) +
                         "] Hz is not inside (0, " + std::to_string(nyquist) + "] Hz");
  }
}

}  // namespace

StandardizeResult standardize(const Eigen::MatrixXd& epoch) {
  StandardizeResult out{epoch, {}};
  const auto n = static_cast<double>(epoch.cols());
  for (Eigen::Index c = 0; c < epoch.rows(); ++c) {
    const double mean = epoch.row(c).mean();
    auto row = out.epoch.row(c);
    row.array() -= mean;
    const double sd = std::sqrt(row.squaredNorm() / n);
    // Relative threshold so that a constant channel with rounding residue
    // still counts as flat.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      row.setZero();
      out.flat_channels.push_back(static_cast<std::size_t>(c));
    } else {
      row /= sd;
    }
  }
  return out;
}

std::size_t standardize_all(EpochSet& set) {
  std::size_t flat = 0;
  for (auto& e : set.epochs) {
    auto r = standardize(e);
    flat += r.flat_channels.size();
    e = std::move(r.epoch);
  }
  return flat;
}

Eigen::MatrixXd fft_bandpass(const Eigen::MatrixXd& epoch, double rate_hz, const Band& band) {
  validate_band(rate_hz, band);
  if (epoch.cols() == 0) return epoch;
  return apply_mask(epoch, band_mask(epoch.cols(), rate_hz, band));
}

EpochSet fft_bandpass(const EpochSet& set, const Band& band) {
  validate_band(set.sampling_rate_hz, band);
  EpochSet out = set;
  if (set.empty()) return out;
  const auto keep = band_mask(static_cast<Eigen::Index>(set.samples()), set.sampling_rate_hz, band);
  for (auto& e : out.epochs) e = apply_mask(e, keep);
  return out;
}

std::vector<int> decimation_stages(double source_rate_hz, double target_rate_hz) {
  if (!(source_rate_hz > 0.0) || !(target_rate_hz > 0.0)) {
    throw NonIntegerFactor("sampling rates must be positive");
  }
  const double ratio = source_rate_hz / target_rate_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
    throw NonIntegerFactor("decimation from " + std::to_string(source_rate_hz) + " Hz to " +
                           std::to_string(target_rate_hz) + " Hz is not an integer factor");
  }
  auto remaining = static_cast<long long>(rounded);
  std::deque<int> stages;
  while (remaining > 1) {
    int factor = 0;
    for (int d = 25; d >= 2; --d) {
      if (remaining % d == 0) {
        factor = d;
        break;
      }
    }
    if (factor == 0) {
      throw NonIntegerFactor("decimation factor " + std::to_string(static_cast<long long>(rounded)) +
                             " has a prime factor above 25");
    }
    stages.push_front(factor);
    remaining /= factor;
  }
  return {stages.begin(), stages.end()};
}

Eigen::MatrixXd decimate(const Eigen::MatrixXd& epoch, double source_rate_hz, double target_rate_hz) {
  Eigen::MatrixXd current = epoch;
  double rate = source_rate_hz;
  for (int k : decimation_stages(source_rate_hz, target_rate_hz)) {
    const double new_rate = rate / k;
    const Eigen::MatrixXd filtered = fft_bandpass(current, rate, Band{0.0, 0.8 * new_rate / 2.0});
    const Eigen::Index n_out = (filtered.cols() + k - 1) / k;
    current = filtered(Eigen::all, Eigen::seqN(0, n_out, k));
    rate = new_rate;
  }
  return current;
}

EpochSet decimate(const EpochSet& set, double target_rate_hz) {
  decimation_stages(set.sampling_rate_hz, target_rate_hz);
  EpochSet out = set;
  for (auto& e : out.epochs) e = decimate(e, set.sampling_rate_hz, target_rate_hz);
  out.sampling_rate_hz = target_rate_hz;
  return out;
}

EpochSet crop_last(const EpochSet& set, double ms) {
  const std::int64_t keep = ms_to_samples(ms, set.sampling_rate_hz);
  if (keep <= 0 || static_cast<std::size_t>(keep) > set.samples()) {
    throw WindowTooLarge("cannot keep the last " + std::to_string(ms) + " ms of " +
                         std::to_string(set.samples()) + "-sample epochs");
  }
  EpochSet out = set;
  for (auto& e : out.epochs) e = e.rightCols(keep).eval();
  return out;
}

}  // namespace erpaug
