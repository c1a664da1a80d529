#pragma once

#include <vector>

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"

namespace erpaug {

struct StandardizeResult {
  Eigen::MatrixXd epoch;
  // Channels with zero variance; these are set to all zeros.
  std::vector<std::size_t> flat_channels;
};

// Per channel across time: zero mean, unit population standard deviation.
StandardizeResult standardize(const Eigen::MatrixXd& epoch);
// Standardises every epoch; returns the number of flat channels seen.
std::size_t standardize_all(EpochSet& set);

struct Band {
  double low_hz = 0.0;   // 0 keeps DC (pure low-pass)
  double high_hz = 4.0;
};

// Real FFT per channel, zero every bin strictly outside [low, high], inverse
// FFT. Zero phase. Throws BandOutOfRange unless 0 <= low < high <= Nyquist.
Eigen::MatrixXd fft_bandpass(const Eigen::MatrixXd& epoch, double rate_hz, const Band& band);
EpochSet fft_bandpass(const EpochSet& set, const Band& band);

// Factorises an integer decimation factor into stages of at most 25, taking
// the largest admissible factor for the last stage first: 250 -> {10, 25},
// 40 -> {2, 20}. Throws NonIntegerFactor when no such factorisation exists.
std::vector<int> decimation_stages(double source_rate_hz, double target_rate_hz);

// Each stage: FFT low-pass at 0.8 x the new Nyquist, then keep every k-th sample.
Eigen::MatrixXd decimate(const Eigen::MatrixXd& epoch, double source_rate_hz, double target_rate_hz);
EpochSet decimate(const EpochSet& set, double target_rate_hz);

// Keeps the trailing round(ms * rate) samples of every epoch.
EpochSet crop_last(const EpochSet& set, double ms);

}  // namespace erpaug
