#include <doctest.h>

#include <cmath>
#include <random>

#include "erpaug/error.hpp"
#include "erpaug/features.hpp"
#include "erpaug/signal.hpp"

using namespace erpaug;

namespace {

Eigen::MatrixXd sine(double freq, double rate, std::size_t n, double amp = 1.0, double phase = 0.0) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) {
    m(0, static_cast<Eigen::Index>(t)) = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(t) / rate + phase);
  }
  return m;
}

double rms(const Eigen::MatrixXd& m) { return std::sqrt(m.squaredNorm() / static_cast<double>(m.size())); }

EpochSet single(Eigen::MatrixXd e, double rate) {
  EpochSet s;
  s.sampling_rate_hz = rate;
  s.push_back(std::move(e), Label::Negative, Provenance::original());
  return s;
}

}  // namespace

TEST_CASE("standardize uses the population deviation") {
  Eigen::MatrixXd e(1, 3);
  e << 1, 2, 3;
  const auto r = standardize(e);
  const double v = std::sqrt(1.5);  // 1 / sqrt(2/3)
  CHECK(r.epoch(0, 0) == doctest::Approx(-v).epsilon(1e-12));
  CHECK(std::abs(r.epoch(0, 1)) < 1e-15);
  CHECK(r.epoch(0, 2) == doctest::Approx(v).epsilon(1e-12));
  CHECK(r.epoch(0, 2) == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(r.flat_channels.empty());
}

TEST_CASE("flat channels are zeroed and flagged") {
  Eigen::MatrixXd e(2, 3);
  e << 5, 5, 5, 1, 4, 2;
  const auto r = standardize(e);
  CHECK(r.epoch.row(0).isZero(0.0));
  REQUIRE(r.flat_channels.size() == 1);
  CHECK(r.flat_channels[0] == 0);
  EpochSet s = single(e, 10.0);
  CHECK(standardize_all(s) == 1);
}

TEST_CASE("standardize gives zero mean, unit deviation and is idempotent") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(3.0, 7.0);
  Eigen::MatrixXd e(8, 50);
  for (auto& v : e.reshaped()) v = g(rng);
  const Eigen::MatrixXd s = standardize(e).epoch;
  for (Eigen::Index c = 0; c < s.rows(); ++c) {
    const double mean = s.row(c).mean();
    const double sd = std::sqrt((s.row(c).array() - mean).square().mean());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(sd - 1.0) < 1e-9);
  }
  CHECK((standardize(s).epoch - s).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("decimation stages") {
  CHECK(decimation_stages(5000.0, 20.0) == std::vector<int>{10, 25});
  CHECK(decimation_stages(1000.0, 25.0) == std::vector<int>{2, 20});
  CHECK(decimation_stages(250.0, 25.0) == std::vector<int>{10});
  CHECK(decimation_stages(100.0, 100.0).empty());
  CHECK_THROWS_AS(decimation_stages(1000.0, 30.0), NonIntegerFactor);
  CHECK_THROWS_AS(decimation_stages(29.0 * 4, 4.0), NonIntegerFactor);
}

TEST_CASE("decimating a constant keeps it constant") {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Constant(3, 1000, 2.5);
  const Eigen::MatrixXd d = decimate(c, 1000.0, 25.0);
  CHECK(d.cols() == 25);
  CHECK((d.array() - 2.5).abs().maxCoeff() < 1e-9);
}

TEST_CASE("a 1 Hz sine survives 1000 -> 25 Hz within 2 percent") {
  const Eigen::MatrixXd x = sine(1.0, 1000.0, 2000, 1.0, 0.3);
  const Eigen::MatrixXd d = decimate(x, 1000.0, 25.0);
  const Eigen::MatrixXd want = sine(1.0, 25.0, 50, 1.0, 0.3);
  REQUIRE(d.cols() == 50);
  CHECK((d - want).cwiseAbs().maxCoeff() < 0.02);
  const EpochSet out = decimate(single(x, 1000.0), 25.0);
  CHECK(out.sampling_rate_hz == 25.0);
  CHECK(out.samples() == 50);
}

TEST_CASE("low-pass keeps DC and kills 10 Hz") {
  const Eigen::MatrixXd dc = Eigen::MatrixXd::Constant(2, 25, -1.25);
  CHECK((fft_bandpass(dc, 25.0, {0.0, 4.0}) - dc).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(fft_bandpass(dc, 25.0, {0.1, 4.0}).mean()) < 1e-9);

  const Eigen::MatrixXd on_bin = sine(10.0, 25.0, 25);
  CHECK(rms(fft_bandpass(on_bin, 25.0, {0.0, 4.0})) < 0.01 * rms(on_bin));
  // 10 Hz falls between bins for 28 samples; measured leakage 0.0593 of the
  // input RMS.
  const Eigen::MatrixXd off_bin = sine(10.0, 25.0, 28);
  CHECK(rms(fft_bandpass(off_bin, 25.0, {0.0, 4.0})) < 0.07 * rms(off_bin));
}

TEST_CASE("in-band components pass untouched and filtering is idempotent") {
  const Eigen::MatrixXd x = sine(2.0, 25.0, 50) + sine(9.0, 25.0, 50, 0.4);
  const Eigen::MatrixXd y = fft_bandpass(x, 25.0, {0.0, 4.0});
  CHECK((y - sine(2.0, 25.0, 50)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((fft_bandpass(y, 25.0, {0.0, 4.0}) - y).cwiseAbs().maxCoeff() < 1e-9);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Eigen::MatrixXd noise(3, 37);
  for (auto& v : noise.reshaped()) v = g(rng);
  const Eigen::MatrixXd once = fft_bandpass(noise, 20.0, {0.1, 4.0});
  CHECK((fft_bandpass(once, 20.0, {0.1, 4.0}) - once).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("band limits are checked") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 10);
  CHECK_THROWS_AS(fft_bandpass(x, 25.0, {0.0, 13.0}), BandOutOfRange);
  CHECK_THROWS_AS(fft_bandpass(x, 25.0, {4.0, 4.0}), BandOutOfRange);
  CHECK_THROWS_AS(fft_bandpass(x, 25.0, {-1.0, 4.0}), BandOutOfRange);
  CHECK_NOTHROW(fft_bandpass(x, 25.0, {0.0, 12.5}));
}

TEST_CASE("crop_last keeps the trailing samples") {
  Eigen::MatrixXd e(1, 20);
  for (int t = 0; t < 20; ++t) e(0, t) = t;
  const EpochSet out = crop_last(single(e, 20.0), 200.0);
  REQUIRE(out.samples() == 4);
  CHECK(out.epochs[0](0, 0) == 16.0);
  CHECK(out.epochs[0](0, 3) == 19.0);
  CHECK_THROWS_AS(crop_last(single(e, 20.0), 2000.0), WindowTooLarge);
}

TEST_CASE("slope features") {
  CHECK(slope_window_count(25, 4, 2) == 11);
  Eigen::MatrixXd ramp(2, 25);
  for (int t = 0; t < 25; ++t) {
    ramp(0, t) = 0.37 * t - 2.0;
    ramp(1, t) = -1.5 * t;
  }
  EpochSet s = single(ramp, 25.0);
  s.push_back(Eigen::MatrixXd::Constant(2, 25, 4.0), Label::Positive, Provenance::original());
  const FeatureMatrix f = slope_features(s, 4, 2);
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 22);
  CHECK((f.row(0).head(11).array() - 0.37).abs().maxCoeff() < 1e-9);
  CHECK((f.row(0).tail(11).array() + 1.5).abs().maxCoeff() < 1e-9);
  CHECK(f.row(1).isZero(1e-12));
  CHECK_THROWS_AS(slope_features(s, 26, 2), WindowTooLarge);
  CHECK_THROWS_AS(slope_features(s, 1, 1), WindowTooLarge);
}

TEST_CASE("raw features and normalisation") {
  Eigen::MatrixXd e(4, 4);
  e.setRandom();
  const EpochSet s = single(e, 20.0);
  const FeatureMatrix f = raw_features(s);
  CHECK(f.cols() == 16);
  CHECK(f(0, 1) == e(0, 1));
  CHECK(f(0, 4) == e(1, 0));

  FeatureMatrix train(4, 2);
  train << 1, 7, 2, 7, 3, 7, 4, 7;
  const auto norm = FeatureNormalization::fit(train);
  const FeatureMatrix z = norm.apply(train);
  CHECK(std::abs(z.col(0).mean()) < 1e-12);
  CHECK(std::abs(std::sqrt(z.col(0).array().square().mean()) - 1.0) < 1e-12);
  CHECK(z.col(1).isZero(0.0));
}
