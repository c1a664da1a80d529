#include <doctest.h>

#include <cmath>
#include <random>

#include "erpaug/error.hpp"
#include "erpaug/io.hpp"
#include "erpaug/pipeline.hpp"
#include "erpaug/synth.hpp"
#include "erpaug/xdawn.hpp"

using namespace erpaug;

namespace {

SessionSpec small_spec(std::uint64_t seed, double amplitude = 3.0) {
  SessionSpec s;
  s.montage = MontageName::Cap19;
  s.sampling_rate_hz = 250.0;
  s.n_positive = 30;
  s.n_negative = 90;
  s.erp.amplitude = amplitude;
  s.pattern.center = standard_positions(MontageName::Cap64).position("Cz");
  s.seed = seed;
  return s;
}

EpochSet epochs_of(const Session& s, const PipelineConfig& config) {
  return segment(s.recording, s.markers, config.window_ms, s.montage).epochs;
}

}  // namespace

TEST_CASE("presets carry the documented parameters") {
  const PipelineConfig p = preset_config("p300");
  CHECK(p.window_ms.start_ms == 0.0);
  CHECK(p.window_ms.end_ms == 1000.0);
  CHECK(p.target_rate_hz == 25.0);
  CHECK(p.band_hz.low_hz == 0.0);
  CHECK(p.band_hz.high_hz == 4.0);
  CHECK_FALSE(p.crop_last_ms.has_value());
  CHECK(p.features.kind == FeatureKind::SlopeWindows);
  REQUIRE(p.c_grid.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(p.c_grid[i] == doctest::Approx(std::pow(10.0, -0.5 * static_cast<double>(i))).epsilon(1e-12));
  }
  CHECK(p.cv.folds == 5);
  CHECK(p.cv.repetitions == 2);
  CHECK(p.max_iter_factor == 100);

  const PipelineConfig m = preset_config("mrcp");
  CHECK(m.window_ms.start_ms == -1100.0);
  CHECK(m.window_ms.end_ms == -100.0);
  CHECK(m.target_rate_hz == 20.0);
  CHECK(m.band_hz.low_hz == 0.1);
  CHECK(m.band_hz.high_hz == 4.0);
  CHECK(*m.crop_last_ms == 200.0);
  CHECK(m.n_spatial_filters == 4);
  CHECK(m.features.kind == FeatureKind::RawPseudoChannels);
  CHECK(m.class_weight_positive == 2.0);
  REQUIRE(m.c_grid.size() == 7);
  CHECK(m.c_grid.back() == doctest::Approx(1e-6));
  CHECK(decimation_stages(5000.0, m.target_rate_hz) == std::vector<int>{10, 25});
  CHECK_THROWS(preset_config("eeg"));
}

TEST_CASE("config validation names the field") {
  PipelineConfig c = preset_config("p300");
  c.c_grid = {0.1, 1.0};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("c_grid"), InvalidSpec);
  c = preset_config("p300");
  c.band_hz = {0.0, 20.0};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("band_hz"), InvalidSpec);
  c = preset_config("p300");
  c.n_spatial_filters = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("n_spatial_filters"), InvalidSpec);
  c = preset_config("p300");
  CHECK_NOTHROW(c.validate(1000.0));
  CHECK_THROWS(c.validate(1010.0));
}

TEST_CASE("test-side augmentation is rejected before any work") {
  RunOptions o;
  o.augment_test = true;
  CHECK_THROWS_AS(validate_options(o, preset_config("p300")), InvalidSpec);
  // Through the session runner as well.
  const Session s = generate_session(small_spec(1));
  CHECK_THROWS_AS(run_session_pipeline(s, s, preset_config("p300"), o), InvalidSpec);
}

TEST_CASE("preprocessing shapes for both presets") {
  const Session s = generate_session(small_spec(2));
  const PipelineConfig p = preset_config("p300");
  const PreprocessResult r = preprocess(epochs_of(s, p), p);
  CHECK(r.epochs.sampling_rate_hz == 25.0);
  CHECK(r.epochs.samples() == 25);
  CHECK(extract_features(xdawn_apply(r.epochs, Eigen::MatrixXd::Identity(19, 8)), p.features).cols() == 8 * 11);

  SessionSpec spec = small_spec(3);
  spec.sampling_rate_hz = 1000.0;
  spec.n_positive = 10;
  spec.n_negative = 10;
  const Session s1k = generate_session(spec);
  const PipelineConfig m = preset_config("mrcp");
  const PreprocessResult mr = preprocess(epochs_of(s1k, m), m);
  CHECK(mr.epochs.sampling_rate_hz == 20.0);
  CHECK(mr.epochs.samples() == 4);
  CHECK(extract_features(xdawn_apply(mr.epochs, Eigen::MatrixXd::Identity(19, 4)), m.features).cols() == 16);
}

TEST_CASE("easy data scored on itself is nearly perfect") {
  const Session s = generate_session(small_spec(4, 6.0));
  const PipelineConfig p = preset_config("p300");
  const EpochSet e = epochs_of(s, p);
  const PipelineResult r = run_pipeline(e, e, p, {});
  CHECK(r.balanced_accuracy >= 0.95);
  CHECK(r.diagnostics.train_epochs == 120);
  CHECK(r.diagnostics.feature_dim == 88);
  CHECK(r.diagnostics.cv_scores.size() == 9);
  CHECK(r.learned.model.trained_C > 0.0);
}

TEST_CASE("learned parameters ignore the test data") {
  const Session tr = generate_session(small_spec(5));
  const Session te_a = generate_session(small_spec(6));
  SessionSpec noise = small_spec(7, 0.0);
  noise.noise.pink_gain = 4.0;
  const Session te_b = generate_session(noise);
  PipelineConfig p = preset_config("p300");
  TrainAugmentation aug;
  aug.rotations.push_back(RotationAugmentPlan{{Axis::Z}, 18.0});
  const EpochSet train = preprocess(epochs_of(tr, p), p).epochs;
  const PipelineResult a = fit_and_evaluate(train, preprocess(epochs_of(te_a, p), p).epochs, p, aug);
  const PipelineResult b = fit_and_evaluate(train, preprocess(epochs_of(te_b, p), p).epochs, p, aug);
  CHECK(a.learned == b.learned);
  CHECK(a.diagnostics.train_epochs_augmented == 360);
}

TEST_CASE("pipeline runs are deterministic") {
  const Session tr = generate_session(small_spec(8));
  const Session te = generate_session(small_spec(9));
  PipelineConfig p = preset_config("p300");
  p.seed = 12;
  RunOptions o;
  o.time_shift = TimeShiftPlan{{40.0, -40.0}};
  const PipelineResult a = run_session_pipeline(tr, te, p, o);
  const PipelineResult b = run_session_pipeline(tr, te, p, o);
  CHECK(a.balanced_accuracy == b.balanced_accuracy);
  CHECK(a.learned == b.learned);
  CHECK(a.diagnostics.train_epochs == 360);
}

TEST_CASE("cross-validation tie-break and sole value") {
  // Perfectly separable in one feature at every C.
  FeatureMatrix f(40, 2);
  std::vector<Label> l;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < 40; ++i) {
    const bool pos = i % 4 == 0;
    l.push_back(pos ? Label::Positive : Label::Negative);
    f(i, 0) = pos ? 5.0 + 0.1 * g(rng) : -5.0 + 0.1 * g(rng);
    f(i, 1) = g(rng);
  }
  PipelineConfig p = preset_config("p300");
  const CvResult r = cross_validate_C(f, l, p);
  for (double s : r.mean_scores) CHECK(s == 1.0);
  CHECK(r.best_C == p.c_grid.back());

  p.c_grid = {0.5};
  CHECK(cross_validate_C(f, l, p).best_C == 0.5);

  std::vector<Label> few(40, Label::Negative);
  few[0] = few[1] = Label::Positive;
  CHECK_THROWS_AS(cross_validate_C(f, few, p), TooFewSamples);
}

TEST_CASE("training fraction and channel subset") {
  const Session tr = generate_session(small_spec(10));
  const Session te = generate_session(small_spec(11));
  RunOptions o;
  o.train_fraction = 0.5;
  o.channel_subset = {"Cz", "C3", "C4", "Pz", "Fz", "P3", "P4", "F3", "F4"};
  PipelineConfig p = preset_config("p300");
  const PipelineResult r = run_session_pipeline(tr, te, p, o);
  CHECK(r.diagnostics.train_epochs == 60);
  CHECK(r.diagnostics.pseudo_channels == 8);
  CHECK(r.balanced_accuracy >= 0.0);
  CHECK(r.balanced_accuracy <= 1.0);
}

TEST_CASE("shuffled labels sit at chance") {
  double sum = 0.0;
  const int seeds = 8;
  for (int k = 0; k < seeds; ++k) {
    const Session tr = generate_session(small_spec(100 + static_cast<std::uint64_t>(k)));
    const Session te = generate_session(small_spec(200 + static_cast<std::uint64_t>(k)));
    PipelineConfig p = preset_config("p300");
    p.seed = static_cast<std::uint64_t>(k);
    EpochSet train = epochs_of(tr, p);
    std::mt19937_64 rng(static_cast<std::uint64_t>(k));
    std::shuffle(train.labels.begin(), train.labels.end(), rng);
    const double ba = run_pipeline(train, epochs_of(te, p), p, {}).balanced_accuracy;
    CHECK(ba >= 0.3);
    CHECK(ba <= 0.7);
    sum += ba;
  }
  CHECK(std::abs(sum / seeds - 0.5) < 0.06);
}
