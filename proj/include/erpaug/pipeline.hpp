#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "erpaug/augment.hpp"
#include "erpaug/epochs.hpp"
#include "erpaug/features.hpp"
#include "erpaug/signal.hpp"
#include "erpaug/svm.hpp"

namespace erpaug {

enum class FeatureKind { SlopeWindows, RawPseudoChannels };

struct FeatureSpec {
  FeatureKind kind = FeatureKind::SlopeWindows;
  std::size_t width_samples = 4;
  std::size_t stride_samples = 2;
};

struct CvSpec {
  std::size_t folds = 5;
  std::size_t repetitions = 2;
};

struct PipelineConfig {
  std::string name = "p300";
  Window window_ms{0.0, 1000.0};
  double target_rate_hz = 25.0;
  Band band_hz{0.0, 4.0};
  std::optional<double> crop_last_ms;
  std::size_t n_spatial_filters = 8;
  FeatureSpec features;
  std::vector<double> c_grid;
  CvSpec cv;
  double class_weight_positive = 1.0;
  std::size_t max_iter_factor = 100;
  std::string metric = "balanced_accuracy";
  std::uint64_t seed = 0;

  // Throws InvalidSpec naming the offending field. With a source rate, also
  // checks that the decimation factorises into admissible stages.
  void validate(std::optional<double> source_rate_hz = std::nullopt) const;
};

// Spatial replacement of every training epoch by its rotated-cap copy.
struct CapReplacement {
  Axis axis = Axis::Z;
  double angle_deg = 0.0;
  Kernel kernel{KernelKind::Cubic};
};

// Everything that changes the training data; the test side is never touched.
struct TrainAugmentation {
  std::optional<CapReplacement> replacement;
  std::vector<RotationAugmentPlan> rotations;

  bool active() const { return replacement.has_value() || !rotations.empty(); }
};

struct RunOptions {
  TrainAugmentation augmentation;
  std::optional<TimeShiftPlan> time_shift;
  // Offset of the training segmentation relative to the markers.
  double initial_shift_ms = 0.0;
  double train_fraction = 1.0;
  // Restrict both sessions to these channels (empty: all).
  std::vector<std::string> channel_subset;
  // Requesting augmentation of the test data is a configuration error.
  bool augment_test = false;
  std::uint64_t seed = 0;
};

// Rejects test-side augmentation and malformed plans before any work is done.
void validate_options(const RunOptions& options, const PipelineConfig& config);

// Standardise, decimate, band-pass and (optionally) crop.
struct PreprocessResult {
  EpochSet epochs;
  std::size_t flat_channels = 0;
};
PreprocessResult preprocess(const EpochSet& raw, const PipelineConfig& config);

FeatureMatrix extract_features(const EpochSet& pseudo, const FeatureSpec& spec);

struct CvResult {
  double best_C = 0.0;
  // Mean balanced accuracy per c_grid entry.
  std::vector<double> mean_scores;
};

// Repeated stratified k-fold selection of C; ties go to the smaller C.
// Throws TooFewSamples when a class has fewer members than folds.
CvResult cross_validate_C(const FeatureMatrix& features, std::span<const Label> labels,
                          const PipelineConfig& config);

struct LearnedParameters {
  Eigen::MatrixXd spatial_filters;
  FeatureNormalization normalization;
  LinearModel model;

  bool operator==(const LearnedParameters& other) const;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct Diagnostics {
  std::vector<StageTiming> timings;
  std::size_t train_epochs = 0;
  std::size_t test_epochs = 0;
  std::size_t train_epochs_augmented = 0;
  std::size_t feature_dim = 0;
  std::size_t pseudo_channels = 0;
  std::size_t samples_per_epoch = 0;
  std::size_t dropped_train = 0;
  std::size_t dropped_test = 0;
  std::size_t flat_channels = 0;
  double xdawn_shrinkage = 0.0;
  std::vector<double> cv_scores;
  bool svm_converged = false;
  double train_threshold_accuracy = 0.0;
};

struct PipelineResult {
  double balanced_accuracy = 0.0;
  LearnedParameters learned;
  Diagnostics diagnostics;
};

// Training-side augmentation, xDAWN, features, CV over C, final SVM with
// threshold optimisation, evaluation. Both inputs must already be preprocessed
// and share channel order.
PipelineResult fit_and_evaluate(const EpochSet& train, const EpochSet& test, const PipelineConfig& config,
                                const TrainAugmentation& augmentation);

// preprocess() on both sides followed by fit_and_evaluate().
PipelineResult run_pipeline(const EpochSet& train, const EpochSet& test, const PipelineConfig& config,
                            const TrainAugmentation& augmentation);

// Segmentation (with time-shift augmentation and the initial shift on the
// training side), training subset, channel subset, then run_pipeline.
PipelineResult run_session_pipeline(const Session& train, const Session& test, const PipelineConfig& config,
                                    const RunOptions& options);

// Training-side segmentation used by run_session_pipeline; exposed for caching.
SegmentResult segment_training(const Session& train, const PipelineConfig& config, const RunOptions& options);
SegmentResult segment_test(const Session& test, const PipelineConfig& config);

}  // namespace erpaug
