#include "erpaug/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "erpaug/error.hpp"
#include "erpaug/xdawn.hpp"

namespace erpaug {

namespace {

using Clock = std::chrono::steady_clock;

class StageClock {
 public:
  explicit StageClock(Diagnostics& diag) : diag_(diag), last_(Clock::now()) {}
  void mark(const char* stage) {
    const auto now = Clock::now();
    diag_.timings.push_back({stage, std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }

 private:
  Diagnostics& diag_;
  Clock::time_point last_;
};

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::equal(a.data(), a.data() + a.size(), b.data());
}

std::vector<Label> subset_labels(std::span<const Label> labels, const std::vector<std::size_t>& idx) {
  std::vector<Label> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

}  // namespace

void PipelineConfig::validate(std::optional<double> source_rate_hz) const {
  if (!(window_ms.length_ms() > 0.0)) throw InvalidSpec("window_ms must have positive length");
  if (!(target_rate_hz > 0.0)) throw InvalidSpec("target_rate_hz must be positive");
  if (!(band_hz.low_hz >= 0.0) || !(band_hz.high_hz > band_hz.low_hz) || band_hz.high_hz > target_rate_hz / 2.0) {
    throw InvalidSpec("band_hz must satisfy 0 <= low < high <= target Nyquist");
  }
  if (crop_last_ms && (!(*crop_last_ms > 0.0) || *crop_last_ms > window_ms.length_ms())) {
    throw InvalidSpec("crop_last_ms must be positive and fit inside the window");
  }
  if (n_spatial_filters < 1) throw InvalidSpec("n_spatial_filters must be at least 1");
  if (features.kind == FeatureKind::SlopeWindows && (features.width_samples < 2 || features.stride_samples < 1)) {
    throw InvalidSpec("features: slope windows need width >= 2 and stride >= 1");
  }
  if (c_grid.empty()) throw InvalidSpec("c_grid must not be empty");
  for (std::size_t i = 0; i < c_grid.size(); ++i) {
    if (!(c_grid[i] > 0.0) || !std::isfinite(c_grid[i])) throw InvalidSpec("c_grid entries must be positive");
    if (i > 0 && !(c_grid[i] < c_grid[i - 1])) throw InvalidSpec("c_grid must be strictly decreasing");
  }
  if (cv.folds < 2) throw InvalidSpec("cv.folds must be at least 2");
  if (cv.repetitions < 1) throw InvalidSpec("cv.repetitions must be at least 1");
  if (!(class_weight_positive > 0.0)) throw InvalidSpec("class_weight_positive must be positive");
  if (max_iter_factor < 1) throw InvalidSpec("max_iter_factor must be at least 1");
  if (metric != "balanced_accuracy") throw InvalidSpec("metric '" + metric + "' is not supported");
  if (source_rate_hz) decimation_stages(*source_rate_hz, target_rate_hz);
}

void validate_options(const RunOptions& options, const PipelineConfig& config) {
  if (options.augment_test) throw InvalidSpec("augmentation is applied to training data only");
  for (const auto& plan : options.augmentation.rotations) plan.validate();
  if (options.augmentation.replacement && !std::isfinite(options.augmentation.replacement->angle_deg)) {
    throw InvalidSpec("cap replacement angle must be finite");
  }
  if (options.time_shift) options.time_shift->validate(config.window_ms.length_ms());
  if (!std::isfinite(options.initial_shift_ms)) throw InvalidSpec("initial shift must be finite");
  if (!(options.train_fraction > 0.0 && options.train_fraction <= 1.0)) {
    throw InvalidSpec("train_fraction must lie in (0, 1]");
  }
}

PreprocessResult preprocess(const EpochSet& raw, const PipelineConfig& config) {
  PreprocessResult out;
  EpochSet e = raw;
  out.flat_channels = standardize_all(e);
  e = decimate(e, config.target_rate_hz);
  e = fft_bandpass(e, config.band_hz);
  if (config.crop_last_ms) e = crop_last(e, *config.crop_last_ms);
  out.epochs = std::move(e);
  return out;
}

FeatureMatrix extract_features(const EpochSet& pseudo, const FeatureSpec& spec) {
  return spec.kind == FeatureKind::SlopeWindows ? slope_features(pseudo, spec.width_samples, spec.stride_samples)
                                                : raw_features(pseudo);
}

CvResult cross_validate_C(const FeatureMatrix& features, std::span<const Label> labels,
                          const PipelineConfig& config) {
  const std::size_t n = labels.size();
  if (static_cast<std::size_t>(features.rows()) != n) throw LengthMismatch("features and labels differ in number");
  const std::size_t folds = config.cv.folds;
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == Label::Positive].push_back(i);
  if (by_class[0].size() < folds || by_class[1].size() < folds) {
    throw TooFewSamples("stratified " + std::to_string(folds) + "-fold CV needs at least " + std::to_string(folds) +
                        " epochs per class");
  }

  CvResult out;
  out.mean_scores.assign(config.c_grid.size(), 0.0);
  std::size_t runs = 0;
  for (std::size_t rep = 0; rep < config.cv.repetitions; ++rep) {
    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(rep), std::uint64_t{0xC5}};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> fold_of(n);
    for (auto& members : by_class) {
      std::vector<std::size_t> shuffled = members;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (std::size_t k = 0; k < shuffled.size(); ++k) fold_of[shuffled[k]] = k % folds;
    }
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> tr, te;
      for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
      const FeatureMatrix ftr = features(tr, Eigen::all);
      const FeatureMatrix fte = features(te, Eigen::all);
      const std::vector<Label> ltr = subset_labels(labels, tr);
      const std::vector<Label> lte = subset_labels(labels, te);
      for (std::size_t c = 0; c < config.c_grid.size(); ++c) {
        SvmOptions opts;
        opts.C = config.c_grid[c];
        opts.class_weight_positive = config.class_weight_positive;
        opts.max_iter = config.max_iter_factor * tr.size();
        opts.seed = config.seed;
        SvmSolution sol = svm_train(ftr, ltr, opts);
        const Eigen::VectorXd s = sol.model.scores(ftr);
        sol.model.threshold_shift = threshold_optimize({s.data(), static_cast<std::size_t>(s.size())}, ltr).shift;
        out.mean_scores[c] += balanced_accuracy(sol.model.predict(fte), lte);
      }
      ++runs;
    }
  }
  for (double& s : out.mean_scores) s /= static_cast<double>(runs);

  const double best = *std::max_element(out.mean_scores.begin(), out.mean_scores.end());
  for (std::size_t c = 0; c < config.c_grid.size(); ++c) {
    if (out.mean_scores[c] >= best - 1e-12) out.best_C = config.c_grid[c];
  }
  return out;
}

bool LearnedParameters::operator==(const LearnedParameters& other) const {
  return same_bits(spatial_filters, other.spatial_filters) &&
         same_bits(normalization.mean, other.normalization.mean) &&
         same_bits(normalization.scale, other.normalization.scale) &&
         same_bits(model.weights, other.model.weights) && model.bias == other.model.bias &&
         model.threshold_shift == other.model.threshold_shift && model.trained_C == other.model.trained_C;
}

PipelineResult fit_and_evaluate(const EpochSet& train, const EpochSet& test, const PipelineConfig& config,
                                const TrainAugmentation& augmentation) {
  train.validate();
  test.validate();
  if (train.empty() || test.empty()) throw TooFewSamples("training and test sets must be non-empty");
  if (train.channels() != test.channels() || train.samples() != test.samples()) {
    throw ShapeMismatch("training and test epochs differ in shape");
  }
  if (train.montage && test.montage && train.montage->labels() != test.montage->labels()) {
    throw ShapeMismatch("training and test montages list different channels");
  }

  PipelineResult result;
  Diagnostics& diag = result.diagnostics;
  StageClock clock(diag);
  diag.train_epochs = train.size();
  diag.test_epochs = test.size();

  EpochSet tr = train;
  if (augmentation.replacement && augmentation.replacement->angle_deg != 0.0) {
    const auto& r = *augmentation.replacement;
    tr = cap_shift_replace(tr, r.axis, r.angle_deg, r.kernel);
  }
  if (!augmentation.rotations.empty()) tr = rotational_augment(tr, augmentation.rotations);
  diag.train_epochs_augmented = tr.size();
  clock.mark("augment");

  const XdawnFilters xd = xdawn_fit(tr, config.n_spatial_filters);
  const EpochSet ptr = xdawn_apply(tr, xd.filters);
  const EpochSet pte = xdawn_apply(test, xd.filters);
  diag.xdawn_shrinkage = xd.shrinkage;
  diag.pseudo_channels = ptr.channels();
  diag.samples_per_epoch = ptr.samples();
  clock.mark("xdawn");

  const FeatureMatrix raw_tr = extract_features(ptr, config.features);
  const FeatureMatrix raw_te = extract_features(pte, config.features);
  const FeatureNormalization norm = FeatureNormalization::fit(raw_tr);
  const FeatureMatrix ftr = norm.apply(raw_tr);
  const FeatureMatrix fte = norm.apply(raw_te);
  diag.feature_dim = static_cast<std::size_t>(ftr.cols());
  clock.mark("features");

  const CvResult cv = cross_validate_C(ftr, ptr.labels, config);
  diag.cv_scores = cv.mean_scores;
  clock.mark("cross_validation");

  SvmOptions opts;
  opts.C = cv.best_C;
  opts.class_weight_positive = config.class_weight_positive;
  opts.max_iter = config.max_iter_factor * ptr.size();
  opts.seed = config.seed;
  SvmSolution sol = svm_train(ftr, ptr.labels, opts);
  const Eigen::VectorXd s = sol.model.scores(ftr);
  const ThresholdResult th = threshold_optimize({s.data(), static_cast<std::size_t>(s.size())}, ptr.labels);
  sol.model.threshold_shift = th.shift;
  diag.svm_converged = sol.converged;
  diag.train_threshold_accuracy = th.balanced_accuracy;
  clock.mark("svm");

  result.balanced_accuracy = balanced_accuracy(sol.model.predict(fte), pte.labels);
  clock.mark("evaluate");

  result.learned.spatial_filters = xd.filters;
  result.learned.normalization = norm;
  result.learned.model = sol.model;
  return result;
}

PipelineResult run_pipeline(const EpochSet& train, const EpochSet& test, const PipelineConfig& config,
                            const TrainAugmentation& augmentation) {
  config.validate(train.sampling_rate_hz);
  const auto t0 = Clock::now();
  PreprocessResult ptr = preprocess(train, config);
  PreprocessResult pte = preprocess(test, config);
  const double prep_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  PipelineResult result = fit_and_evaluate(ptr.epochs, pte.epochs, config, augmentation);
  result.diagnostics.timings.insert(result.diagnostics.timings.begin(), {"preprocess", prep_ms});
  result.diagnostics.flat_channels = ptr.flat_channels + pte.flat_channels;
  return result;
}

SegmentResult segment_training(const Session& train, const PipelineConfig& config, const RunOptions& options) {
  std::vector<Marker> markers = train.markers;
  if (options.train_fraction < 1.0) {
    std::vector<Label> labels;
    labels.reserve(markers.size());
    for (const auto& m : markers) labels.push_back(m.label);
    std::vector<Marker> kept;
    for (std::size_t i : stratified_subset(labels, options.train_fraction, options.seed)) kept.push_back(markers[i]);
    markers = std::move(kept);
  }
  SegmentResult seg =
      options.time_shift
          ? temporal_augment(train.recording, markers, config.window_ms, *options.time_shift, train.montage,
                             options.initial_shift_ms)
          : segment(train.recording, markers, config.window_ms, train.montage, options.initial_shift_ms);
  if (!options.channel_subset.empty()) seg.epochs = select_channels(seg.epochs, options.channel_subset);
  return seg;
}

SegmentResult segment_test(const Session& test, const PipelineConfig& config) {
  return segment(test.recording, test.markers, config.window_ms, test.montage);
}

PipelineResult run_session_pipeline(const Session& train, const Session& test, const PipelineConfig& config,
                                    const RunOptions& options) {
  validate_options(options, config);
  config.validate(train.recording.sampling_rate_hz);
  if (test.recording.sampling_rate_hz != train.recording.sampling_rate_hz) {
    throw ShapeMismatch("training and test sessions differ in sampling rate");
  }
  SegmentResult tr = segment_training(train, config, options);
  SegmentResult te = segment_test(test, config);
  if (!options.channel_subset.empty()) te.epochs = select_channels(te.epochs, options.channel_subset);
  PipelineResult result = run_pipeline(tr.epochs, te.epochs, config, options.augmentation);
  result.diagnostics.dropped_train = tr.dropped;
  result.diagnostics.dropped_test = te.dropped;
  return result;
}

}  // namespace erpaug
