#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"
#include "erpaug/features.hpp"

namespace erpaug {

struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  // Decision threshold on the score; set by threshold_optimize.
  double threshold_shift = 0.0;
  double trained_C = 0.0;

  Eigen::VectorXd scores(const FeatureMatrix& features) const;
  std::vector<Label> predict(const FeatureMatrix& features) const;
};

struct SvmOptions {
  double C = 1.0;
  double class_weight_positive = 1.0;
  // Coordinate updates; zero means 100 x n_samples.
  std::size_t max_iter = 0;
  double gap_tolerance = 1e-4;
  std::uint64_t seed = 0;
};

struct SvmSolution {
  LinearModel model;
  Eigen::VectorXd alpha;
  // Per-sample box bound C_i.
  Eigen::VectorXd upper;
  double dual_objective = 0.0;
  double primal_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Hinge-loss linear SVM, solved in the dual by randomised coordinate descent
// over 0 <= alpha_i <= C_i (C_i = C * class_weight_positive for positives).
// The bias is learned as the weight of a constant feature. Stops once the
// duality gap falls below the tolerance or after max_iter updates.
SvmSolution svm_train(const FeatureMatrix& features, std::span<const Label> labels, const SvmOptions& options);

// Dual objective sum(alpha) - 1/2 |sum alpha_i y_i x_i|^2 on bias-augmented rows.
double svm_dual_objective(const FeatureMatrix& features, std::span<const Label> labels,
                          const Eigen::VectorXd& alpha);

struct ThresholdResult {
  double shift = 0.0;
  double balanced_accuracy = 0.0;
  // Only one class present; shift left at zero.
  bool degenerate = false;
};

// Scans the midpoints between consecutive distinct scores plus +-infinity and
// picks the threshold with the best balanced accuracy; ties go to the
// smallest |threshold|.
ThresholdResult threshold_optimize(std::span<const double> scores, std::span<const Label> labels);

// (TPR + TNR) / 2. Throws SingleClass unless both classes occur in `labels`.
double balanced_accuracy(std::span<const Label> predictions, std::span<const Label> labels);

}  // namespace erpaug
