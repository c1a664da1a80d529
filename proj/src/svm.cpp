#include "erpaug/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "erpaug/error.hpp"

namespace erpaug {

namespace {

double sign(Label l) { return l == Label::Positive ? 1.0 : -1.0; }

}  // namespace

Eigen::VectorXd LinearModel::scores(const FeatureMatrix& features) const {
  if (features.cols() != weights.size()) throw ShapeMismatch("feature dimension differs from the model");
  return (features * weights).array() + bias;
}

std::vector<Label> LinearModel::predict(const FeatureMatrix& features) const {
  const Eigen::VectorXd s = scores(features);
  std::vector<Label> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out[static_cast<std::size_t>(i)] = s(i) > threshold_shift ? Label::Positive : Label::Negative;
  }
  return out;
}

double svm_dual_objective(const FeatureMatrix& features, std::span<const Label> labels,
                          const Eigen::VectorXd& alpha) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(features.cols() + 1);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double ay = alpha(i) * sign(labels[static_cast<std::size_t>(i)]);
    w.head(features.cols()) += ay * features.row(i).transpose();
    w(features.cols()) += ay;
  }
  return alpha.sum() - 0.5 * w.squaredNorm();
}

SvmSolution svm_train(const FeatureMatrix& features, std::span<const Label> labels, const SvmOptions& options) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (labels.size() != n) throw LengthMismatch("feature rows and labels differ in number");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
  if (n_pos == 0 || n_pos == n) throw SingleClass("SVM training needs samples of both classes");
  if (!(options.C > 0.0) || !(options.class_weight_positive > 0.0)) {
    throw InvalidSpec("SVM C and class weight must be positive");
  }
  if (!features.allFinite()) throw DomainError("SVM features must be finite");

  const Eigen::Index d = features.cols();
  // Row-major copy of the bias-augmented samples for cache-friendly updates.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(static_cast<Eigen::Index>(n), d + 1);
  x.leftCols(d) = features;
  x.col(d).setOnes();

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::VectorXd upper(static_cast<Eigen::Index>(n));
  Eigen::VectorXd qii(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y(ii) = sign(labels[i]);
    upper(ii) = options.C * (labels[i] == Label::Positive ? options.class_weight_positive : 1.0);
    qii(ii) = x.row(ii).squaredNorm();
  }

  const std::size_t max_iter = options.max_iter ? options.max_iter : 100 * n;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);

  SvmSolution sol;
  auto objectives = [&] {
    const double wn = w.squaredNorm();
    const Eigen::VectorXd margins = (x * w).cwiseProduct(y);
    const double hinge = (1.0 - margins.array()).max(0.0).matrix().dot(upper);
    sol.primal_objective = 0.5 * wn + hinge;
    sol.dual_objective = alpha.sum() - 0.5 * wn;
    return sol.primal_objective - sol.dual_objective;
  };

  std::size_t updates = 0;
  while (updates < max_iter) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < n && updates < max_iter; ++k, ++updates) {
      const auto i = static_cast<Eigen::Index>(order[k]);
      const double g = y(i) * x.row(i).dot(w) - 1.0;
      double pg = g;
      if (alpha(i) <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha(i) >= upper(i)) {
        pg = std::max(g, 0.0);
      }
      if (std::abs(pg) < 1e-14) continue;
      const double old = alpha(i);
      alpha(i) = std::clamp(old - g / qii(i), 0.0, upper(i));
      w += ((alpha(i) - old) * y(i)) * x.row(i).transpose();
    }
    if (objectives() <= options.gap_tolerance) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) objectives();

  sol.alpha = std::move(alpha);
  sol.upper = std::move(upper);
  sol.iterations = updates;
  sol.model.weights = w.head(d);
  sol.model.bias = w(d);
  sol.model.trained_C = options.C;
  return sol;
}

ThresholdResult threshold_optimize(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::Positive));
  const std::size_t n_neg = labels.size() - n_pos;
  ThresholdResult best;
  if (n_pos == 0 || n_neg == 0) {
    best.degenerate = true;
    return best;
  }

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk thresholds from -inf upwards; everything at or below the threshold
  // is predicted negative.
  std::size_t neg_below = 0;
  std::size_t pos_below = 0;
  auto evaluate = [&](double t) {
    const double tpr = static_cast<double>(n_pos - pos_below) / static_cast<double>(n_pos);
    const double tnr = static_cast<double>(neg_below) / static_cast<double>(n_neg);
    const double ba = 0.5 * (tpr + tnr);
    const bool better = ba > best.balanced_accuracy + 1e-12 ||
                        (std::abs(ba - best.balanced_accuracy) <= 1e-12 && std::abs(t) < std::abs(best.shift));
    if (better) {
      best.balanced_accuracy = ba;
      best.shift = t;
    }
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  best.shift = -inf;
  best.balanced_accuracy = 0.5;  // all predicted positive
  std::size_t k = 0;
  while (k < idx.size()) {
    const double value = scores[idx[k]];
    while (k < idx.size() && scores[idx[k]] == value) {
      (labels[idx[k]] == Label::Positive ? pos_below : neg_below) += 1;
      ++k;
    }
    const double t = k < idx.size() ? 0.5 * (value + scores[idx[k]]) : inf;
    evaluate(t);
  }
  return best;
}

double balanced_accuracy(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) throw LengthMismatch("predictions and labels differ in length");
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Label::Positive) {
      (predictions[i] == Label::Positive ? tp : fn) += 1;
    } else {
      (predictions[i] == Label::Negative ? tn : fp) += 1;
    }
  }
  if (tp + fn == 0 || tn + fp == 0) throw SingleClass("balanced accuracy needs both classes in the labels");
  const double tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double tnr = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (tpr + tnr);
}

}  // namespace erpaug
