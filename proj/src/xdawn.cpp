#include "erpaug/xdawn.hpp"

#include <algorithm>

#include "erpaug/error.hpp"

namespace erpaug {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kShrinkage = 1e-6;

}  // namespace

Eigen::MatrixXd evoked_covariance(const EpochSet& train) {
  const std::size_t n_pos = train.count(Label::Positive);
  if (n_pos == 0) throw SingleClass("xDAWN needs positive-class epochs");
  Eigen::MatrixXd average = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(train.channels()),
                                                  static_cast<Eigen::Index>(train.samples()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels[i] == Label::Positive) average += train.epochs[i];
  }
  average /= static_cast<double>(n_pos);
  average.colwise() -= average.rowwise().mean();
  return average * average.transpose() / static_cast<double>(average.cols());
}

Eigen::MatrixXd total_covariance(const EpochSet& train) {
  const auto c = static_cast<Eigen::Index>(train.channels());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c);
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(c, c);
  for (const auto& e : train.epochs) {
    sum += e.rowwise().sum();
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(e);
  }
  const double n = static_cast<double>(train.size() * train.samples());
  const Eigen::VectorXd mean = sum / n;
  Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
  cov /= n;
  cov -= mean * mean.transpose();
  return cov;
}

XdawnFilters xdawn_fit(const EpochSet& train, std::size_t n_filters) {
  train.validate();
  if (train.count(Label::Positive) == 0 || train.count(Label::Negative) == 0) {
    throw SingleClass("xDAWN needs epochs of both classes");
  }
  const std::size_t c = train.channels();
  if (n_filters == 0 || n_filters > c) {
    throw InvalidSpec("requested " + std::to_string(n_filters) + " spatial filters for " +
                      std::to_string(c) + " channels");
  }

  Eigen::MatrixXd sigma_total = total_covariance(train);
  const Eigen::MatrixXd sigma_evoked = evoked_covariance(train);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> total_eig(sigma_total);
  Eigen::VectorXd lambda = total_eig.eigenvalues();
  XdawnFilters out;
  if (!(lambda.maxCoeff() > 0.0)) throw SingleClass("training epochs carry no signal");
  if (lambda.minCoeff() <= kRankTolerance * lambda.maxCoeff()) {
    out.shrinkage = kShrinkage;
    const double mean_var = sigma_total.trace() / static_cast<double>(c);
    lambda = (1.0 - kShrinkage) * lambda.array() + kShrinkage * mean_var;
  }

  // S_total = U diag(lambda) U'; whitening W_h = U diag(lambda)^-1/2.
  const Eigen::MatrixXd whitening =
      total_eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd whitened_evoked = whitening.transpose() * sigma_evoked * whitening;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> evoked_eig(whitened_evoked);

  // Eigen sorts ascending; the filters are the trailing eigenvectors reversed.
  const auto k = static_cast<Eigen::Index>(n_filters);
  const auto total = static_cast<Eigen::Index>(c);
  out.filters.resize(total, k);
  out.quotients.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index src = total - 1 - j;
    out.filters.col(j) = whitening * evoked_eig.eigenvectors().col(src);
    out.quotients(j) = std::max(0.0, evoked_eig.eigenvalues()(src));
  }
  return out;
}

EpochSet xdawn_apply(const EpochSet& set, const Eigen::MatrixXd& filters) {
  if (!set.empty() && static_cast<std::size_t>(filters.rows()) != set.channels()) {
    throw ShapeMismatch("spatial filters expect " + std::to_string(filters.rows()) +
                        " channels, epochs have " + std::to_string(set.channels()));
  }
  EpochSet out = set.empty_like();
  out.montage.reset();
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.push_back(filters.transpose() * set.epochs[i], set.labels[i], set.provenance[i]);
  }
  return out;
}

}  // namespace erpaug
