#include "erpaug/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erpaug/error.hpp"

namespace erpaug {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Cubic: return "cubic";
    case KernelKind::Quintic: return "quintic";
    case KernelKind::Multiquadric: return "multiquadric";
    case KernelKind::Gaussian: return "gaussian";
  }
  return "?";
}

KernelKind parse_kernel(std::string_view text) {
  for (auto k : {KernelKind::Linear, KernelKind::Cubic, KernelKind::Quintic,
                 KernelKind::Multiquadric, KernelKind::Gaussian}) {
    if (text == to_string(k)) return k;
  }
  throw InvalidSpec("unknown kernel '" + std::string(text) +
                    "' (expected linear, cubic, quintic, multiquadric or gaussian)");
}

double kernel_eval(const Kernel& kernel, double r) {
  if (!(r >= 0.0)) throw NegativeRadius("kernel evaluated at negative radius " + std::to_string(r));
  switch (kernel.kind) {
    case KernelKind::Linear: return r;
    case KernelKind::Cubic: return r * r * r;
    case KernelKind::Quintic: {
      const double r2 = r * r;
      return r2 * r2 * r;
    }
    case KernelKind::Multiquadric: {
      const double s = r / kernel.epsilon;
      return std::sqrt(s * s + 1.0);
    }
    case KernelKind::Gaussian: {
      const double s = r / kernel.epsilon;
      return std::exp(-s * s);
    }
  }
  return 0.0;
}

double mean_nearest_neighbor_distance(const PositionMatrix& nodes) {
  const Eigen::Index n = nodes.rows();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) best = std::min(best, (nodes.row(i) - nodes.row(j)).norm());
    }
    total += best;
  }
  return total / static_cast<double>(n);
}

Kernel resolve_kernel(Kernel kernel, const PositionMatrix& nodes) {
  if (kernel.needs_epsilon() && kernel.epsilon == 0.0) {
    kernel.epsilon = mean_nearest_neighbor_distance(nodes);
  }
  return kernel;
}

RbfSystem::RbfSystem(PositionMatrix nodes, Kernel kernel, double ridge)
    : nodes_(std::move(nodes)), kernel_(resolve_kernel(kernel, nodes_)), ridge_(ridge) {
  const Eigen::Index n = nodes_.rows();
  if (n < 2) throw InvalidSpec("an interpolation system needs at least two nodes");
  if (kernel_.needs_epsilon() && !(kernel_.epsilon > 0.0)) {
    throw InvalidSpec("kernel " + std::string(to_string(kernel_.kind)) +
                      " needs a positive epsilon");
  }
  if (!(ridge_ >= 0.0)) throw InvalidSpec("ridge must be non-negative");

  gram_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double d = (nodes_.row(i) - nodes_.row(j)).norm();
      if (i != j && d < 1e-9) {
        throw SingularSystem("interpolation nodes " + std::to_string(i) + " and " +
                             std::to_string(j) + " coincide");
      }
      gram_(i, j) = gram_(j, i) = kernel_eval(kernel_, d);
    }
  }

  Eigen::MatrixXd system = gram_;
  if (ridge_ > 0.0) {
    const double scale = gram_.cwiseAbs().mean();
    system.diagonal().array() += ridge_ * scale;
  }

  // Symmetric eigendecomposition; P is symmetric but indefinite for the
  // polyharmonic kernels, so Cholesky-type factorisations do not apply.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system);
  if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) {
    throw SingularSystem("eigendecomposition of the interpolation matrix failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  const double smallest = lambda.cwiseAbs().minCoeff();
  if (!(largest > 0.0) || smallest <= 1e-14 * largest) {
    throw SingularSystem("interpolation matrix is numerically singular (|lambda| ratio " +
                         std::to_string(smallest / largest) + ")");
  }
  eigenvectors_ = eig.eigenvectors();
  inv_eigenvalues_ = lambda.cwiseInverse();
}

Eigen::MatrixXd RbfSystem::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != nodes_.rows()) {
    throw ShapeMismatch("right-hand side has " + std::to_string(rhs.rows()) + " rows, system has " +
                        std::to_string(nodes_.rows()) + " nodes");
  }
  Eigen::MatrixXd projected = eigenvectors_.transpose() * rhs;
  projected = inv_eigenvalues_.asDiagonal() * projected;
  return eigenvectors_ * projected;
}

Eigen::VectorXd RbfSystem::fit_weights(const Eigen::VectorXd& values) const {
  if (!values.allFinite()) throw DomainError("interpolation values must be finite");
  return solve(values);
}

Eigen::MatrixXd RbfSystem::evaluation_matrix(const PositionMatrix& query) const {
  Eigen::MatrixXd e(query.rows(), nodes_.rows());
  for (Eigen::Index j = 0; j < query.rows(); ++j) {
    for (Eigen::Index i = 0; i < nodes_.rows(); ++i) {
      e(j, i) = kernel_eval(kernel_, (query.row(j) - nodes_.row(i)).norm());
    }
  }
  return e;
}

Eigen::VectorXd RbfSystem::evaluate(const Eigen::VectorXd& weights, const PositionMatrix& query) const {
  if (weights.size() != nodes_.rows()) {
    throw ShapeMismatch("weight vector length does not match node count");
  }
  Eigen::VectorXd out(query.rows());
  for (Eigen::Index j = 0; j < query.rows(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < nodes_.rows(); ++i) {
      acc += weights(i) * kernel_eval(kernel_, (query.row(j) - nodes_.row(i)).norm());
    }
    out(j) = acc;
  }
  return out;
}

SpatialResampler::SpatialResampler(Montage source, RotationSpec rotation, Kernel kernel,
                                   Eigen::MatrixXd transform)
    : source_(std::move(source)), rotation_(rotation), kernel_(kernel), transform_(std::move(transform)) {
  const auto n = static_cast<Eigen::Index>(source_.size());
  if (transform_.rows() != n || transform_.cols() != n) {
    throw ShapeMismatch("resampler transform must be square with one row per channel");
  }
  if (!transform_.allFinite()) throw SingularSystem("resampler transform has non-finite entries");
}

SpatialResampler build_resampler(const Montage& montage, const RotationSpec& rotation,
                                 const Kernel& kernel, double ridge) {
  const RbfSystem system(montage.position_matrix(), kernel, ridge);
  const PositionMatrix rotated = rotate_montage(montage, rotation).position_matrix();
  const Eigen::MatrixXd e = system.evaluation_matrix(rotated);
  // T = E P^-1 and P is symmetric, so T^T = P^-1 E^T.
  Eigen::MatrixXd t = system.solve(e.transpose()).transpose();
  return SpatialResampler(montage, rotation, system.kernel(), std::move(t));
}

Eigen::MatrixXd apply_resampler(const SpatialResampler& resampler, const Eigen::MatrixXd& segment) {
  if (segment.rows() != resampler.transform().cols()) {
    throw ShapeMismatch("segment has " + std::to_string(segment.rows()) +
                        " channels, resampler expects " +
                        std::to_string(resampler.transform().cols()));
  }
  return resampler.transform() * segment;
}

Eigen::MatrixXd resample_by_refitting(const Montage& montage, const RotationSpec& rotation,
                                      const Kernel& kernel, const Eigen::MatrixXd& segment,
                                      double ridge) {
  if (segment.rows() != static_cast<Eigen::Index>(montage.size())) {
    throw ShapeMismatch("segment channel count does not match montage");
  }
  const PositionMatrix nodes = montage.position_matrix();
  const PositionMatrix rotated = rotate_montage(montage, rotation).position_matrix();
  Eigen::MatrixXd out(segment.rows(), segment.cols());
  for (Eigen::Index t = 0; t < segment.cols(); ++t) {
    const RbfSystem system(nodes, kernel, ridge);
    const Eigen::VectorXd w = system.fit_weights(segment.col(t));
    out.col(t) = system.evaluate(w, rotated);
  }
  return out;
}

}  // namespace erpaug
