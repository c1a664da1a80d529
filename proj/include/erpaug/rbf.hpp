#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "erpaug/geometry.hpp"

namespace erpaug {

enum class KernelKind { Linear, Cubic, Quintic, Multiquadric, Gaussian };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel(std::string_view text);

struct Kernel {
  KernelKind kind = KernelKind::Cubic;
  // Shape parameter for Multiquadric and Gaussian. Zero means "pick the
  // default from the node set" (mean nearest-neighbour distance).
  double epsilon = 0.0;

  bool needs_epsilon() const {
    return kind == KernelKind::Multiquadric || kind == KernelKind::Gaussian;
  }
};

// Default ridge, relative to the mean absolute Gram entry.
inline constexpr double kDefaultRidge = 1e-10;

// Linear r, cubic r^3, quintic r^5, multiquadric sqrt((r/eps)^2 + 1),
// gaussian exp(-(r/eps)^2). Throws NegativeRadius for r < 0.
double kernel_eval(const Kernel& kernel, double r);

double mean_nearest_neighbor_distance(const PositionMatrix& nodes);

// Fills in the default epsilon for kernels that need one.
Kernel resolve_kernel(Kernel kernel, const PositionMatrix& nodes);

// Interpolation system over a fixed node set. The Gram matrix
// P = [phi(|p_i - p_j|)] (+ ridge) is factorised once at construction.
class RbfSystem {
 public:
  // Throws SingularSystem for coincident nodes or a numerically singular Gram
  // matrix, InvalidSpec for fewer than two nodes or a non-positive epsilon.
  RbfSystem(PositionMatrix nodes, Kernel kernel, double ridge = kDefaultRidge);

  std::size_t size() const { return static_cast<std::size_t>(nodes_.rows()); }
  const PositionMatrix& nodes() const { return nodes_; }
  const Kernel& kernel() const { return kernel_; }
  double ridge() const { return ridge_; }
  const Eigen::MatrixXd& gram() const { return gram_; }

  // Solves (P + ridge I) w = values.
  Eigen::VectorXd fit_weights(const Eigen::VectorXd& values) const;
  // f(q) = sum_i w_i phi(|q - p_i|) for every query row.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& weights, const PositionMatrix& query) const;
  // E_ji = phi(|q_j - p_i|).
  Eigen::MatrixXd evaluation_matrix(const PositionMatrix& query) const;
  // (P + ridge I)^-1 rhs, column by column.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  PositionMatrix nodes_;
  Kernel kernel_;
  double ridge_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd inv_eigenvalues_;
};

// Precomputed linear operator mapping channel values at the original
// electrode positions to interpolated values at the rotated positions:
// T = E(Q p, p) P^-1.
class SpatialResampler {
 public:
  SpatialResampler(Montage source, RotationSpec rotation, Kernel kernel, Eigen::MatrixXd transform);

  const Montage& source() const { return source_; }
  const RotationSpec& rotation() const { return rotation_; }
  const Kernel& kernel() const { return kernel_; }
  const Eigen::MatrixXd& transform() const { return transform_; }

 private:
  Montage source_;
  RotationSpec rotation_;
  Kernel kernel_;
  Eigen::MatrixXd transform_;
};

SpatialResampler build_resampler(const Montage& montage, const RotationSpec& rotation,
                                 const Kernel& kernel, double ridge = kDefaultRidge);

// Maps every column (time point) of a C x Tn segment through T.
Eigen::MatrixXd apply_resampler(const SpatialResampler& resampler, const Eigen::MatrixXd& segment);

// Reference path without the stored operator: for every time point a fresh
// interpolation system is built, fitted and evaluated at the rotated
// positions. Orders of magnitude slower; kept for benchmarking.
Eigen::MatrixXd resample_by_refitting(const Montage& montage, const RotationSpec& rotation,
                                      const Kernel& kernel, const Eigen::MatrixXd& segment,
                                      double ridge = kDefaultRidge);

}  // namespace erpaug
