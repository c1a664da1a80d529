#pragma once

// Reference implementations shared by the unit tests and the acceptance
// binary. Each one is written without the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "erpaug/epochs.hpp"

namespace oracle {

inline double sign(erpaug::Label l) { return l == erpaug::Label::Positive ? 1.0 : -1.0; }

// Box-constrained dual QP  max sum(a) - 1/2 a'Qa, 0 <= a <= u, with
// Q_ij = y_i y_j (x_i . x_j + 1), solved by accelerated projected gradient
// until the projected gradient vanishes to 1e-11.
struct QpResult {
  Eigen::VectorXd alpha;
  double objective = 0.0;
};

inline QpResult svm_dual_qp(const Eigen::MatrixXd& x, const std::vector<erpaug::Label>& labels,
                            const Eigen::VectorXd& upper) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd xa(n, x.cols() + 1);
  xa << x, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = sign(labels[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd q = y.asDiagonal() * (xa * xa.transpose()) * y.asDiagonal();
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-12);

  auto project = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::clamp(v(i), 0.0, upper(i));
    return v;
  };
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), z = a;
  double t = 1.0;
  for (int it = 0; it < 2000000; ++it) {
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - q * z;
    const Eigen::VectorXd next = project(z + step * grad);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - a);
    // Restart the momentum whenever it points uphill.
    if ((next - a).dot(grad) < 0.0) {
      z = next;
      t = 1.0;
    } else {
      t = t_next;
    }
    a = next;
    const Eigen::VectorXd g = Eigen::VectorXd::Ones(n) - q * a;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double pg = g(i);
      if (a(i) <= 0.0) pg = std::max(pg, 0.0);
      if (a(i) >= upper(i)) pg = std::min(pg, 0.0);
      worst = std::max(worst, std::abs(pg));
    }
    if (worst < 1e-11) break;
  }
  QpResult out;
  out.alpha = a;
  out.objective = a.sum() - 0.5 * a.dot(q * a);
  return out;
}

// Evoked and total covariances computed entry by entry.
inline Eigen::MatrixXd evoked_covariance(const erpaug::EpochSet& set) {
  const auto c = static_cast<Eigen::Index>(set.channels());
  const auto t = static_cast<Eigen::Index>(set.samples());
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(c, t);
  double n = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.labels[i] != erpaug::Label::Positive) continue;
    avg += set.epochs[i];
    n += 1.0;
  }
  avg /= n;
  Eigen::MatrixXd cov(c, c);
  for (Eigen::Index a = 0; a < c; ++a) {
    for (Eigen::Index b = 0; b < c; ++b) {
      const double ma = avg.row(a).mean(), mb = avg.row(b).mean();
      double s = 0.0;
      for (Eigen::Index k = 0; k < t; ++k) s += (avg(a, k) - ma) * (avg(b, k) - mb);
      cov(a, b) = s / static_cast<double>(t);
    }
  }
  return cov;
}

inline Eigen::MatrixXd total_covariance(const erpaug::EpochSet& set) {
  const auto c = static_cast<Eigen::Index>(set.channels());
  const auto t = static_cast<Eigen::Index>(set.samples());
  Eigen::MatrixXd all(c, t * static_cast<Eigen::Index>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) all.middleCols(static_cast<Eigen::Index>(i) * t, t) = set.epochs[i];
  const Eigen::MatrixXd centred = all.colwise() - all.rowwise().mean();
  return centred * centred.transpose() / static_cast<double>(all.cols());
}

// Leading generalised eigenvector of (S_evoked, S_total), unit length.
inline Eigen::VectorXd xdawn_first_filter(const erpaug::EpochSet& set) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(oracle::evoked_covariance(set), oracle::total_covariance(set));
  return ges.eigenvectors().col(ges.eigenvectors().cols() - 1).normalized();
}

// Positive epochs carry s(t) along a random unit direction d, on top of
// isotropic white noise.
struct PlantedSet {
  erpaug::EpochSet set;
  Eigen::VectorXd direction;
};

inline PlantedSet planted_evoked_set(std::uint64_t seed, std::size_t channels = 12, std::size_t samples = 25,
                                     std::size_t n_pos = 300, std::size_t n_neg = 600, double amplitude = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PlantedSet out;
  const auto c = static_cast<Eigen::Index>(channels);
  const auto t = static_cast<Eigen::Index>(samples);
  out.direction.resize(c);
  for (auto& v : out.direction) v = g(rng);
  out.direction.normalize();
  Eigen::RowVectorXd bump(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const double u = (static_cast<double>(k) - 0.4 * static_cast<double>(t)) / (0.12 * static_cast<double>(t));
    bump(k) = amplitude * std::exp(-0.5 * u * u);
  }
  out.set.sampling_rate_hz = 25.0;
  for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
    Eigen::MatrixXd e(c, t);
    for (auto& v : e.reshaped()) v = g(rng);
    const bool pos = i < n_pos;
    if (pos) e += out.direction * bump;
    out.set.push_back(std::move(e), pos ? erpaug::Label::Positive : erpaug::Label::Negative,
                      erpaug::Provenance::original());
  }
  return out;
}

// Two-sided sign-flip p-value by enumerating all 2^n patterns.
inline double exhaustive_sign_flip(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  double observed = 0.0;
  for (double d : diffs) observed += d;
  observed = std::abs(observed) / static_cast<double>(n);
  std::size_t hits = 0;
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < total; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (mask >> i & 1U) ? -diffs[i] : diffs[i];
    if (std::abs(s) / static_cast<double>(n) >= observed - 1e-12) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
