#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace erpaug {

// Head-centred frame: x to the right ear, y to the nose, z through the vertex.
enum class Axis { X, Y, Z };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

struct RotationSpec {
  Axis axis = Axis::Z;
  double angle_deg = 0.0;

  // Throws InvalidSpec unless the angle is finite and within [-180, 180].
  void validate() const;
  RotationSpec inverse() const { return {axis, -angle_deg}; }
};

enum class MontageName { Cap64, Cap32, Cap19 };

std::string_view to_string(MontageName name);
MontageName parse_montage_name(std::string_view text);

// N x 3, one electrode position per row.
using PositionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

// Labelled electrode constellation on the unit sphere. Immutable.
class Montage {
 public:
  static constexpr double kRadius = 1.0;

  // Validates the invariants: equal lengths, unique labels drawn from the
  // extended 10-20 inventory and unit-norm positions (|1 - |p|| <= 1e-9).
  Montage(std::vector<std::string> labels, std::vector<Eigen::Vector3d> positions,
          std::string name = {});

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Eigen::Vector3d>& positions() const { return positions_; }
  // Name of the standard montage this constellation was derived from; empty if
  // it was assembled by hand.
  const std::string& name() const { return name_; }

  std::optional<std::size_t> index_of(std::string_view label) const;
  const Eigen::Vector3d& position(std::string_view label) const;
  PositionMatrix position_matrix() const;

  // Channels in the order given by `labels`; throws UnknownLabel.
  Montage subset(const std::vector<std::string>& labels) const;

 private:
  std::vector<std::string> labels_;
  std::vector<Eigen::Vector3d> positions_;
  std::string name_;
};

struct SphericalEntry {
  std::string label;
  double inclination_deg;
  double azimuth_deg;
};

// Parses "label inclination_deg azimuth_deg" records; '#' starts a comment.
std::vector<SphericalEntry> parse_montage_fixture(std::string_view text);
// Every label of the shipped extended 10-20 fixture, in file order.
const std::vector<std::string>& extended_1020_inventory();

Eigen::Vector3d spherical_to_cartesian(double inclination_deg, double azimuth_deg);

Montage standard_positions(MontageName name);
// Label list of a standard montage without building positions.
const std::vector<std::string>& standard_labels(MontageName name);

Eigen::Matrix3d rotation_matrix(const RotationSpec& spec);
Montage rotate_montage(const Montage& montage, const RotationSpec& spec);

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

// Polar display projection: x = r2 cos(azimuth) 60, y = r2 sin(azimuth) 60 with
// r2 = r / cos(inclination)^0.2 and r the distance from the z-axis. Throws
// DomainError for electrodes at or below the equator (cos(inclination) <= 0).
std::vector<Point2D> polar_project_2d(const Montage& montage);

class Grid2D {
 public:
  static constexpr std::size_t kRows = 7;
  static constexpr std::size_t kCols = 9;

  const std::optional<std::string>& cell(std::size_t row, std::size_t col) const;
  void set(std::size_t row, std::size_t col, std::optional<std::string> label);
  std::size_t occupied() const;

 private:
  std::array<std::optional<std::string>, kRows * kCols> cells_;
};

// Parses the 7 x 9 grid fixture ('-' for empty).
Grid2D parse_grid_fixture(std::string_view text);
// Rectangular layout of the 64-channel cap; labels missing from `montage` are
// left empty.
Grid2D grid_map(const Montage& montage);

}  // namespace erpaug
