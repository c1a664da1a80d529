#include "erpaug/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "erpaug/error.hpp"
#include "erpaug/fixtures_generated.hpp"

namespace erpaug {

namespace {

// sin/cos of an angle in degrees, exact at multiples of 90.
std::pair<double, double> sin_cos_deg(double deg) {
  const double quarter = deg / 90.0;
  if (quarter == std::round(quarter)) {
    static constexpr std::array<std::pair<double, double>, 4> kExact{
        {{0.0, 1.0}, {1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}}};
    const auto q = static_cast<long long>(std::round(quarter));
    return kExact[static_cast<std::size_t>(((q % 4) + 4) % 4)];
  }
  const double rad = deg * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const std::vector<SphericalEntry>& fixture_entries() {
  static const std::vector<SphericalEntry> entries = parse_montage_fixture(fixtures::kMontage1020);
  return entries;
}

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view text) {
  const std::string t = lower(text);
  if (t == "x" || t == "0") return Axis::X;
  if (t == "y" || t == "1") return Axis::Y;
  if (t == "z" || t == "2") return Axis::Z;
  throw InvalidSpec("unknown rotation axis '" + std::string(text) + "' (expected x, y or z)");
}

void RotationSpec::validate() const {
  if (!std::isfinite(angle_deg) || angle_deg < -180.0 || angle_deg > 180.0) {
    throw InvalidSpec("rotation angle must be finite and within [-180, 180] degrees, got " +
                      std::to_string(angle_deg));
  }
}

std::string_view to_string(MontageName name) {
  switch (name) {
    case MontageName::Cap64: return "cap64";
    case MontageName::Cap32: return "cap32";
    case MontageName::Cap19: return "cap19";
  }
  return "?";
}

MontageName parse_montage_name(std::string_view text) {
  const std::string t = lower(text);
  if (t == "cap64" || t == "64") return MontageName::Cap64;
  if (t == "cap32" || t == "32") return MontageName::Cap32;
  if (t == "cap19" || t == "19") return MontageName::Cap19;
  throw InvalidSpec("unknown montage '" + std::string(text) + "' (expected cap64, cap32 or cap19)");
}

Montage::Montage(std::vector<std::string> labels, std::vector<Eigen::Vector3d> positions,
                 std::string name)
    : labels_(std::move(labels)), positions_(std::move(positions)), name_(std::move(name)) {
  if (labels_.size() != positions_.size()) {
    throw InvalidMontage("montage has " + std::to_string(labels_.size()) + " labels but " +
                         std::to_string(positions_.size()) + " positions");
  }
  static const std::unordered_set<std::string> inventory(extended_1020_inventory().begin(),
                                                         extended_1020_inventory().end());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& label = labels_[i];
    if (!inventory.contains(label)) {
      throw InvalidMontage("label '" + label + "' is not in the extended 10-20 inventory");
    }
    if (!seen.insert(label).second) {
      throw InvalidMontage("duplicate label '" + label + "'");
    }
    const double norm = positions_[i].norm();
    if (!std::isfinite(norm) || std::abs(norm - kRadius) > 1e-9) {
      throw InvalidMontage("position of '" + label + "' is not on the unit sphere (norm " +
                           std::to_string(norm) + ")");
    }
  }
}

std::optional<std::size_t> Montage::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

const Eigen::Vector3d& Montage::position(std::string_view label) const {
  const auto idx = index_of(label);
  if (!idx) throw UnknownLabel("montage has no channel '" + std::string(label) + "'");
  return positions_[*idx];
}

PositionMatrix Montage::position_matrix() const {
  PositionMatrix m(static_cast<Eigen::Index>(size()), 3);
  for (std::size_t i = 0; i < size(); ++i) m.row(static_cast<Eigen::Index>(i)) = positions_[i];
  return m;
}

Montage Montage::subset(const std::vector<std::string>& labels) const {
  std::vector<Eigen::Vector3d> pos;
  pos.reserve(labels.size());
  for (const auto& l : labels) pos.push_back(position(l));
  return Montage(labels, std::move(pos), name_);
}

std::vector<SphericalEntry> parse_montage_fixture(std::string_view text) {
  std::vector<SphericalEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    SphericalEntry e;
    if (!(fields >> e.label)) continue;
    if (!(fields >> e.inclination_deg >> e.azimuth_deg)) {
      throw FormatError("montage fixture line " + std::to_string(line_no) +
                        ": expected 'label inclination_deg azimuth_deg'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

const std::vector<std::string>& extended_1020_inventory() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> l;
    for (const auto& e : fixture_entries()) l.push_back(e.label);
    return l;
  }();
  return labels;
}

Eigen::Vector3d spherical_to_cartesian(double inclination_deg, double azimuth_deg) {
  const auto [si, ci] = sin_cos_deg(inclination_deg);
  const auto [sa, ca] = sin_cos_deg(azimuth_deg);
  return {si * ca, si * sa, ci};
}

const std::vector<std::string>& standard_labels(MontageName name) {
  static const std::vector<std::string> cap32{
      "Fp1", "Fp2", "F7",  "F3",  "Fz",  "F4", "F8", "FC5", "FC1", "FC2", "FC6",
      "T7",  "C3",  "Cz",  "C4",  "T8",  "TP9", "CP5", "CP1", "CP2", "CP6", "TP10",
      "P7",  "P3",  "Pz",  "P4",  "P8",  "PO9", "O1",  "Oz",  "O2",  "PO10"};
  static const std::vector<std::string> cap19{"Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8",
                                               "T7",  "C3",  "Cz", "C4", "T8", "P7", "P3",
                                               "Pz",  "P4",  "P8", "O1", "O2"};
  switch (name) {
    case MontageName::Cap64: return extended_1020_inventory();
    case MontageName::Cap32: return cap32;
    case MontageName::Cap19: return cap19;
  }
  throw InvalidSpec("unknown montage");
}

Montage standard_positions(MontageName name) {
  const auto& labels = standard_labels(name);
  std::vector<Eigen::Vector3d> positions;
  positions.reserve(labels.size());
  for (const auto& label : labels) {
    const auto& entries = fixture_entries();
    const auto it = std::find_if(entries.begin(), entries.end(),
                                 [&](const SphericalEntry& e) { return e.label == label; });
    positions.push_back(spherical_to_cartesian(it->inclination_deg, it->azimuth_deg));
  }
  return Montage(labels, std::move(positions), std::string(to_string(name)));
}

Eigen::Matrix3d rotation_matrix(const RotationSpec& spec) {
  spec.validate();
  const auto [s, c] = sin_cos_deg(spec.angle_deg);
  Eigen::Matrix3d q;
  switch (spec.axis) {
    case Axis::X:
      q << 1, 0, 0,
           0, c, s,
           0, -s, c;
      break;
    case Axis::Y:
      q << c, 0, -s,
           0, 1, 0,
           s, 0, c;
      break;
    case Axis::Z:
      q << c, s, 0,
           -s, c, 0,
           0, 0, 1;
      break;
  }
  return q;
}

Montage rotate_montage(const Montage& montage, const RotationSpec& spec) {
  const Eigen::Matrix3d q = rotation_matrix(spec);
  std::vector<Eigen::Vector3d> rotated;
  rotated.reserve(montage.size());
  for (const auto& p : montage.positions()) rotated.push_back(q * p);
  return Montage(montage.labels(), std::move(rotated), montage.name());
}

std::vector<Point2D> polar_project_2d(const Montage& montage) {
  std::vector<Point2D> out;
  out.reserve(montage.size());
  for (std::size_t i = 0; i < montage.size(); ++i) {
    const Eigen::Vector3d& p = montage.positions()[i];
    const double r = std::hypot(p.x(), p.y());
    // cos(inclination) of a unit vector is its z component; values within
    // rounding of zero count as the equator.
    const double cos_incl = std::clamp(p.z(), -1.0, 1.0);
    if (cos_incl <= 1e-12) {
      throw DomainError("electrode '" + montage.labels()[i] +
                        "' lies at or below the equatorial plane and cannot be projected");
    }
    const double azimuth = std::atan2(p.y(), p.x());
    const double r2 = r / std::pow(cos_incl, 0.2);
    out.push_back({r2 * std::cos(azimuth) * 60.0, r2 * std::sin(azimuth) * 60.0});
  }
  return out;
}

const std::optional<std::string>& Grid2D::cell(std::size_t row, std::size_t col) const {
  if (row >= kRows || col >= kCols) throw std::out_of_range("grid cell out of range");
  return cells_[row * kCols + col];
}

void Grid2D::set(std::size_t row, std::size_t col, std::optional<std::string> label) {
  if (row >= kRows || col >= kCols) throw std::out_of_range("grid cell out of range");
  cells_[row * kCols + col] = std::move(label);
}

std::size_t Grid2D::occupied() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); }));
}

Grid2D parse_grid_fixture(std::string_view text) {
  Grid2D grid;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t row = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> cells;
    for (std::string t; tokens >> t;) cells.push_back(t);
    if (cells.empty()) continue;
    if (row >= Grid2D::kRows || cells.size() != Grid2D::kCols) {
      throw FormatError("grid fixture must have 7 rows of 9 tokens (row " + std::to_string(row) +
                        " has " + std::to_string(cells.size()) + ")");
    }
    for (std::size_t col = 0; col < cells.size(); ++col) {
      if (cells[col] == "-") continue;
      if (!seen.insert(cells[col]).second) {
        throw FormatError("grid fixture repeats label '" + cells[col] + "'");
      }
      grid.set(row, col, cells[col]);
    }
    ++row;
  }
  if (row != Grid2D::kRows) throw FormatError("grid fixture has " + std::to_string(row) + " rows");
  return grid;
}

Grid2D grid_map(const Montage& montage) {
  static const Grid2D full = parse_grid_fixture(fixtures::kGrid7x9);
  Grid2D out;
  for (std::size_t r = 0; r < Grid2D::kRows; ++r) {
    for (std::size_t c = 0; c < Grid2D::kCols; ++c) {
      const auto& label = full.cell(r, c);
      if (label && montage.index_of(*label)) out.set(r, c, label);
    }
  }
  return out;
}

}  // namespace erpaug
