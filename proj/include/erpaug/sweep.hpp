#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "erpaug/io.hpp"
#include "erpaug/pipeline.hpp"

namespace erpaug {

enum class SweepFamily {
  CapShift,
  AxisAngle,
  Kernels,
  MontageSize,
  NFilters,
  TrainFraction,
  TimeShift,
  TimeShiftCombined,
};

std::string_view to_string(SweepFamily family);
SweepFamily parse_family(std::string_view text);

struct SessionPair {
  Session train;
  Session test;
  std::uint64_t seed = 0;
};

// Axes of the sweep. Empty lists fall back to the family defaults.
struct SweepGrid {
  std::string preset = "p300";
  std::vector<Axis> axes;
  std::vector<double> angles_deg;
  std::vector<KernelKind> kernels;
  std::vector<MontageName> montages;
  std::vector<std::size_t> n_filters;
  std::vector<double> train_fractions;
  std::vector<double> time_shifts_ms;
  std::vector<double> initial_shifts_ms;
  // Fixed augmentation used by families that do not sweep the angle itself.
  Axis augment_axis = Axis::Z;
  double augment_angle_deg = 18.0;
  Kernel kernel{KernelKind::Cubic};
  std::optional<std::size_t> n_filters_override;
  std::optional<double> train_fraction_override;
  // Session directories (train, test, seed) listed by a grid file.
  struct SessionRef {
    std::filesystem::path train;
    std::filesystem::path test;
    std::uint64_t seed = 0;
  };
  std::vector<SessionRef> sessions;
};

// Paths inside the file are resolved relative to the file's directory.
SweepGrid parse_grid(std::string_view json_text, const std::filesystem::path& base_dir,
                     std::string_view source = "grid");
SweepGrid load_grid(const std::filesystem::path& path);
std::vector<SessionPair> load_sessions(const SweepGrid& grid);

// One point of the factorial design, bound to one session pair.
struct SweepCell {
  std::size_t pair = 0;
  std::string condition;
  std::optional<Axis> axis;
  double angle_deg = 0.0;
  Kernel kernel{KernelKind::Cubic};
  std::optional<MontageName> montage;
  std::size_t n_filters = 0;
  double train_fraction = 1.0;
  double initial_shift_ms = 0.0;
  // Reported shift; the extra training cuts are `shift_offsets_ms`, relative
  // to the initial shift.
  double time_shift_ms = 0.0;
  std::vector<double> shift_offsets_ms;
};

// Family defaults applied, cells ordered pair-major then by the family's
// factors in grid order.
std::vector<SweepCell> expand_grid(SweepFamily family, const SweepGrid& grid, std::size_t n_pairs,
                                   const PipelineConfig& config);

struct SweepOptions {
  std::size_t jobs = 1;
};

// Runs every cell in a bounded pool of worker threads. Preprocessed epochs are
// computed once per distinct segmentation and shared by the cells that need
// them. Rows come back in cell order whatever the completion order.
std::vector<ResultRow> run_sweep(SweepFamily family, const SweepGrid& grid, const std::vector<SessionPair>& pairs,
                                 const SweepOptions& options);

// Calls fn(i) for i in [0, n) on up to `jobs` threads; the first exception by
// index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Line chart (or heat map for the combined time-shift family) of mean
// balanced accuracy over seeds.
std::string sweep_svg(SweepFamily family, const std::vector<ResultRow>& rows);

}  // namespace erpaug
