#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "erpaug/epochs.hpp"
#include "erpaug/pipeline.hpp"
#include "erpaug/synth.hpp"

namespace erpaug {

// Session directory layout.
inline constexpr std::string_view kHeaderFile = "header.json";
inline constexpr std::string_view kDataFile = "data.f32";
inline constexpr std::string_view kMarkersFile = "markers.csv";

// Header, little-endian float32 frames (channels fastest) and markers, each
// written to a temporary file and renamed into place. Rejects non-finite
// samples and out-of-range markers before anything is written.
void write_session(const std::filesystem::path& dir, const Session& session);
// Errors name the offending file (and line for markers): MissingFile,
// SizeMismatch, UnknownLabel, FormatError.
Session read_session(const std::filesystem::path& dir);

PipelineConfig parse_config(std::string_view json_text, std::string_view source = "config");
std::string config_to_json(const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);
// Built-in "p300" or "mrcp".
PipelineConfig preset_config(std::string_view name);

SessionSpec parse_session_spec(std::string_view json_text, std::string_view source = "session spec");
std::string session_spec_to_json(const SessionSpec& spec);
SessionSpec load_session_spec(const std::filesystem::path& path);

struct ResultRow {
  std::string experiment;
  std::string condition;
  std::string axis;  // "-" when no rotation is involved
  double angle_deg = 0.0;
  std::string kernel;
  double time_shift_ms = 0.0;
  double train_fraction = 1.0;
  std::size_t n_filters = 0;
  std::uint64_t seed = 0;
  double balanced_accuracy = 0.0;
  double wall_ms = 0.0;
};

std::string csv_header();
std::string format_csv_row(const ResultRow& row);
// Appends rows, writing the header first if the file is new or empty.
void append_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

struct Comparison {
  std::string condition_a;
  std::string condition_b;
};

struct ComparisonPlan {
  std::vector<Comparison> comparisons;
  std::size_t n_permutations = 10000;
  std::uint64_t seed = 0;
};

// {"n_permutations": N, "seed": S, "comparisons": [["a", "b"], ...]}.
// Self-comparisons are rejected.
ComparisonPlan parse_comparisons(std::string_view json_text, std::string_view source = "comparisons");
ComparisonPlan load_comparisons(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
// Temporary file plus rename.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace erpaug
