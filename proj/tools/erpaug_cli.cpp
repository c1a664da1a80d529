// erpaug: synthesise sessions, run the ERP pipeline, sweep experiment
// families and test the results.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "erpaug/error.hpp"
#include "erpaug/io.hpp"
#include "erpaug/pipeline.hpp"
#include "erpaug/stats.hpp"
#include "erpaug/sweep.hpp"
#include "erpaug/synth.hpp"

namespace fs = std::filesystem;
using namespace erpaug;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidSpec(what + ": '" + s + "' is not a number");
  return v;
}

// "z:18,x:18" -> one plan per distinct angle, axes grouped.
std::vector<RotationAugmentPlan> parse_rotations(const std::string& text, const Kernel& kernel) {
  std::vector<RotationAugmentPlan> plans;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw InvalidSpec("--augment-rotation expects AXIS:ANGLE, got '" + item + "'");
    const Axis axis = parse_axis(item.substr(0, colon));
    const double angle = parse_number(item.substr(colon + 1), "--augment-rotation angle");
    auto it = std::find_if(plans.begin(), plans.end(), [&](const auto& p) { return p.angle_deg == angle; });
    if (it == plans.end()) {
      RotationAugmentPlan p;
      p.angle_deg = angle;
      p.kernel = kernel;
      plans.push_back(p);
      it = plans.end() - 1;
    }
    it->axes.push_back(axis);
  }
  return plans;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    try {
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dots));
        const auto hi = std::stoull(item.substr(dots + 2));
        if (hi < lo) throw InvalidSpec("seed range '" + item + "' is empty");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw InvalidSpec("--seeds: cannot parse '" + item + "'");
    }
  }
  if (seeds.empty()) throw InvalidSpec("--seeds must list at least one seed");
  return seeds;
}

// Condition selector for stats: "name" or "name@key=value@key=value".
struct Selector {
  std::string condition;
  std::map<std::string, std::string> filters;
};

Selector parse_selector(const std::string& text) {
  auto parts = split(text, '@');
  if (parts.empty()) throw InvalidSpec("empty condition selector");
  Selector s{parts[0], {}};
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw InvalidSpec("selector filter '" + parts[i] + "' needs key=value");
    s.filters[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  return s;
}

bool matches(const Selector& sel, const ResultRow& r) {
  if (r.condition != sel.condition) return false;
  for (const auto& [key, value] : sel.filters) {
    auto num_eq = [&](double v) { return std::abs(v - parse_number(value, key)) < 1e-9; };
    bool ok = false;
    if (key == "experiment") ok = r.experiment == value;
    else if (key == "axis") ok = r.axis == value;
    else if (key == "kernel") ok = r.kernel == value;
    else if (key == "angle_deg") ok = num_eq(r.angle_deg);
    else if (key == "time_shift_ms") ok = num_eq(r.time_shift_ms);
    else if (key == "train_fraction") ok = num_eq(r.train_fraction);
    else if (key == "n_filters") ok = num_eq(static_cast<double>(r.n_filters));
    else throw InvalidSpec("unknown selector key '" + key + "'");
    if (!ok) return false;
  }
  return true;
}

// Mean balanced accuracy per seed for the rows a selector picks.
std::map<std::uint64_t, double> per_seed(const std::vector<ResultRow>& rows, const std::string& text) {
  const Selector sel = parse_selector(text);
  std::map<std::uint64_t, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (!matches(sel, r)) continue;
    acc[r.seed].first += r.balanced_accuracy;
    acc[r.seed].second += 1;
  }
  std::map<std::uint64_t, double> out;
  for (const auto& [seed, a] : acc) out[seed] = a.first / a.second;
  return out;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, const std::string& seeds_text) {
  const SessionSpec base = load_session_spec(spec_path);
  for (std::uint64_t seed : parse_seeds(seeds_text)) {
    SessionSpec spec = base;
    spec.seed = seed;
    const fs::path dir = fs::path(out_dir) / ("seed_" + std::to_string(seed));
    write_session(dir, generate_session(spec));
    std::cout << dir.string() << "\n";
  }
  return 0;
}

struct RunFlags {
  std::string train, test, preset = "p300", config, rotation, replace, shift, kernel = "cubic", out;
  std::size_t n_filters = 0;
  double train_fraction = 1.0;
  double initial_shift = 0.0;
  std::uint64_t seed = 0;
  bool augment_test = false;
};

int cmd_run(const RunFlags& f) {
  PipelineConfig config = f.config.empty() ? preset_config(f.preset) : load_config(f.config);
  if (f.n_filters) config.n_spatial_filters = f.n_filters;
  config.seed = f.seed;
  const Kernel kernel{parse_kernel(f.kernel)};

  RunOptions options;
  options.seed = f.seed;
  options.train_fraction = f.train_fraction;
  options.initial_shift_ms = f.initial_shift;
  options.augment_test = f.augment_test;
  if (!f.rotation.empty()) options.augmentation.rotations = parse_rotations(f.rotation, kernel);
  if (!f.replace.empty()) {
    const auto plans = parse_rotations(f.replace, kernel);
    if (plans.size() != 1 || plans[0].axes.size() != 1) throw InvalidSpec("--replace-rotation takes one AXIS:ANGLE");
    options.augmentation.replacement = CapReplacement{plans[0].axes[0], plans[0].angle_deg, kernel};
  }
  if (!f.shift.empty()) {
    TimeShiftPlan plan;
    for (const auto& s : split(f.shift, ',')) plan.offsets_ms.push_back(parse_number(s, "--augment-shift"));
    options.time_shift = plan;
  }
  // Reject bad flag combinations before reading any data.
  validate_options(options, config);
  config.validate();

  const Session train = read_session(f.train);
  const Session test = read_session(f.test);
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineResult r = run_session_pipeline(train, test, config, options);
  const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  std::printf("balanced_accuracy %.4f\n", r.balanced_accuracy);
  if (!f.out.empty()) {
    ResultRow row;
    row.experiment = "run";
    row.condition = options.augmentation.active() || options.time_shift ? "augment" : "baseline";
    const auto& rot = options.augmentation;
    if (rot.replacement) {
      row.condition = "replace";
      row.axis = std::string(to_string(rot.replacement->axis));
      row.angle_deg = rot.replacement->angle_deg;
    } else if (!rot.rotations.empty()) {
      std::string axes;
      for (Axis a : rot.rotations[0].axes) axes += to_string(a);
      row.axis = axes;
      row.angle_deg = rot.rotations[0].angle_deg;
    } else {
      row.axis = "-";
    }
    row.kernel = rot.active() ? f.kernel : "-";
    row.time_shift_ms = options.time_shift && !options.time_shift->offsets_ms.empty()
                            ? std::abs(options.time_shift->offsets_ms[0])
                            : 0.0;
    row.train_fraction = f.train_fraction;
    row.n_filters = config.n_spatial_filters;
    row.seed = f.seed;
    row.balanced_accuracy = r.balanced_accuracy;
    row.wall_ms = wall;
    append_csv(f.out, {row});
  }
  return 0;
}

struct SweepFlags {
  std::string family, grid, out, svg, kernel;
  std::size_t n_filters = 0;
  double train_fraction = 0.0;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

int cmd_sweep(const SweepFlags& f) {
  const SweepFamily family = parse_family(f.family);
  SweepGrid grid = load_grid(f.grid);
  if (!f.kernel.empty()) grid.kernel.kind = parse_kernel(f.kernel);
  if (f.n_filters) grid.n_filters_override = f.n_filters;
  if (f.train_fraction > 0.0) grid.train_fraction_override = f.train_fraction;
  std::vector<SessionPair> pairs = load_sessions(grid);
  for (auto& p : pairs) p.seed += f.seed;
  const auto rows = run_sweep(family, grid, pairs, {f.jobs});
  append_csv(f.out, rows);
  if (!f.svg.empty()) write_text_file_atomic(f.svg, sweep_svg(family, rows));
  std::cout << rows.size() << " cells written to " << f.out << "\n";
  return 0;
}

int cmd_stats(const std::string& in, const std::string& comparisons, const std::string& out) {
  const auto rows = read_csv(in);
  const ComparisonPlan plan = load_comparisons(comparisons);
  struct Outcome {
    std::string a, b;
    std::size_t n;
    double mean_diff, p;
  };
  std::vector<Outcome> outcomes;
  for (const auto& c : plan.comparisons) {
    const auto va = per_seed(rows, c.condition_a);
    const auto vb = per_seed(rows, c.condition_b);
    PairedSample s{c.condition_a, c.condition_b, {}, {}};
    for (const auto& [seed, v] : va) {
      auto it = vb.find(seed);
      if (it == vb.end()) continue;
      s.values_a.push_back(v);
      s.values_b.push_back(it->second);
    }
    if (s.values_a.size() < 2) {
      throw TooFewSamples("comparison '" + c.condition_a + "' vs '" + c.condition_b + "' has " +
                          std::to_string(s.values_a.size()) + " paired seeds");
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < s.values_a.size(); ++i) diff += s.values_a[i] - s.values_b[i];
    diff /= static_cast<double>(s.values_a.size());
    outcomes.push_back({c.condition_a, c.condition_b, s.values_a.size(), diff,
                        paired_permutation_test(s, plan.n_permutations, plan.seed)});
  }
  std::vector<double> p;
  for (const auto& o : outcomes) p.push_back(o.p);
  const auto adjusted = holm_correction(p);
  std::string text = "condition_a,condition_b,n,mean_difference,p_value,p_holm\n";
  char buf[256];
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6g,%.6g\n", outcomes[i].n, outcomes[i].mean_diff, outcomes[i].p,
                  adjusted[i]);
    text += outcomes[i].a + "," + outcomes[i].b + "," + buf;
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file_atomic(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotational and temporal data augmentation for ERP classification"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, seeds = "0";
  auto* synth = app.add_subcommand("synth", "Generate synthetic sessions, one directory per seed");
  synth->add_option("--spec", spec_path, "Session spec (JSON)")->required();
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--seeds", seeds, "Seeds, e.g. 1..3 or 1,4,9");

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Train on one session, report balanced accuracy on another");
  run->add_option("--train", rf.train, "Training session directory")->required();
  run->add_option("--test", rf.test, "Test session directory")->required();
  run->add_option("--preset", rf.preset, "p300 or mrcp")->check(CLI::IsMember({"p300", "mrcp"}));
  run->add_option("--config", rf.config, "Pipeline config file (JSON), overrides --preset");
  run->add_option("--augment-rotation", rf.rotation, "AXIS:ANGLE[,AXIS:ANGLE] (+-ANGLE copies)");
  run->add_option("--replace-rotation", rf.replace, "AXIS:ANGLE, replace training epochs by the rotated cap");
  run->add_option("--augment-shift", rf.shift, "MS[,MS] extra training cuts");
  run->add_option("--initial-shift", rf.initial_shift, "Training segmentation offset in ms");
  run->add_flag("--augment-test", rf.augment_test, "Augment the test side too (always rejected)");
  run->add_option("--kernel", rf.kernel, "linear, cubic, quintic, multiquadric or gaussian");
  run->add_option("--n-filters", rf.n_filters, "Spatial filters");
  run->add_option("--train-fraction", rf.train_fraction, "Fraction of training markers to keep");
  run->add_option("--seed", rf.seed, "Seed");
  run->add_option("--out", rf.out, "Append a CSV row here");

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "Full factorial sweep of one experiment family");
  sweep->add_option("--family", sf.family, "cap_shift, axis_angle, kernels, montage_size, n_filters, "
                                           "train_fraction, time_shift or time_shift_combined")
      ->required();
  sweep->add_option("--grid", sf.grid, "Grid file (JSON)")->required();
  sweep->add_option("--out", sf.out, "CSV output (appended)")->required();
  sweep->add_option("--svg", sf.svg, "Optional chart");
  sweep->add_option("--kernel", sf.kernel, "Kernel for families that do not sweep it");
  sweep->add_option("--n-filters", sf.n_filters, "Spatial filters");
  sweep->add_option("--train-fraction", sf.train_fraction, "Fraction of training markers to keep");
  sweep->add_option("--seed", sf.seed, "Offset added to every session seed");
  sweep->add_option("--jobs", sf.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string stats_in, stats_cmp, stats_out;
  auto* stats = app.add_subcommand("stats", "Paired permutation tests with Holm correction");
  stats->add_option("--in", stats_in, "Sweep CSV")->required();
  stats->add_option("--comparisons", stats_cmp, "Comparisons file (JSON)")->required();
  stats->add_option("--out", stats_out, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(spec_path, out_dir, seeds);
    if (*run) return cmd_run(rf);
    if (*sweep) return cmd_sweep(sf);
    if (*stats) return cmd_stats(stats_in, stats_cmp, stats_out);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
