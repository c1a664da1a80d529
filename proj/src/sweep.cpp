#include "erpaug/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "erpaug/error.hpp"
#include "erpaug/svg.hpp"

namespace erpaug {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<SweepFamily, std::string_view> kFamilies[] = {
    {SweepFamily::CapShift, "cap_shift"},
    {SweepFamily::AxisAngle, "axis_angle"},
    {SweepFamily::Kernels, "kernels"},
    {SweepFamily::MontageSize, "montage_size"},
    {SweepFamily::NFilters, "n_filters"},
    {SweepFamily::TrainFraction, "train_fraction"},
    {SweepFamily::TimeShift, "time_shift"},
    {SweepFamily::TimeShiftCombined, "time_shift_combined"},
};

std::vector<double> range(double start, double stop, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(start + step * static_cast<double>(k));
  return out;
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& given, const std::vector<T>& fallback) {
  return given.empty() ? fallback : given;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Everything that determines a preprocessed training or test set.
struct PrepKey {
  std::size_t pair = 0;
  bool train = true;
  double initial_shift_ms = 0.0;
  std::vector<double> offsets_ms;
  double train_fraction = 1.0;
  int montage = -1;

  auto tie() const { return std::tie(pair, train, initial_shift_ms, offsets_ms, train_fraction, montage); }
  bool operator<(const PrepKey& o) const { return tie() < o.tie(); }
};

RunOptions cell_options(const SweepCell& cell, std::uint64_t seed) {
  RunOptions o;
  o.seed = seed;
  o.train_fraction = cell.train_fraction;
  o.initial_shift_ms = cell.initial_shift_ms;
  if (!cell.shift_offsets_ms.empty()) o.time_shift = TimeShiftPlan{cell.shift_offsets_ms};
  if (cell.montage) o.channel_subset = standard_labels(*cell.montage);
  if (cell.axis && cell.angle_deg != 0.0) {
    if (cell.condition == "replace") {
      o.augmentation.replacement = CapReplacement{*cell.axis, cell.angle_deg, cell.kernel};
    } else {
      RotationAugmentPlan plan;
      plan.axes = {*cell.axis};
      plan.angle_deg = cell.angle_deg;
      plan.kernel = cell.kernel;
      o.augmentation.rotations.push_back(plan);
    }
  }
  return o;
}

PrepKey train_key(const SweepCell& cell, const RunOptions& o) {
  PrepKey k;
  k.pair = cell.pair;
  k.initial_shift_ms = o.initial_shift_ms;
  if (o.time_shift) k.offsets_ms = o.time_shift->offsets_ms;
  k.train_fraction = o.train_fraction;
  k.montage = cell.montage ? static_cast<int>(*cell.montage) : -1;
  return k;
}

PrepKey test_key(const SweepCell& cell) {
  PrepKey k;
  k.pair = cell.pair;
  k.train = false;
  k.montage = cell.montage ? static_cast<int>(*cell.montage) : -1;
  return k;
}

PipelineConfig sweep_config(const SweepGrid& grid) {
  PipelineConfig config = preset_config(grid.preset);
  if (grid.n_filters_override) config.n_spatial_filters = *grid.n_filters_override;
  return config;
}

}  // namespace

std::string_view to_string(SweepFamily family) {
  for (auto [f, name] : kFamilies) {
    if (f == family) return name;
  }
  return "unknown";
}

SweepFamily parse_family(std::string_view text) {
  for (auto [f, name] : kFamilies) {
    if (name == text) return f;
  }
  throw InvalidSpec("unknown sweep family '" + std::string(text) + "'");
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SweepGrid parse_grid(std::string_view json_text, const fs::path& base_dir, std::string_view source) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(source) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw InvalidSpec(std::string(source) + " must be an object");
  SweepGrid g;
  const std::string ctx(source);
  auto fail = [&](const std::string& key, const std::string& what) -> void {
    throw InvalidSpec(ctx + ": field '" + key + "' " + what);
  };
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const json& v = it.value();
      if (key == "preset") {
        g.preset = v.get<std::string>();
      } else if (key == "axes") {
        for (const auto& a : v) g.axes.push_back(parse_axis(a.get<std::string>()));
      } else if (key == "angles_deg") {
        if (v.is_object()) {
          g.angles_deg = range(v.at("start").get<double>(), v.at("stop").get<double>(), v.at("step").get<double>());
        } else {
          g.angles_deg = v.get<std::vector<double>>();
        }
      } else if (key == "kernels") {
        for (const auto& k : v) g.kernels.push_back(parse_kernel(k.get<std::string>()));
      } else if (key == "montages") {
        for (const auto& m : v) g.montages.push_back(parse_montage_name(m.get<std::string>()));
      } else if (key == "n_filters") {
        g.n_filters = v.get<std::vector<std::size_t>>();
      } else if (key == "train_fractions") {
        g.train_fractions = v.get<std::vector<double>>();
      } else if (key == "time_shifts_ms") {
        g.time_shifts_ms = v.get<std::vector<double>>();
      } else if (key == "initial_shifts_ms") {
        g.initial_shifts_ms = v.get<std::vector<double>>();
      } else if (key == "augment_axis") {
        g.augment_axis = parse_axis(v.get<std::string>());
      } else if (key == "augment_angle_deg") {
        g.augment_angle_deg = v.get<double>();
      } else if (key == "kernel") {
        g.kernel.kind = parse_kernel(v.get<std::string>());
      } else if (key == "sessions") {
        for (const auto& s : v) {
          SweepGrid::SessionRef ref;
          ref.train = base_dir / s.at("train").get<std::string>();
          ref.test = base_dir / s.at("test").get<std::string>();
          ref.seed = s.value("seed", std::uint64_t{g.sessions.size()});
          g.sessions.push_back(std::move(ref));
        }
      } else {
        fail(key, "is not recognised");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidSpec(ctx + ": " + e.what());
  } catch (const InvalidSpec&) {
    throw;
  } catch (const Error& e) {
    throw InvalidSpec(ctx + ": " + e.what());
  }
  return g;
}

SweepGrid load_grid(const fs::path& path) {
  return parse_grid(read_text_file(path), path.parent_path(), path.string());
}

std::vector<SessionPair> load_sessions(const SweepGrid& grid) {
  if (grid.sessions.empty()) throw MissingFile("sweep grid lists no sessions");
  std::vector<SessionPair> pairs;
  for (const auto& ref : grid.sessions) pairs.push_back({read_session(ref.train), read_session(ref.test), ref.seed});
  return pairs;
}

std::vector<SweepCell> expand_grid(SweepFamily family, const SweepGrid& grid, std::size_t n_pairs,
                                   const PipelineConfig& config) {
  const std::vector<double> full_angles = range(0, 30, 2);
  const std::vector<double> cap_angles = range(-10, 10, 2);
  const std::vector<double> on_off = {0.0, grid.augment_angle_deg};
  const double fraction = grid.train_fraction_override.value_or(1.0);

  std::vector<SweepCell> per_pair;
  auto base = [&] {
    SweepCell c;
    c.kernel = grid.kernel;
    c.n_filters = config.n_spatial_filters;
    c.train_fraction = fraction;
    return c;
  };
  auto rotated = [&](SweepCell c, Axis axis, double angle, const char* active) {
    c.axis = axis;
    c.angle_deg = angle;
    c.condition = angle == 0.0 ? "baseline" : active;
    return c;
  };

  switch (family) {
    case SweepFamily::CapShift:
      for (Axis a : or_default(grid.axes, {Axis::Z})) {
        for (double ang : or_default(grid.angles_deg, cap_angles)) per_pair.push_back(rotated(base(), a, ang, "replace"));
      }
      break;
    case SweepFamily::AxisAngle:
      for (Axis a : or_default(grid.axes, {Axis::X, Axis::Y, Axis::Z})) {
        for (double ang : or_default(grid.angles_deg, full_angles)) per_pair.push_back(rotated(base(), a, ang, "augment"));
      }
      break;
    case SweepFamily::Kernels:
      for (KernelKind k : or_default(grid.kernels, {KernelKind::Linear, KernelKind::Cubic, KernelKind::Quintic,
                                                    KernelKind::Multiquadric, KernelKind::Gaussian})) {
        for (double ang : or_default(grid.angles_deg, full_angles)) {
          SweepCell c = rotated(base(), grid.augment_axis, ang, "augment");
          c.kernel.kind = k;
          per_pair.push_back(c);
        }
      }
      break;
    case SweepFamily::MontageSize:
      for (MontageName m : or_default(grid.montages, {MontageName::Cap64, MontageName::Cap32, MontageName::Cap19})) {
        for (double ang : or_default(grid.angles_deg, on_off)) {
          SweepCell c = rotated(base(), grid.augment_axis, ang, "augment");
          c.montage = m;
          c.n_filters = std::min(c.n_filters, standard_labels(m).size());
          c.condition = std::string(to_string(m)) + "/" + c.condition;
          per_pair.push_back(c);
        }
      }
      break;
    case SweepFamily::NFilters:
      for (std::size_t k : or_default(grid.n_filters, {std::size_t{16}, std::size_t{32}, std::size_t{64}})) {
        for (double ang : or_default(grid.angles_deg, on_off)) {
          SweepCell c = rotated(base(), grid.augment_axis, ang, "augment");
          c.n_filters = k;
          per_pair.push_back(c);
        }
      }
      break;
    case SweepFamily::TrainFraction:
      for (double f : or_default(grid.train_fractions, {0.1, 0.25, 0.5, 0.75, 1.0})) {
        for (double ang : or_default(grid.angles_deg, on_off)) {
          SweepCell c = rotated(base(), grid.augment_axis, ang, "augment");
          c.train_fraction = f;
          per_pair.push_back(c);
        }
      }
      break;
    case SweepFamily::TimeShift:
      for (double s : or_default(grid.time_shifts_ms, {0.0, 20.0, 40.0, 60.0, 80.0, 100.0})) {
        SweepCell c = base();
        c.time_shift_ms = s;
        if (s != 0.0) c.shift_offsets_ms = {s, -s};
        c.condition = s == 0.0 ? "baseline" : "shift";
        per_pair.push_back(c);
      }
      break;
    case SweepFamily::TimeShiftCombined: {
      const std::vector<double> shifts = {-100.0, -50.0, 0.0, 50.0, 100.0};
      const auto rows = or_default(grid.initial_shifts_ms, shifts);
      const auto cols = or_default(grid.time_shifts_ms, rows);
      for (double i : rows) {
        for (double j : cols) {
          SweepCell c = base();
          c.initial_shift_ms = i;
          c.time_shift_ms = j;
          if (j != i) c.shift_offsets_ms = {j - i};
          c.condition = "initial=" + fmt(i);
          per_pair.push_back(c);
        }
      }
      break;
    }
  }

  std::vector<SweepCell> cells;
  cells.reserve(per_pair.size() * n_pairs);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    for (SweepCell c : per_pair) {
      c.pair = p;
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<ResultRow> run_sweep(SweepFamily family, const SweepGrid& grid, const std::vector<SessionPair>& pairs,
                                 const SweepOptions& options) {
  if (pairs.empty()) throw MissingFile("sweep needs at least one session pair");
  const PipelineConfig config = sweep_config(grid);
  const std::vector<SweepCell> cells = expand_grid(family, grid, pairs.size(), config);

  // Validate everything up front, then collect the distinct preprocessing jobs.
  std::map<PrepKey, std::size_t> prep_index;
  std::vector<PrepKey> prep_keys;
  std::vector<std::pair<std::size_t, std::size_t>> cell_prep(cells.size());
  std::vector<RunOptions> cell_opts;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const RunOptions o = cell_options(cells[i], pairs[cells[i].pair].seed);
    validate_options(o, config);
    PipelineConfig c = config;
    c.n_spatial_filters = cells[i].n_filters;
    c.validate(pairs[cells[i].pair].train.recording.sampling_rate_hz);
    for (const PrepKey& k : {train_key(cells[i], o), test_key(cells[i])}) {
      if (prep_index.emplace(k, prep_keys.size()).second) prep_keys.push_back(k);
    }
    cell_prep[i] = {prep_index.at(train_key(cells[i], o)), prep_index.at(test_key(cells[i]))};
    cell_opts.push_back(o);
  }

  std::vector<EpochSet> prepared(prep_keys.size());
  parallel_for(prep_keys.size(), options.jobs, [&](std::size_t k) {
    const PrepKey& key = prep_keys[k];
    const SessionPair& pair = pairs[key.pair];
    PipelineConfig c = config;
    c.seed = pair.seed;
    SegmentResult seg;
    if (key.train) {
      RunOptions o;
      o.seed = pair.seed;
      o.initial_shift_ms = key.initial_shift_ms;
      o.train_fraction = key.train_fraction;
      if (!key.offsets_ms.empty()) o.time_shift = TimeShiftPlan{key.offsets_ms};
      if (key.montage >= 0) o.channel_subset = standard_labels(static_cast<MontageName>(key.montage));
      seg = segment_training(pair.train, c, o);
    } else {
      seg = segment_test(pair.test, c);
      if (key.montage >= 0) {
        seg.epochs = select_channels(seg.epochs, standard_labels(static_cast<MontageName>(key.montage)));
      }
    }
    prepared[k] = preprocess(seg.epochs, c).epochs;
  });

  std::vector<ResultRow> rows(cells.size());
  parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
    const SweepCell& cell = cells[i];
    const auto t0 = std::chrono::steady_clock::now();
    PipelineConfig c = config;
    c.n_spatial_filters = cell.n_filters;
    c.seed = pairs[cell.pair].seed;
    const PipelineResult r =
        fit_and_evaluate(prepared[cell_prep[i].first], prepared[cell_prep[i].second], c, cell_opts[i].augmentation);
    ResultRow& row = rows[i];
    row.experiment = std::string(to_string(family));
    row.condition = cell.condition;
    const bool spatial = cell.axis && cell.angle_deg != 0.0;
    row.axis = cell.axis ? std::string(to_string(*cell.axis)) : "-";
    row.angle_deg = cell.angle_deg;
    row.kernel = spatial ? std::string(to_string(cell.kernel.kind)) : "-";
    row.time_shift_ms = cell.time_shift_ms;
    row.train_fraction = cell.train_fraction;
    row.n_filters = cell.n_filters;
    row.seed = pairs[cell.pair].seed;
    row.balanced_accuracy = r.balanced_accuracy;
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  return rows;
}

std::string sweep_svg(SweepFamily family, const std::vector<ResultRow>& rows) {
  const std::string title = std::string(to_string(family)) + ": mean balanced accuracy";
  if (family == SweepFamily::TimeShiftCombined) {
    std::vector<std::string> row_labels, col_labels;
    std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
    std::vector<double> cols;
    for (const auto& r : rows) {
      if (std::find(row_labels.begin(), row_labels.end(), r.condition) == row_labels.end()) {
        row_labels.push_back(r.condition);
      }
      if (std::find(cols.begin(), cols.end(), r.time_shift_ms) == cols.end()) cols.push_back(r.time_shift_ms);
      auto& a = acc[{r.condition, r.time_shift_ms}];
      a.first += r.balanced_accuracy;
      a.second += 1;
    }
    std::vector<std::vector<double>> values;
    for (const auto& rl : row_labels) {
      std::vector<double> line;
      for (double c : cols) {
        auto it = acc.find({rl, c});
        line.push_back(it == acc.end() ? std::nan("") : it->second.first / it->second.second);
      }
      values.push_back(std::move(line));
    }
    for (double c : cols) col_labels.push_back(fmt(c) + " ms");
    return svg_heat_map(title + " (rows: initial shift, cols: augmented shift)", row_labels, col_labels, values);
  }

  auto x_of = [&](const ResultRow& r) {
    switch (family) {
      case SweepFamily::NFilters: return static_cast<double>(r.n_filters);
      case SweepFamily::TrainFraction: return r.train_fraction;
      case SweepFamily::TimeShift: return r.time_shift_ms;
      default: return r.angle_deg;
    }
  };
  auto series_of = [&](const ResultRow& r) -> std::string {
    switch (family) {
      case SweepFamily::AxisAngle:
      case SweepFamily::CapShift: return "axis " + r.axis;
      case SweepFamily::Kernels: return r.angle_deg == 0.0 ? std::string("baseline") : r.kernel;
      case SweepFamily::MontageSize: return r.condition.substr(0, r.condition.find('/'));
      case SweepFamily::TimeShift: return "time shift";
      default: return r.angle_deg == 0.0 ? std::string("baseline") : "augment " + fmt(r.angle_deg);
    }
  };
  const char* x_label = family == SweepFamily::NFilters        ? "spatial filters"
                        : family == SweepFamily::TrainFraction ? "training fraction"
                        : family == SweepFamily::TimeShift     ? "augmented shift (ms)"
                                                               : "angle (deg)";
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    const std::string s = series_of(r);
    if (!acc.count(s)) order.push_back(s);
    auto& a = acc[s][x_of(r)];
    a.first += r.balanced_accuracy;
    a.second += 1;
  }
  std::vector<Series> series;
  for (const auto& name : order) {
    Series s{name, {}};
    for (const auto& [x, a] : acc[name]) s.points.emplace_back(x, a.first / a.second);
    series.push_back(std::move(s));
  }
  return svg_line_chart(title, x_label, "balanced accuracy", std::move(series));
}

}  // namespace erpaug
