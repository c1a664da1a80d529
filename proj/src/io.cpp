#include "erpaug/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <type_traits>
#include <sstream>

#include <json.hpp>

#include "erpaug/error.hpp"
#include "erpaug/fixtures_generated.hpp"

namespace erpaug {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads a JSON object field by field and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw InvalidSpec(context_ + (key.empty() ? "" : ": field '" + key + "'") + " " + what);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return;
    if constexpr (std::is_unsigned_v<T>) {
      if (v->is_number_integer() && !v->is_number_unsigned()) fail(key, "must not be negative");
    }
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  ObjectReader child(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return ObjectReader(v ? *v : empty, context_ + ": " + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "is not recognised");
    }
  }

  const std::string& context() const { return context_; }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(source) + ": invalid JSON: " + e.what());
  }
}

std::pair<double, double> read_pair(ObjectReader& r, const std::string& key, std::pair<double, double> fallback) {
  const json* v = r.find(key);
  if (!v) return fallback;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
    r.fail(key, "must be a two-element numeric array");
  }
  return {(*v)[0].get<double>(), (*v)[1].get<double>()};
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFU) << 24) | ((v & 0xFF00U) << 8) | ((v >> 8) & 0xFF00U) | (v >> 24);
  }
  return v;
}

void write_bytes_atomic(const fs::path& path, const char* data, std::size_t size) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(data, static_cast<std::streamsize>(size));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string format_number(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const fs::path& path, std::string_view text) {
  write_bytes_atomic(path, text.data(), text.size());
}

void write_session(const fs::path& dir, const Session& session) {
  const auto& rec = session.recording;
  const std::size_t channels = rec.channels();
  const std::size_t samples = rec.samples();
  if (channels != session.montage.size()) {
    throw ShapeMismatch("recording has " + std::to_string(channels) + " channels, montage has " +
                        std::to_string(session.montage.size()));
  }
  if (!(rec.sampling_rate_hz > 0.0)) throw FormatError("sampling rate must be positive");
  std::vector<std::uint32_t> words(channels * samples);
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t));
      if (!std::isfinite(v)) {
        throw FormatError("non-finite sample at channel " + session.montage.labels()[c] + ", sample " +
                          std::to_string(t));
      }
      words[t * channels + c] = to_little_endian(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  std::string markers = "sample_index,label\n";
  for (const auto& m : session.markers) {
    if (m.sample < 0 || static_cast<std::size_t>(m.sample) >= samples) {
      throw OutOfBounds("marker at sample " + std::to_string(m.sample) + " is outside the recording");
    }
    markers += std::to_string(m.sample) + (m.label == Label::Positive ? ",pos\n" : ",neg\n");
  }

  json header;
  header["n_channels"] = channels;
  header["sampling_rate_hz"] = rec.sampling_rate_hz;
  header["n_samples"] = samples;
  header["channel_labels"] = session.montage.labels();
  header["montage"] = session.montage.name().empty() ? "cap64" : session.montage.name();

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_bytes_atomic(dir / kDataFile, reinterpret_cast<const char*>(words.data()), words.size() * 4);
  write_text_file_atomic(dir / kMarkersFile, markers);
  write_text_file_atomic(dir / kHeaderFile, header.dump(2) + "\n");
}

Session read_session(const fs::path& dir) {
  for (auto name : {kHeaderFile, kDataFile, kMarkersFile}) {
    if (!fs::is_regular_file(dir / name)) throw MissingFile("missing session file " + (dir / name).string());
  }
  const fs::path header_path = dir / kHeaderFile;
  const json header = parse_json(read_text_file(header_path), header_path.string());
  std::size_t channels = 0, samples = 0;
  double rate = 0.0;
  std::vector<std::string> labels;
  std::string montage_name;
  try {
    channels = header.at("n_channels").get<std::size_t>();
    samples = header.at("n_samples").get<std::size_t>();
    rate = header.at("sampling_rate_hz").get<double>();
    labels = header.at("channel_labels").get<std::vector<std::string>>();
    montage_name = header.at("montage").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(header_path.string() + ": " + e.what());
  }
  if (labels.size() != channels) {
    throw FormatError(header_path.string() + ": n_channels is " + std::to_string(channels) + " but " +
                      std::to_string(labels.size()) + " labels are listed");
  }
  MontageName name{};
  try {
    name = parse_montage_name(montage_name);
  } catch (const Error&) {
    throw FormatError(header_path.string() + ": unknown montage '" + montage_name + "'");
  }
  const Montage declared = standard_positions(name);
  for (const auto& l : labels) {
    if (!declared.index_of(l)) {
      throw UnknownLabel(header_path.string() + ": channel '" + l + "' is not part of montage " + montage_name);
    }
  }
  Montage montage = declared.subset(labels);

  const fs::path data_path = dir / kDataFile;
  const std::uintmax_t expected = 4ULL * channels * samples;
  const std::uintmax_t actual = fs::file_size(data_path);
  if (actual != expected) {
    throw SizeMismatch(data_path.string() + ": expected " + std::to_string(expected) + " bytes, found " +
                       std::to_string(actual));
  }
  std::vector<std::uint32_t> words(channels * samples);
  {
    std::ifstream in(data_path, std::ios::binary);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(expected));
    if (!in && expected > 0) throw IoError("failed reading " + data_path.string());
  }
  ContinuousRecording rec{rate, Eigen::MatrixXd(static_cast<Eigen::Index>(channels),
                                                static_cast<Eigen::Index>(samples))};
  for (std::size_t t = 0; t < samples; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
          std::bit_cast<float>(to_little_endian(words[t * channels + c]));
    }
  }

  const fs::path markers_path = dir / kMarkersFile;
  std::istringstream in(read_text_file(markers_path));
  std::vector<Marker> markers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == "sample_index,label")) continue;
    const std::string where = markers_path.string() + " line " + std::to_string(line_no);
    const auto fields = split(line, ',');
    if (fields.size() != 2) throw FormatError(where + ": expected 'sample_index,label'");
    std::int64_t sample = 0;
    std::size_t used = 0;
    try {
      sample = std::stoll(fields[0], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != fields[0].size()) throw FormatError(where + ": bad sample index '" + fields[0] + "'");
    if (sample < 0 || static_cast<std::size_t>(sample) >= samples) {
      throw OutOfBounds(where + ": sample index " + std::to_string(sample) + " outside [0, " +
                        std::to_string(samples) + ")");
    }
    Label label;
    if (fields[1] == "pos") {
      label = Label::Positive;
    } else if (fields[1] == "neg") {
      label = Label::Negative;
    } else {
      throw UnknownLabel(where + ": label '" + fields[1] + "' is neither pos nor neg");
    }
    markers.push_back({sample, label});
  }
  return Session{std::move(rec), std::move(markers), std::move(montage)};
}

PipelineConfig parse_config(std::string_view json_text, std::string_view source) {
  const json j = parse_json(json_text, source);
  ObjectReader r(j, std::string(source));
  PipelineConfig c;
  r.read("name", c.name);
  const auto window = read_pair(r, "window_ms", {c.window_ms.start_ms, c.window_ms.end_ms});
  c.window_ms = {window.first, window.second};
  r.read("target_rate_hz", c.target_rate_hz);
  const auto band = read_pair(r, "band_hz", {c.band_hz.low_hz, c.band_hz.high_hz});
  c.band_hz = {band.first, band.second};
  if (const json* crop = r.find("crop_last_ms"); crop && !crop->is_null()) {
    if (!crop->is_number()) r.fail("crop_last_ms", "must be a number or null");
    c.crop_last_ms = crop->get<double>();
  }
  r.read("n_spatial_filters", c.n_spatial_filters);
  {
    ObjectReader f = r.child("features");
    std::string kind = "slope_windows";
    f.read("kind", kind);
    if (kind == "slope_windows") {
      c.features.kind = FeatureKind::SlopeWindows;
      f.read("width_samples", c.features.width_samples);
      f.read("stride_samples", c.features.stride_samples);
    } else if (kind == "raw_pseudo_channels") {
      c.features.kind = FeatureKind::RawPseudoChannels;
    } else {
      f.fail("kind", "must be slope_windows or raw_pseudo_channels");
    }
    f.finish();
  }
  r.read("c_grid", c.c_grid);
  {
    ObjectReader cv = r.child("cv");
    cv.read("folds", c.cv.folds);
    cv.read("repetitions", c.cv.repetitions);
    cv.finish();
  }
  r.read("class_weight_positive", c.class_weight_positive);
  r.read("max_iter_factor", c.max_iter_factor);
  r.read("metric", c.metric);
  r.read("seed", c.seed);
  r.finish();
  try {
    c.validate();
  } catch (const InvalidSpec& e) {
    throw InvalidSpec(std::string(source) + ": " + e.what());
  }
  return c;
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["name"] = c.name;
  j["window_ms"] = {c.window_ms.start_ms, c.window_ms.end_ms};
  j["target_rate_hz"] = c.target_rate_hz;
  j["band_hz"] = {c.band_hz.low_hz, c.band_hz.high_hz};
  j["crop_last_ms"] = c.crop_last_ms ? json(*c.crop_last_ms) : json(nullptr);
  j["n_spatial_filters"] = c.n_spatial_filters;
  if (c.features.kind == FeatureKind::SlopeWindows) {
    j["features"] = {{"kind", "slope_windows"},
                     {"width_samples", c.features.width_samples},
                     {"stride_samples", c.features.stride_samples}};
  } else {
    j["features"] = {{"kind", "raw_pseudo_channels"}};
  }
  j["c_grid"] = c.c_grid;
  j["cv"] = {{"folds", c.cv.folds}, {"repetitions", c.cv.repetitions}};
  j["class_weight_positive"] = c.class_weight_positive;
  j["max_iter_factor"] = c.max_iter_factor;
  j["metric"] = c.metric;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

PipelineConfig load_config(const fs::path& path) { return parse_config(read_text_file(path), path.string()); }

PipelineConfig preset_config(std::string_view name) {
  if (name == "p300") return parse_config(fixtures::kPresetP300, "preset p300");
  if (name == "mrcp") return parse_config(fixtures::kPresetMrcp, "preset mrcp");
  throw InvalidSpec("unknown preset '" + std::string(name) + "' (expected p300 or mrcp)");
}

SessionSpec parse_session_spec(std::string_view json_text, std::string_view source) {
  const json j = parse_json(json_text, source);
  ObjectReader r(j, std::string(source));
  SessionSpec s;
  std::string montage = std::string(to_string(s.montage));
  r.read("montage", montage);
  try {
    s.montage = parse_montage_name(montage);
  } catch (const Error&) {
    r.fail("montage", "must be cap64, cap32 or cap19");
  }
  r.read("n_positive", s.n_positive);
  r.read("n_negative", s.n_negative);
  r.read("inter_marker_ms", s.inter_marker_ms);
  r.read("sampling_rate_hz", s.sampling_rate_hz);
  r.read("margin_ms", s.margin_ms);
  {
    ObjectReader e = r.child("erp");
    e.read("peak_ms", s.erp.peak_ms);
    e.read("width_ms", s.erp.width_ms);
    e.read("amplitude", s.erp.amplitude);
    e.read("latency_jitter_ms", s.erp.latency_jitter_ms);
    e.read("amplitude_jitter", s.erp.amplitude_jitter);
    e.finish();
  }
  {
    ObjectReader n = r.child("noise");
    n.read("pink_gain", s.noise.pink_gain);
    n.read("white_gain", s.noise.white_gain);
    n.read("spatial_correlation_scale", s.noise.spatial_correlation_scale);
    n.finish();
  }
  {
    ObjectReader p = r.child("pattern");
    std::string label;
    p.read("center_label", label);
    std::vector<double> center;
    p.read("center", center);
    if (!label.empty() && !center.empty()) p.fail("center", "conflicts with center_label");
    if (!label.empty()) {
      const Montage full = standard_positions(MontageName::Cap64);
      if (!full.index_of(label)) p.fail("center_label", "names no electrode of the 64-channel cap");
      s.pattern.center = full.position(label);
    } else if (!center.empty()) {
      if (center.size() != 3) p.fail("center", "must have three components");
      s.pattern.center = {center[0], center[1], center[2]};
    }
    p.read("width", s.pattern.width);
    p.read("gain", s.pattern.gain);
    p.finish();
  }
  if (const json* rot = r.find("cap_rotation"); rot && !rot->is_null()) {
    ObjectReader q(*rot, std::string(source) + ": cap_rotation");
    std::string axis = "z";
    RotationSpec spec;
    q.read("axis", axis);
    q.read("angle_deg", spec.angle_deg);
    q.finish();
    try {
      spec.axis = parse_axis(axis);
    } catch (const Error&) {
      q.fail("axis", "must be x, y or z");
    }
    s.cap_rotation = spec;
  }
  r.read("seed", s.seed);
  r.finish();
  try {
    s.validate();
  } catch (const InvalidSpec& e) {
    throw InvalidSpec(std::string(source) + ": " + e.what());
  }
  return s;
}

std::string session_spec_to_json(const SessionSpec& s) {
  json j;
  j["montage"] = std::string(to_string(s.montage));
  j["n_positive"] = s.n_positive;
  j["n_negative"] = s.n_negative;
  j["inter_marker_ms"] = s.inter_marker_ms;
  j["sampling_rate_hz"] = s.sampling_rate_hz;
  j["margin_ms"] = s.margin_ms;
  j["erp"] = {{"peak_ms", s.erp.peak_ms},
              {"width_ms", s.erp.width_ms},
              {"amplitude", s.erp.amplitude},
              {"latency_jitter_ms", s.erp.latency_jitter_ms},
              {"amplitude_jitter", s.erp.amplitude_jitter}};
  j["noise"] = {{"pink_gain", s.noise.pink_gain},
                {"white_gain", s.noise.white_gain},
                {"spatial_correlation_scale", s.noise.spatial_correlation_scale}};
  j["pattern"] = {{"center", {s.pattern.center.x(), s.pattern.center.y(), s.pattern.center.z()}},
                  {"width", s.pattern.width},
                  {"gain", s.pattern.gain}};
  j["cap_rotation"] = s.cap_rotation ? json{{"axis", std::string(to_string(s.cap_rotation->axis))},
                                            {"angle_deg", s.cap_rotation->angle_deg}}
                                     : json(nullptr);
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

SessionSpec load_session_spec(const fs::path& path) {
  return parse_session_spec(read_text_file(path), path.string());
}

std::string csv_header() {
  return "experiment,condition,axis,angle_deg,kernel,time_shift_ms,train_fraction,n_filters,seed,"
         "balanced_accuracy,wall_ms";
}

std::string format_csv_row(const ResultRow& row) {
  for (const std::string* s : {&row.experiment, &row.condition, &row.axis, &row.kernel}) {
    if (s->find_first_of(",\n\"") != std::string::npos) throw FormatError("CSV field '" + *s + "' contains a separator");
  }
  return row.experiment + "," + row.condition + "," + row.axis + "," + format_number(row.angle_deg) + "," +
         row.kernel + "," + format_number(row.time_shift_ms) + "," + format_number(row.train_fraction) + "," +
         std::to_string(row.n_filters) + "," + std::to_string(row.seed) + "," +
         format_number(row.balanced_accuracy, "%.6f") + "," + format_number(row.wall_ms, "%.1f");
}

void append_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
  std::string text;
  std::error_code ec;
  const bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  if (fresh) text = csv_header() + "\n";
  for (const auto& r : rows) text += format_csv_row(r) + "\n";
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for appending");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ResultRow> read_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == csv_header()) continue;
    const std::string where = path.string() + " line " + std::to_string(line_no);
    const auto f = split(line, ',');
    if (f.size() != 11) throw FormatError(where + ": expected 11 columns, found " + std::to_string(f.size()));
    ResultRow r;
    try {
      r.experiment = f[0];
      r.condition = f[1];
      r.axis = f[2];
      r.angle_deg = std::stod(f[3]);
      r.kernel = f[4];
      r.time_shift_ms = std::stod(f[5]);
      r.train_fraction = std::stod(f[6]);
      r.n_filters = static_cast<std::size_t>(std::stoull(f[7]));
      r.seed = std::stoull(f[8]);
      r.balanced_accuracy = std::stod(f[9]);
      r.wall_ms = std::stod(f[10]);
    } catch (const std::exception&) {
      throw FormatError(where + ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

ComparisonPlan parse_comparisons(std::string_view json_text, std::string_view source) {
  const json j = parse_json(json_text, source);
  ObjectReader r(j, std::string(source));
  ComparisonPlan plan;
  r.read("n_permutations", plan.n_permutations);
  r.read("seed", plan.seed);
  const json* list = r.find("comparisons");
  if (!list || !list->is_array() || list->empty()) r.fail("comparisons", "must be a non-empty array");
  for (const auto& item : *list) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      r.fail("comparisons", "entries must be [condition_a, condition_b] pairs");
    }
    Comparison c{item[0].get<std::string>(), item[1].get<std::string>()};
    if (c.condition_a == c.condition_b) r.fail("comparisons", "compares '" + c.condition_a + "' with itself");
    plan.comparisons.push_back(std::move(c));
  }
  r.finish();
  return plan;
}

ComparisonPlan load_comparisons(const fs::path& path) {
  return parse_comparisons(read_text_file(path), path.string());
}

}  // namespace erpaug
