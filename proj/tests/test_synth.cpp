#include <doctest.h>

#include <cmath>

#include "erpaug/error.hpp"
#include "erpaug/synth.hpp"

using namespace erpaug;

namespace {

SessionSpec quiet_spec() {
  SessionSpec s;
  s.montage = MontageName::Cap19;
  s.sampling_rate_hz = 250.0;
  s.n_positive = 8;
  s.n_negative = 12;
  s.noise.pink_gain = 0.0;
  s.noise.white_gain = 0.0;
  s.pattern.center = standard_positions(MontageName::Cap64).position("Pz");
  return s;
}

std::vector<Eigen::MatrixXd> cut(const Session& s, Label which) {
  std::vector<Eigen::MatrixXd> out;
  const auto len = ms_to_samples(1000.0, s.recording.sampling_rate_hz);
  for (const auto& m : s.markers) {
    if (m.label == which) out.push_back(s.recording.data.middleCols(m.sample, len));
  }
  return out;
}

// Two-sided p-value of Welch's t statistic (normal approximation, large n).
double welch_p(const std::vector<double>& a, const std::vector<double>& b) {
  auto stats = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = stats(a);
  const auto [mb, vb] = stats(b);
  const double t = (ma - mb) / std::sqrt(va / static_cast<double>(a.size()) + vb / static_cast<double>(b.size()));
  return std::erfc(std::abs(t) / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("scalp field") {
  SourcePattern p;
  p.center = Eigen::Vector3d::UnitY();
  p.width = 0.5;
  p.gain = 2.0;
  CHECK(scalp_field(p, p.center) == 2.0);
  CHECK(scalp_field(p, -p.center) < 1e-8 * p.gain);
  CHECK(scalp_field(p, -p.center) == doctest::Approx(2.0 * std::exp(-std::pow(M_PI / 0.5, 2))).epsilon(1e-9));

  const Eigen::Matrix3d q = rotation_matrix({Axis::X, 23.0});
  SourcePattern rotated = p;
  rotated.center = q * p.center;
  const Montage m = standard_positions(MontageName::Cap64);
  for (const auto& pos : m.positions()) CHECK(std::abs(scalp_field(rotated, q * pos) - scalp_field(p, pos)) < 1e-12);

  SourcePattern bad;
  bad.width = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);
  bad = SourcePattern{};
  bad.center = Eigen::Vector3d(0, 0, 2);
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);
}

TEST_CASE("noiseless sessions: identical targets, silent standards") {
  const Session s = generate_session(quiet_spec());
  const auto pos = cut(s, Label::Positive);
  const auto neg = cut(s, Label::Negative);
  REQUIRE(pos.size() == 8);
  REQUIRE(neg.size() == 12);
  for (const auto& e : pos) CHECK((e.array() == pos[0].array()).all());
  for (const auto& e : neg) CHECK(e.isZero(0.0));
  CHECK(pos[0].cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("averaged target response peaks at peak_ms") {
  SessionSpec spec = quiet_spec();
  spec.erp.peak_ms = 320.0;
  const Session s = generate_session(spec);
  const auto pos = cut(s, Label::Positive);
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(pos[0].rows(), pos[0].cols());
  for (const auto& e : pos) avg += e;
  const auto pz = static_cast<Eigen::Index>(*s.montage.index_of("Pz"));
  Eigen::Index arg = 0;
  avg.row(pz).maxCoeff(&arg);
  CHECK(std::abs(static_cast<double>(arg) - 320.0 * 250.0 / 1000.0) <= 1.0);
}

TEST_CASE("class ratio and marker layout") {
  const SessionSpec def;
  CHECK(def.n_negative == 6 * def.n_positive);
  SessionSpec spec = quiet_spec();
  const Session s = generate_session(spec);
  std::size_t npos = 0;
  for (std::size_t k = 0; k < s.markers.size(); ++k) {
    npos += s.markers[k].label == Label::Positive;
    if (k > 0) CHECK(s.markers[k].sample - s.markers[k - 1].sample == 250);
  }
  CHECK(npos == 8);
  CHECK(s.montage.size() == 19);
  CHECK(s.recording.samples() == static_cast<std::size_t>(2 * 375 + 20 * 250));
}

TEST_CASE("generation is deterministic per seed") {
  SessionSpec spec = quiet_spec();
  spec.noise = NoiseSpec{};
  spec.erp.latency_jitter_ms = 20.0;
  spec.seed = 5;
  const Session a = generate_session(spec), b = generate_session(spec);
  CHECK((a.recording.data.array() == b.recording.data.array()).all());
  spec.seed = 6;
  const Session c = generate_session(spec);
  CHECK((a.recording.data.array() != c.recording.data.array()).any());
}

TEST_CASE("rotated cap equals the inversely rotated source") {
  SessionSpec spec = quiet_spec();
  spec.cap_rotation = RotationSpec{Axis::Z, 6.0};
  const Session rotated_cap = generate_session(spec);
  SessionSpec moved = quiet_spec();
  moved.pattern.center = rotation_matrix({Axis::Z, 6.0}).transpose() * spec.pattern.center;
  const Session moved_source = generate_session(moved);
  CHECK((rotated_cap.recording.data - moved_source.recording.data).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(rotated_cap.montage.labels() == moved_source.montage.labels());
  CHECK(rotated_cap.montage.position("Pz") == standard_positions(MontageName::Cap19).position("Pz"));
}

TEST_CASE("noise is unit-scaled per source and spatially smooth") {
  SessionSpec spec = quiet_spec();
  spec.noise = NoiseSpec{1.0, 0.0, 0.5};
  spec.erp.amplitude = 0.0;
  spec.n_negative = 200;
  const Session s = generate_session(spec);
  const auto& d = s.recording.data;
  const auto c3 = static_cast<Eigen::Index>(*s.montage.index_of("C3"));
  const auto cz = static_cast<Eigen::Index>(*s.montage.index_of("Cz"));
  const auto o2 = static_cast<Eigen::Index>(*s.montage.index_of("O2"));
  auto corr = [&](Eigen::Index a, Eigen::Index b) {
    const Eigen::RowVectorXd x = d.row(a).array() - d.row(a).mean();
    const Eigen::RowVectorXd y = d.row(b).array() - d.row(b).mean();
    return x.dot(y) / (x.norm() * y.norm());
  };
  // Neighbours correlate more strongly than distant electrodes.
  CHECK(corr(c3, cz) > corr(c3, o2));
  CHECK(corr(c3, cz) > 0.1);
}

TEST_CASE("zero amplitude leaves the classes indistinguishable") {
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SessionSpec spec;
    spec.montage = MontageName::Cap19;
    spec.sampling_rate_hz = 100.0;
    spec.n_positive = 40;
    spec.n_negative = 120;
    spec.erp.amplitude = 0.0;
    spec.seed = seed;
    const Session s = generate_session(spec);
    const auto pz = static_cast<Eigen::Index>(*s.montage.index_of("Pz"));
    // Mean Pz level in the 200-400 ms window of each epoch.
    std::vector<double> a, b;
    for (const auto& m : s.markers) {
      const double v = s.recording.data.row(pz).segment(m.sample + 20, 20).mean();
      (m.label == Label::Positive ? a : b).push_back(v);
    }
    rejected += welch_p(a, b) <= 0.01;
  }
  CHECK(rejected == 0);
}

TEST_CASE("spec validation names the field") {
  SessionSpec s;
  s.n_positive = 0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("n_positive"), InvalidSpec);
  s = SessionSpec{};
  s.erp.peak_ms = 5000.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("erp.peak_ms"), InvalidSpec);
  s = SessionSpec{};
  s.noise.spatial_correlation_scale = 0.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("spatial_correlation_scale"), InvalidSpec);
  s = SessionSpec{};
  s.cap_rotation = RotationSpec{Axis::Z, 200.0};
  CHECK_THROWS_AS(s.validate(), InvalidSpec);
}
