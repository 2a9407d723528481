// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The jamloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "jamloc/dsp/fft.hpp"
#include "jamloc/error.hpp"
#include "jamloc/sim/geometry.hpp"
#include "jamloc/sim/propagation.hpp"
#include "jamloc/sim/scenario.hpp"
#include "jamloc/sim/trajectory.hpp"
#include "jamloc/sim/waveform.hpp"

using namespace jamloc;
using namespace jamloc::sim;
using std::numbers::pi;

namespace {

constexpr double kFs = 1e8;
constexpr JammerClass kAllClasses[] = {JammerClass::Chirp,     JammerClass::FrequencyHopping, JammerClass::Modulated,
                                       JammerClass::Multitone, JammerClass::Pulsed,           JammerClass::Noise};

SceneConfig quiet_scene() {
  auto s = SceneConfig::hall();
  s.reflectors.clear();
  s.walls.clear();
  s.add_noise = false;
  return s;
}

dsp::Channels noise_free(const SceneConfig& scene, const Vec3& pos, std::uint64_t seed = 1) {
  JammerProfile p;
  std::mt19937_64 rng(seed);
  const auto wave = gen_baseband(p, scene.snapshot_len + kDelayPad, kFs, rng);
  return propagate_channels(scene, ArrayGeometry::square(), pos, wave, 0.0, rng);
}

double channel_power(const std::vector<dsp::Complex>& c) {
  double p = 0.0;
  for (auto v : c) p += std::norm(v);
  return p / static_cast<double>(c.size());
}

// Mean phase of x_a conj(x_b).
double phase_diff(const std::vector<dsp::Complex>& a, const std::vector<dsp::Complex>& b) {
  dsp::Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return std::arg(acc);
}

}  // namespace

TEST_CASE("every jammer class has unit average power") {
  for (auto c : kAllClasses) {
    for (double bw : {0.2e6, 5e6, 20e6, 60e6}) {
      JammerProfile p;
      p.jammer_class = c;
      p.bandwidth_hz = bw;
      std::mt19937_64 rng(3);
      const auto x = gen_baseband(p, 4096, kFs, rng);
      double m = 0.0;
      for (auto v : x) m += std::norm(v);
      INFO(to_string(c), " bw ", bw);
      CHECK(std::abs(m / x.size() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("profile validation") {
  JammerProfile p;
  p.bandwidth_hz = 0.1e6;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.bandwidth_hz = 20e6;
  p.power_dbm = 11.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.power_dbm = 0.0;
  p.bandwidth_hz = 60e6;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(gen_baseband(p, 64, 50e6, rng), DomainError);
}

TEST_CASE("chirp sweeps its bandwidth") {
  JammerProfile p;
  p.bandwidth_hz = 20e6;
  std::mt19937_64 rng(1);
  const auto x = gen_baseband(p, 1024, kFs, rng, {1024, 0.0});
  double lo = 1e30, hi = -1e30;
  for (std::size_t n = 1; n < x.size(); ++n) {
    const double f = std::arg(x[n] * std::conj(x[n - 1])) * kFs / (2 * pi);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  CHECK(hi - lo == doctest::Approx(20e6).epsilon(0.02));
}

TEST_CASE("single-tone multitone has one dominant bin") {
  JammerProfile p;
  p.jammer_class = JammerClass::Multitone;
  p.tones = 1;
  std::mt19937_64 rng(2);
  const auto X = dsp::fft(gen_baseband(p, 1024, kFs, rng));
  std::vector<double> mag(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) mag[i] = std::abs(X[i]);
  std::sort(mag.rbegin(), mag.rend());
  CHECK(mag[0] > 0.5 * std::sqrt(1024.0) * std::sqrt(1024.0) * 0.5);
  CHECK(mag[1] < 0.25 * mag[0]);
}

TEST_CASE("subclass buckets") {
  CHECK(subclass_for(JammerClass::Chirp, 0.2e6) == 0);
  CHECK(subclass_for(JammerClass::Chirp, 60e6) == 3);
  CHECK(subclass_for(JammerClass::Noise, 0.2e6) == 20);
}

TEST_CASE("array geometry") {
  const auto g = ArrayGeometry::square();
  CHECK(g.spacing() == doctest::Approx(g.wavelength() / 2));
  CHECK(g.elements[0].x < g.elements[1].x);
  CHECK(g.elements[0].z > g.elements[2].z);
  for (auto s : steering_vector(g, {0.0, -1.0, 0.0})) CHECK(std::abs(s - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("broadside source reaches all patches in phase") {
  const auto s = quiet_scene();
  const Vec3 pos{20.0, 12.0, 1.5};
  const auto ch = noise_free(s, pos);
  for (std::size_t k = 1; k < kPatches; ++k) CHECK(std::abs(phase_diff(ch[k], ch[0])) < 1e-6);
}

TEST_CASE("two-element interferometry recovers the source azimuth") {
  const auto s = quiet_scene();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> az(15.0, 165.0);
  for (int i = 0; i < 20; ++i) {
    const double alpha = az(rng);
    const Vec3 pos = s.antenna_position + Vec3{std::cos(alpha * pi / 180), std::sin(alpha * pi / 180), 0.3} * 6.0;
    const auto ch = noise_free(s, pos, i);
    // phase(x_b conj x_a) = -2 pi (e_b - e_a).u / lambda with spacing lambda/2.
    const double ux = -phase_diff(ch[1], ch[0]) / pi;
    const double uz = -phase_diff(ch[0], ch[2]) / pi;
    const double uy = -std::sqrt(std::max(0.0, 1.0 - ux * ux - uz * uz));
    const double est = std::atan2(-uy, -ux) * 180 / pi;
    INFO("alpha ", alpha);
    CHECK(std::abs(est - alpha) < 1.0);
  }
}

TEST_CASE("absorber wall attenuates the direct path") {
  auto open = quiet_scene();
  auto blocked = open;
  WallSegment w;
  w.a = {15.0, 5.0, 0.0};
  w.b = {25.0, 5.0, 0.0};
  w.z_max = 8.0;
  w.transmission_loss_db = 20.0;
  blocked.walls.push_back(w);
  const Vec3 pos{20.5, 12.0, 2.0};
  const auto a = noise_free(open, pos), b = noise_free(blocked, pos);
  CHECK(channel_power(a[0]) / channel_power(b[0]) == doctest::Approx(100.0).epsilon(0.05));
  int crossings = 0;
  CHECK(crossing_gain(blocked, pos, blocked.antenna_position, &crossings) == doctest::Approx(0.1));
  CHECK(crossings == 1);
}

TEST_CASE("path tracing") {
  auto s = SceneConfig::hall();
  const Vec3 pos{10.0, 20.0, 4.0};
  const auto paths = trace_paths(s, pos);
  CHECK(paths.size() == 1 + s.reflectors.size());
  CHECK(paths[0].via == "direct");
  CHECK(paths[0].length == doctest::Approx((pos - s.antenna_position).norm()));
  for (std::size_t i = 1; i < paths.size(); ++i) CHECK(paths[i].length > paths[0].length);
  PlanarReflector floor{"floor", {0, 0, 0}, {0, 0, 1}, 0.3};
  CHECK(image_point(floor, pos) == Vec3{10.0, 20.0, -4.0});
  std::mt19937_64 rng(1);
  std::vector<dsp::Complex> wave(s.snapshot_len + kDelayPad, 1.0);
  CHECK_THROWS_AS(propagate_channels(s, ArrayGeometry::square(), {50.0, 5.0, 2.0}, wave, 0.0, rng), DomainError);
  CHECK_THROWS_AS(propagate_channels(s, ArrayGeometry::square(), s.antenna_position, wave, 0.0, rng), DomainError);
}

TEST_CASE("received power follows transmit power and noise floor") {
  auto s = quiet_scene();
  const Vec3 pos{22.0, 10.0, 3.0};
  JammerProfile p;
  std::mt19937_64 r1(5), r2(5);
  const auto wave = gen_baseband(p, s.snapshot_len + kDelayPad, kFs, r1);
  const auto a = propagate_channels(s, ArrayGeometry::square(), pos, wave, 0.0, r1);
  const auto b = propagate_channels(s, ArrayGeometry::square(), pos, wave, 10.0, r2);
  CHECK(channel_power(b[0]) / channel_power(a[0]) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
}

TEST_CASE("trajectories") {
  TrajectoryParams tp;
  tp.points_per_circle = 100;
  CHECK(gen_trajectory(TrajectoryKind::Circles, tp, default_heights()).size() == 2000);
  CHECK(default_heights() == std::vector<double>{3.9, 4.4, 4.9, 5.4});
  CHECK(gen_trajectory(TrajectoryKind::GridCircles, tp, {4.0}).size() == 4 * 5 * 100);
  const auto m = gen_trajectory(TrajectoryKind::Meander, tp, {4.0});
  REQUIRE(m.size() == tp.rows * tp.points_per_row);
  for (std::size_t r = 0; r < tp.rows; ++r) {
    const int dir = (m[r * tp.points_per_row + 1].x > m[r * tp.points_per_row].x) ? 1 : -1;
    for (std::size_t i = 1; i < tp.points_per_row; ++i) {
      const auto& a = m[r * tp.points_per_row + i - 1];
      const auto& b = m[r * tp.points_per_row + i];
      CHECK(dir * (b.x - a.x) > 0.0);
      CHECK(a.y == b.y);
    }
  }
  CHECK(trajectory_from_string("meander") == TrajectoryKind::Meander);
  CHECK_THROWS_AS(trajectory_from_string("spiral"), ConfigError);
}

TEST_CASE("scenario presets") {
  CHECK(heldout_tags().size() == 6);
  CHECK(dataset_poses(scenario_preset("Random")).size() == 2500);
  for (const auto& tag : heldout_tags()) {
    const auto cfg = scenario_preset(tag);
    CHECK(cfg.scenario == tag);
    CHECK_FALSE(dataset_poses(cfg).empty());
    if (tag != "Meander") CHECK_FALSE(cfg.scene.walls.empty());
  }
  CHECK(scenario_preset("Generator").profile_mode == ProfileMode::Catalog);
  CHECK_THROWS_AS(scenario_preset("Wall 9"), ConfigError);
}

TEST_CASE("dataset generation is deterministic and independent of jobs") {
  auto cfg = scenario_preset("Wall 2");
  cfg.max_snapshots = 12;
  const auto a = make_dataset(cfg, 7, 1);
  const auto b = make_dataset(cfg, 7, 3);
  const auto c = make_dataset(cfg, 8, 1);
  REQUIRE(a.size() == 12);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& s : a) {
    CHECK(s.scenario_tag == "Wall 2");
    CHECK(s.samples.size() == kPatches * 1024);
    const auto p = Vec3{s.label.dx, s.label.dy, s.label.dz} + cfg.scene.antenna_position;
    CHECK(p.x > 0.0);
    CHECK(p.x < cfg.scene.hall_extent.x);
  }
  auto [train, test] = split_train_test(a, 0.25, 3);
  CHECK(train.size() == 9);
  CHECK(test.size() == 3);
  const auto again = split_train_test(a, 0.25, 3);
  CHECK(again.first == train);
}

TEST_CASE("catalog profiles cover every class") {
  auto cfg = scenario_preset("Generator");
  cfg.max_snapshots = 60;
  std::set<int> seen;
  for (const auto& s : make_dataset(cfg, 1)) seen.insert(s.label.jammer_class);
  CHECK(seen.size() == 6);
}

TEST_CASE("derived generators differ per index") {
  auto a = derive_rng(1, 0), b = derive_rng(1, 1), c = derive_rng(1, 0);
  CHECK(a() != b());
  CHECK(derive_rng(1, 0)() == c());
}
