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

#include "jamloc/sim/propagation.hpp"

#include <cmath>
#include <numbers>

#include "jamloc/error.hpp"

namespace jamloc::sim {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

SceneConfig SceneConfig::hall() {
  SceneConfig s;
  const Vec3 e = s.hall_extent;
  s.reflectors = {
      {"floor", {0, 0, 0}, {0, 0, 1}, 0.4},        {"ceiling", {0, 0, e.z}, {0, 0, -1}, 0.4},
      {"wall_x0", {0, 0, 0}, {1, 0, 0}, 0.3},      {"wall_x1", {e.x, 0, 0}, {-1, 0, 0}, 0.3},
      {"wall_y0", {0, 0, 0}, {0, 1, 0}, 0.3},      {"wall_y1", {0, e.y, 0}, {0, -1, 0}, 0.3},
  };
  return s;
}

Vec3 image_point(const PlanarReflector& plane, const Vec3& source) {
  const Vec3 n = plane.normal.unit();
  return source - n * (2.0 * (source - plane.point).dot(n));
}

namespace {

// Intersection parameter t in [0,1] of p->q with the panel, if any.
std::optional<double> hit_wall(const WallSegment& w, const Vec3& p, const Vec3& q) {
  const double rx = q.x - p.x, ry = q.y - p.y;
  const double sx = w.b.x - w.a.x, sy = w.b.y - w.a.y;
  const double denom = rx * sy - ry * sx;
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double qpx = w.a.x - p.x, qpy = w.a.y - p.y;
  const double t = (qpx * sy - qpy * sx) / denom;
  const double u = (qpx * ry - qpy * rx) / denom;
  if (t <= 1e-9 || t >= 1.0 - 1e-9 || u < 0.0 || u > 1.0) return std::nullopt;
  const double z = p.z + t * (q.z - p.z);
  if (z < w.z_min || z > w.z_max) return std::nullopt;
  return t;
}

PlanarReflector wall_plane(const WallSegment& w) {
  const Vec3 along{w.b.x - w.a.x, w.b.y - w.a.y, 0.0};
  return {"panel", w.a, Vec3{-along.y, along.x, 0.0}.unit(), w.reflection_coeff};
}

void check_inside(const SceneConfig& scene, const Vec3& p) {
  const Vec3& e = scene.hall_extent;
  if (p.x < 0 || p.y < 0 || p.z < 0 || p.x > e.x || p.y > e.y || p.z > e.z) {
    throw DomainError("jammer position (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                      std::to_string(p.z) + ") lies outside the hall");
  }
}

}  // namespace

double crossing_gain(const SceneConfig& scene, const Vec3& p, const Vec3& q, int* crossings, std::ptrdiff_t skip) {
  double g = 1.0;
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    if (hit_wall(scene.walls[i], p, q)) {
      g *= std::pow(10.0, -scene.walls[i].transmission_loss_db / 20.0);
      if (crossings) ++*crossings;
    }
  }
  return g;
}

std::vector<Path> trace_paths(const SceneConfig& scene, const Vec3& jammer_pos) {
  const Vec3& rx = scene.antenna_position;
  if ((jammer_pos - rx).norm() < 1e-6) throw DomainError("jammer coincides with the antenna");
  std::vector<Path> paths;

  Path direct;
  direct.length = (rx - jammer_pos).norm();
  direct.direction = (rx - jammer_pos).unit();
  direct.gain = crossing_gain(scene, jammer_pos, rx, &direct.wall_crossings);
  direct.via = "direct";
  paths.push_back(direct);

  auto reflect = [&](const PlanarReflector& plane, std::ptrdiff_t wall_index) {
    const Vec3 n = plane.normal.unit();
    const double side_src = (jammer_pos - plane.point).dot(n);
    const double side_rx = (rx - plane.point).dot(n);
    if (side_src * side_rx <= 0.0) return;  // opposite sides or on the plane
    const Vec3 img = image_point(plane, jammer_pos);
    const double a = (img - plane.point).dot(n);
    const double t = a / (a - side_rx);  // fraction from image to receiver
    const Vec3 hit = img + (rx - img) * t;
    if (wall_index >= 0) {
      const auto& w = scene.walls[static_cast<std::size_t>(wall_index)];
      const Vec3 ab{w.b.x - w.a.x, w.b.y - w.a.y, 0.0};
      const double s = ((hit.x - w.a.x) * ab.x + (hit.y - w.a.y) * ab.y) / ab.dot(ab);
      if (s < 0.0 || s > 1.0 || hit.z < w.z_min || hit.z > w.z_max) return;
    }
    Path p;
    p.length = (rx - img).norm();
    p.direction = (rx - img).unit();
    p.gain = plane.reflection_coeff * crossing_gain(scene, jammer_pos, hit, &p.wall_crossings, wall_index) *
             crossing_gain(scene, hit, rx, &p.wall_crossings, wall_index);
    p.via = plane.name;
    paths.push_back(p);
  };
  for (const auto& r : scene.reflectors) reflect(r, -1);
  for (std::size_t i = 0; i < scene.walls.size(); ++i) {
    auto plane = wall_plane(scene.walls[i]);
    plane.name = "panel" + std::to_string(i);
    reflect(plane, static_cast<std::ptrdiff_t>(i));
  }
  return paths;
}

dsp::Channels propagate_channels(const SceneConfig& scene, const ArrayGeometry& geometry, const Vec3& jammer_pos,
                                 std::span<const Complex> waveform, double tx_power_dbm, std::mt19937_64& rng) {
  check_inside(scene, jammer_pos);
  const std::size_t n = scene.snapshot_len;
  if (waveform.size() < n + kDelayPad) {
    throw DomainError("propagate: waveform needs " + std::to_string(n + kDelayPad) + " samples");
  }
  const auto paths = trace_paths(scene, jammer_pos);
  double shortest = paths.front().length;
  for (const auto& p : paths) shortest = std::min(shortest, p.length);

  const double lambda = geometry.wavelength();
  const double tx_amp = std::sqrt(dbm_to_watts(tx_power_dbm));
  dsp::Channels out;
  for (auto& ch : out) ch.assign(n, Complex(0.0, 0.0));

  for (const auto& p : paths) {
    const auto delay = static_cast<std::size_t>(
        std::llround((p.length - shortest) / kSpeedOfLight * scene.sample_rate));
    if (delay > kDelayPad) continue;
    const double amp = tx_amp * p.gain * lambda / (4.0 * std::numbers::pi * p.length);
    const Complex carrier = std::polar(amp, -2.0 * std::numbers::pi * p.length / lambda);
    const auto steer = steering_vector(geometry, p.direction);
    const std::size_t start = kDelayPad - delay;
    for (std::size_t k = 0; k < kPatches; ++k) {
      const Complex g = carrier * steer[k];
      for (std::size_t i = 0; i < n; ++i) out[k][i] += g * waveform[start + i];
    }
  }
  if (scene.add_noise) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(dbm_to_watts(scene.noise_floor_dbm) / 2.0));
    for (auto& ch : out) {
      for (auto& v : ch) v += Complex(gauss(rng), gauss(rng));
    }
  }
  return out;
}

IQSnapshot propagate(const SceneConfig& scene, const ArrayGeometry& geometry, const Vec3& jammer_pos,
                     std::span<const Complex> waveform, double tx_power_dbm, std::mt19937_64& rng,
                     const JammerProfile& profile, std::string scenario_tag) {
  const auto ch = propagate_channels(scene, geometry, jammer_pos, waveform, tx_power_dbm, rng);
  IQSnapshot s;
  s.snapshot_len = scene.snapshot_len;
  s.samples.reserve(kPatches * s.snapshot_len);
  for (const auto& c : ch) {
    for (const auto& v : c) s.samples.emplace_back(static_cast<float>(v.real()), static_cast<float>(v.imag()));
  }
  const Vec3 d = jammer_pos - scene.antenna_position;
  s.label = Label::from_displacement(d.x, d.y, d.z, static_cast<int>(profile.jammer_class), profile.subclass);
  s.scenario_tag = std::move(scenario_tag);
  return s;
}

}  // namespace jamloc::sim
