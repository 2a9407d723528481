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

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "jamloc/sim/snapshot.hpp"

namespace jamloc::sim {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kGpsL1Hz = 1.57542e9;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 unit() const { return *this * (1.0 / norm()); }
  bool operator==(const Vec3&) const = default;
};

// Four patch elements relative to the array centre.
struct ArrayGeometry {
  std::array<Vec3, kPatches> elements{};
  double carrier_hz = kGpsL1Hz;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }

  // 2x2 square in the x-z plane (broadside +y), half-wavelength spacing.
  // Patch order: 0 (-x,+z), 1 (+x,+z), 2 (-x,-z), 3 (+x,-z).
  static ArrayGeometry square(double carrier_hz = kGpsL1Hz);
  double spacing() const { return (elements[1] - elements[0]).norm(); }
};

// exp(-j 2 pi (e_k . u) / lambda) for propagation direction u (unit vector
// pointing from the source towards the array).
std::array<std::complex<double>, kPatches> steering_vector(const ArrayGeometry& geometry, const Vec3& u);

// Independent generator for item `index` of a run seeded with `seed`.
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace jamloc::sim
