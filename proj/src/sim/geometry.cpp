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

#include "jamloc/sim/geometry.hpp"

#include <numbers>

namespace jamloc::sim {

ArrayGeometry ArrayGeometry::square(double carrier_hz) {
  ArrayGeometry g;
  g.carrier_hz = carrier_hz;
  const double h = g.wavelength() / 4.0;  // half of the lambda/2 spacing
  g.elements = {Vec3{-h, 0.0, h}, Vec3{h, 0.0, h}, Vec3{-h, 0.0, -h}, Vec3{h, 0.0, -h}};
  return g;
}

std::array<std::complex<double>, kPatches> steering_vector(const ArrayGeometry& geometry, const Vec3& u) {
  std::array<std::complex<double>, kPatches> a;
  const double k = 2.0 * std::numbers::pi / geometry.wavelength();
  for (std::size_t i = 0; i < kPatches; ++i) a[i] = std::polar(1.0, -k * geometry.elements[i].dot(u));
  return a;
}

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (index * 0xd1b54a32d192ed03ULL);
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace jamloc::sim
