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

#include <string>
#include <vector>

#include "jamloc/sim/geometry.hpp"

namespace jamloc::sim {

enum class TrajectoryKind { Circles, GridCircles, Meander };

TrajectoryKind trajectory_from_string(const std::string& s);
const char* to_string(TrajectoryKind k);

std::vector<double> default_heights();  // {3.9, 4.4, 4.9, 5.4} m

struct TrajectoryParams {
  double center_x = 20.0, center_y = 15.0;
  std::vector<double> radii{3.0, 5.0, 7.0, 9.0, 11.0};
  std::size_t points_per_circle = 125;
  // GridCircles: 2x2 centres at (centre ± grid_spacing/2) each carrying `radii`.
  double grid_spacing = 10.0;
  // Meander rectangle and sampling.
  double x_min = 12.0, x_max = 28.0, y_min = 8.0, y_max = 20.0;
  std::size_t rows = 6;
  std::size_t points_per_row = 20;
};

// Circles: |radii| circles x |heights|; GridCircles: 4 x that; Meander: one
// boustrophedon sweep (alternating x direction per row) per height.
std::vector<Vec3> gen_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                                 const std::vector<double>& heights);

}  // namespace jamloc::sim
