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

#include "jamloc/sim/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "jamloc/error.hpp"

namespace jamloc::sim {

TrajectoryKind trajectory_from_string(const std::string& s) {
  if (s == "circles") return TrajectoryKind::Circles;
  if (s == "grid_circles") return TrajectoryKind::GridCircles;
  if (s == "meander") return TrajectoryKind::Meander;
  throw ConfigError("unknown trajectory kind '" + s + "' (circles|grid_circles|meander)");
}

const char* to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Circles: return "circles";
    case TrajectoryKind::GridCircles: return "grid_circles";
    case TrajectoryKind::Meander: return "meander";
  }
  return "?";
}

std::vector<double> default_heights() { return {3.9, 4.4, 4.9, 5.4}; }

namespace {

void add_circles(std::vector<Vec3>& out, double cx, double cy, const TrajectoryParams& p,
                 const std::vector<double>& heights) {
  for (double z : heights) {
    for (double r : p.radii) {
      for (std::size_t i = 0; i < p.points_per_circle; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(p.points_per_circle);
        out.push_back({cx + r * std::cos(a), cy + r * std::sin(a), z});
      }
    }
  }
}

}  // namespace

std::vector<Vec3> gen_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                                 const std::vector<double>& heights) {
  if (heights.empty()) throw DomainError("gen_trajectory: heights must not be empty");
  std::vector<Vec3> out;
  switch (kind) {
    case TrajectoryKind::Circles:
    case TrajectoryKind::GridCircles: {
      if (params.radii.empty()) throw DomainError("gen_trajectory: no radii");
      for (double r : params.radii) {
        if (!(r > 0.0)) throw DomainError("gen_trajectory: radius must be positive, got " + std::to_string(r));
      }
      if (params.points_per_circle == 0) throw DomainError("gen_trajectory: points_per_circle must be positive");
      if (kind == TrajectoryKind::Circles) {
        add_circles(out, params.center_x, params.center_y, params, heights);
      } else {
        const double h = params.grid_spacing / 2.0;
        for (double sy : {-h, h}) {
          for (double sx : {-h, h}) add_circles(out, params.center_x + sx, params.center_y + sy, params, heights);
        }
      }
      break;
    }
    case TrajectoryKind::Meander: {
      if (params.rows == 0 || params.points_per_row < 2) throw DomainError("gen_trajectory: meander needs rows and >= 2 points per row");
      if (!(params.x_max > params.x_min) || !(params.y_max >= params.y_min)) {
        throw DomainError("gen_trajectory: empty meander rectangle");
      }
      for (double z : heights) {
        for (std::size_t r = 0; r < params.rows; ++r) {
          const double y = params.rows == 1 ? params.y_min
                                            : params.y_min + (params.y_max - params.y_min) * static_cast<double>(r) /
                                                                 static_cast<double>(params.rows - 1);
          for (std::size_t i = 0; i < params.points_per_row; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(params.points_per_row - 1);
            const double x = (r % 2 == 0) ? params.x_min + f * (params.x_max - params.x_min)
                                          : params.x_max - f * (params.x_max - params.x_min);
            out.push_back({x, y, z});
          }
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace jamloc::sim
