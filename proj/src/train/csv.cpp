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

#include "jamloc/train/csv.hpp"

#include <cstdio>
#include <fstream>

#include "jamloc/error.hpp"

namespace jamloc::train {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

void write_metrics_csv(const std::filesystem::path& path, std::span<const ScenarioReport> reports) {
  auto out = open(path);
  out << "scenario,n,mae_x,mae_y,mae_z,delta_d,mean_euclidean,azimuth_mae,elevation_mae,accuracy_classes,"
         "accuracy_subclasses\n";
  for (const auto& r : reports) {
    const auto& m = r.metrics;
    out << r.scenario_tag << ',' << m.n << ',' << fmt(m.mae_x) << ',' << fmt(m.mae_y) << ',' << fmt(m.mae_z) << ','
        << fmt(m.delta_d) << ',' << fmt(m.mean_euclidean) << ',' << fmt(m.azimuth_mae) << ','
        << fmt(m.elevation_mae) << ',' << opt(m.accuracy_classes) << ',' << opt(m.accuracy_subclasses) << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
  auto out = open(path);
  out << "kind,gamma,p_pre,p_post,seed,delta_d,mae_x,mae_y,mae_z,azimuth_mae,elevation_mae,delta_d_std,mae_x_std,"
         "mae_y_std,mae_z_std,azimuth_mae_std,elevation_mae_std\n";
  auto cell = [](const SweepCell& c) { return fmt(c.gamma) + ',' + fmt(c.p_pre) + ',' + fmt(c.p_post); };
  for (const auto& r : result.rows) {
    const auto& m = r.metrics;
    out << "run," << cell(r.cell) << ',' << r.seed << ',' << fmt(m.delta_d) << ',' << fmt(m.mae_x) << ','
        << fmt(m.mae_y) << ',' << fmt(m.mae_z) << ',' << fmt(m.azimuth_mae) << ',' << fmt(m.elevation_mae)
        << ",,,,,,\n";
  }
  auto summary = [&](const char* kind, const SweepSummary& s) {
    out << kind << ',' << cell(s.cell) << ',' << s.n_seeds << ',' << fmt(s.delta_d.mean) << ',' << fmt(s.mae_x.mean)
        << ',' << fmt(s.mae_y.mean) << ',' << fmt(s.mae_z.mean) << ',' << fmt(s.azimuth.mean) << ','
        << fmt(s.elevation.mean) << ',' << fmt(s.delta_d.std) << ',' << fmt(s.mae_x.std) << ',' << fmt(s.mae_y.std)
        << ',' << fmt(s.mae_z.std) << ',' << fmt(s.azimuth.std) << ',' << fmt(s.elevation.std) << '\n';
  };
  for (const auto& s : result.summaries) summary("summary", s);
  if (!result.summaries.empty()) summary("best", result.summaries[result.best]);
}

void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& m) {
  auto out = open(path);
  out << "truth";
  for (std::size_t j = 0; j < m.size(); ++j) out << ",pred_" << j;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << i;
    for (auto c : m[i]) out << ',' << c;
    out << '\n';
  }
}

void write_per_position_csv(const std::filesystem::path& path, std::span<const PositionRecord> records) {
  auto out = open(path);
  out << "scenario,x,y,z,azimuth_error_deg,distance_error_m\n";
  for (const auto& r : records) {
    out << r.scenario_tag << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.z) << ',' << fmt(r.azimuth_error_deg)
        << ',' << fmt(r.distance_error_m) << '\n';
  }
}

}  // namespace jamloc::train
