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

#include "jamloc/train/metrics.hpp"

#include <cmath>

#include "jamloc/error.hpp"

namespace jamloc::train {

double angular_mae(std::span<const double> pred, std::span<const double> truth, double period) {
  if (pred.empty()) throw DomainError("angular_mae: empty input");
  if (pred.size() != truth.size()) throw ShapeError("angular_mae: length mismatch");
  if (!(period > 0.0)) throw DomainError("angular_mae: period must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = std::abs(std::fmod(pred[i] - truth[i], period));
    acc += std::min(d, period - d);
  }
  return acc / static_cast<double>(pred.size());
}

double linear_mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.empty()) throw DomainError("linear_mae: empty input");
  if (pred.size() != truth.size()) throw ShapeError("linear_mae: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - truth[i]);
  return acc / static_cast<double>(pred.size());
}

double dist_error(double mae_x, double mae_y, double mae_z) {
  return std::sqrt(mae_x * mae_x + mae_y * mae_y + mae_z * mae_z);
}

MetricsReport compute_metrics(std::span<const model::Prediction> preds, std::span<const Label> labels) {
  if (preds.empty()) throw DomainError("compute_metrics: empty input");
  if (preds.size() != labels.size()) throw ShapeError("compute_metrics: length mismatch");
  MetricsReport r;
  r.n = preds.size();
  std::vector<double> pa, ta, pe, te;
  std::vector<int> pc, tc, ps, ts;
  double ex = 0, ey = 0, ez = 0, eu = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    const auto& l = labels[i];
    const double dx = p.disp[0] - l.dx, dy = p.disp[1] - l.dy, dz = p.disp[2] - l.dz;
    ex += std::abs(dx);
    ey += std::abs(dy);
    ez += std::abs(dz);
    eu += std::sqrt(dx * dx + dy * dy + dz * dz);
    pa.push_back(p.azimuth_deg);
    ta.push_back(l.azimuth_deg);
    pe.push_back(p.elevation_deg);
    te.push_back(l.elevation_deg);
    if (!p.class_logits.empty()) {
      pc.push_back(p.predicted_class());
      tc.push_back(l.jammer_class);
    }
    if (!p.subclass_logits.empty()) {
      ps.push_back(p.predicted_subclass());
      ts.push_back(static_cast<int>(l.subclass));
    }
  }
  const double n = static_cast<double>(r.n);
  r.mae_x = ex / n;
  r.mae_y = ey / n;
  r.mae_z = ez / n;
  r.delta_d = dist_error(r.mae_x, r.mae_y, r.mae_z);
  r.mean_euclidean = eu / n;
  r.azimuth_mae = angular_mae(pa, ta);
  r.elevation_mae = linear_mae(pe, te);
  auto hit_rate = [](const std::vector<int>& p, const std::vector<int>& t) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == t[i];
    return 100.0 * static_cast<double>(hit) / static_cast<double>(p.size());
  };
  if (pc.size() == r.n) r.accuracy_classes = hit_rate(pc, tc);
  if (ps.size() == r.n) r.accuracy_subclasses = hit_rate(ps, ts);
  return r;
}

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> truths, std::size_t n) {
  if (preds.size() != truths.size()) throw ShapeError("confusion_matrix: length mismatch");
  ConfusionMatrix m(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int p = preds[i], t = truths[i];
    if (p < 0 || t < 0 || static_cast<std::size_t>(p) >= n || static_cast<std::size_t>(t) >= n) {
      throw DomainError("confusion_matrix: class id out of range");
    }
    ++m[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  std::size_t diag = 0, total = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      total += m[i][j];
      if (i == j) diag += m[i][j];
    }
  }
  if (!total) throw DomainError("accuracy: empty confusion matrix");
  return 100.0 * static_cast<double>(diag) / static_cast<double>(total);
}

MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) throw DomainError("mean_std: empty input");
  MeanStd r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

}  // namespace jamloc::train
