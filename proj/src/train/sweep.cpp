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

#include "jamloc/train/sweep.hpp"

#include <atomic>
#include <thread>

#include "jamloc/error.hpp"

namespace jamloc::train {

const std::vector<double>& gamma_values() {
  static const std::vector<double> v{1.0 / 1000, 1.0 / 100, 1.0 / 10, 1.0 / 5, 1.0, 10.0};
  return v;
}

const std::vector<double>& dropout_values() {
  static const std::vector<double> v{0.1, 0.3, 0.5};
  return v;
}

std::vector<SweepCell> gamma_grid(double p_pre, double p_post) {
  std::vector<SweepCell> cells;
  for (double g : gamma_values()) cells.push_back({g, p_pre, p_post});
  return cells;
}

std::vector<SweepCell> dropout_grid(double gamma) {
  std::vector<SweepCell> cells;
  for (double p : dropout_values()) cells.push_back({gamma, p, 0.0});
  for (double p : dropout_values()) cells.push_back({gamma, 0.0, p});
  return cells;
}

std::size_t best_cell(std::span<const SweepSummary> s, SweepObjective objective) {
  if (s.empty()) throw DomainError("best_cell: empty sweep");
  auto value = [&](const SweepSummary& x) {
    return objective == SweepObjective::DeltaD ? x.delta_d.mean : x.azimuth.mean;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto& a = s[i];
    const auto& b = s[best];
    const double va = value(a), vb = value(b);
    if (va != vb) {
      if (va < vb) best = i;
      continue;
    }
    if (a.cell.gamma != b.cell.gamma) {
      if (a.cell.gamma < b.cell.gamma) best = i;
      continue;
    }
    if (a.cell.p_pre + a.cell.p_post < b.cell.p_pre + b.cell.p_post) best = i;
  }
  return best;
}

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows, std::span<const SweepCell> cells) {
  std::vector<SweepSummary> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> dd, mx, my, mz, az, el;
    for (const auto& r : rows) {
      if (r.cell.gamma != cells[c].gamma || r.cell.p_pre != cells[c].p_pre || r.cell.p_post != cells[c].p_post) {
        continue;
      }
      dd.push_back(r.metrics.delta_d);
      mx.push_back(r.metrics.mae_x);
      my.push_back(r.metrics.mae_y);
      mz.push_back(r.metrics.mae_z);
      az.push_back(r.metrics.azimuth_mae);
      el.push_back(r.metrics.elevation_mae);
    }
    if (dd.empty()) throw DomainError("summarize: cell without rows");
    SweepSummary s;
    s.cell = cells[c];
    s.n_seeds = static_cast<int>(dd.size());
    s.delta_d = mean_std(dd);
    s.mae_x = mean_std(mx);
    s.mae_y = mean_std(my);
    s.mae_z = mean_std(mz);
    s.azimuth = mean_std(az);
    s.elevation = mean_std(el);
    out.push_back(s);
  }
  return out;
}

SweepResult run_sweep(const ModelFactory& factory, std::span<const dsp::FeatureBundle> train,
                      std::span<const dsp::FeatureBundle> test, const dsp::NormalizationSpec& norm,
                      const TrainConfig& base, std::span<const SweepCell> cells, int n_seeds, std::uint64_t base_seed,
                      std::size_t jobs, SweepObjective objective) {
  if (cells.empty()) throw ConfigError("sweep: empty grid");
  if (n_seeds <= 0) throw ConfigError("sweep: n_seeds must be positive");
  const std::size_t total = cells.size() * static_cast<std::size_t>(n_seeds);
  SweepResult result;
  result.rows.resize(total);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(std::max<std::size_t>(jobs, 1));
  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t k = next++; k < total; k = next++) {
        const auto& cell = cells[k / static_cast<std::size_t>(n_seeds)];
        const int s = static_cast<int>(k % static_cast<std::size_t>(n_seeds));
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
        TrainConfig cfg = base;
        cfg.gamma = cell.gamma;
        auto m = factory(cell, seed);
        train_model(*m, train, test, norm, cfg, seed);
        result.rows[k] = {cell, s, evaluate(*m, test, norm)};
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next = total;
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, total);
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.summaries = summarize(result.rows, cells);
  result.best = best_cell(result.summaries, objective);
  return result;
}

}  // namespace jamloc::train
