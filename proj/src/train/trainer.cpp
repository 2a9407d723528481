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

#include "jamloc/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "jamloc/error.hpp"
#include "jamloc/nn/optim.hpp"
#include "jamloc/sim/geometry.hpp"

namespace jamloc::train {

using nn::Mode;
using nn::Rng;

std::vector<int> TrainConfig::milestones() const {
  std::vector<int> m;
  for (double f : milestone_fractions) {
    const int e = static_cast<int>(std::lround(f * epochs));
    if (e > 0 && e < epochs && (m.empty() || e > m.back())) m.push_back(e);
  }
  return m;
}

void TrainConfig::validate() const {
  if (!(gamma > 0.0)) throw ConfigError("train: gamma must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train: momentum must lie in [0,1)");
  if (weight_decay < 0.0) throw ConfigError("train: weight decay must be nonnegative");
  if (!batch_size) throw ConfigError("train: batch size must be positive");
  if (epochs <= 0) throw ConfigError("train: epochs must be positive");
  if (n_seeds <= 0) throw ConfigError("train: n_seeds must be positive");
  if (clip_grad_norm < 0.0) throw ConfigError("train: clip_grad_norm must be nonnegative");
}

std::vector<model::Prediction> predict(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                                       const dsp::NormalizationSpec& norm, std::size_t batch_size) {
  nn::NoGradGuard guard;
  std::vector<model::Prediction> out;
  out.reserve(data.size());
  Rng unused(0);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    idx.resize(std::min(batch_size, data.size() - start));
    std::iota(idx.begin(), idx.end(), start);
    const auto in = model::make_batch(data, idx, norm, model.required_features());
    auto preds = model::to_predictions(model.forward(in, Mode::Eval, unused));
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

namespace {

std::vector<Label> labels_of(std::span<const dsp::FeatureBundle> data) {
  std::vector<Label> l;
  l.reserve(data.size());
  for (const auto& b : data) l.push_back(b.label);
  return l;
}

}  // namespace

MetricsReport evaluate(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                       const dsp::NormalizationSpec& norm, std::size_t batch_size) {
  const auto preds = predict(model, data, norm, batch_size);
  const auto labels = labels_of(data);
  return compute_metrics(preds, labels);
}

TrainResult train_model(model::Model& model, std::span<const dsp::FeatureBundle> train,
                        std::span<const dsp::FeatureBundle> test, const dsp::NormalizationSpec& norm,
                        const TrainConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (train.empty()) throw DomainError("train: empty training set");
  auto params = model.parameters();
  nn::SgdOptions opt;
  opt.learning_rate = cfg.learning_rate;
  opt.momentum = cfg.momentum;
  opt.weight_decay = cfg.weight_decay;
  opt.milestones = cfg.milestones();
  opt.lr_decay_factor = cfg.lr_decay_factor;
  nn::Sgd sgd(params, opt);

  std::vector<dsp::FeatureBundle> select;
  for (const auto& b : test) {
    if (b.scenario_tag == cfg.select_tag) select.push_back(b);
  }
  std::span<const dsp::FeatureBundle> sel = select.empty() ? test : std::span<const dsp::FeatureBundle>(select);

  LossConfig lc;
  lc.gamma = cfg.gamma;
  lc.kind = cfg.loss;
  auto shuffle_rng = sim::derive_rng(seed, 0x7261696eULL);
  auto dropout_rng = sim::derive_rng(seed, 0x64726f70ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  std::vector<std::vector<double>> best;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> idx(order.data() + start, n);
      try {
        const auto in = model::make_batch(train, idx, norm, model.required_features());
        auto terms = compute_loss(model.forward(in, Mode::Train, dropout_rng), in, lc);
        const double l = terms.total.item();
        if (!std::isfinite(l)) throw NumericError("loss is not finite");
        terms.total.backward();
        if (cfg.clip_grad_norm > 0.0) nn::clip_grad_norm(params, cfg.clip_grad_norm);
        sgd.step(epoch);
        loss_sum += l;
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + " step " +
                           std::to_string(steps) + ": " + e.what());
      }
      ++steps;
    }
    EpochLog log;
    log.epoch = epoch;
    log.learning_rate = sgd.learning_rate(epoch);
    log.train_loss = loss_sum / static_cast<double>(steps);
    const bool last = epoch + 1 == cfg.epochs;
    if (!sel.empty() && (cfg.evaluate_each_epoch || last)) {
      log.test = evaluate(model, sel, norm);
      if (!result.best_test || log.test->delta_d < result.best_test->delta_d) {
        result.best_test = log.test;
        result.best_epoch = epoch;
        best.clear();
        for (const auto& p : params) best.emplace_back(p.data().begin(), p.data().end());
      }
      spdlog::debug("epoch {} lr {:.2e} loss {:.5f} test dd {:.3f} az {:.2f}", epoch, log.learning_rate,
                    log.train_loss, log.test->delta_d, log.test->azimuth_mae);
    } else {
      spdlog::debug("epoch {} lr {:.2e} loss {:.5f}", epoch, log.learning_rate, log.train_loss);
    }
    result.history.push_back(std::move(log));
  }
  if (best.empty()) {
    result.best_epoch = cfg.epochs - 1;
  } else {
    for (std::size_t i = 0; i < params.size(); ++i) std::copy(best[i].begin(), best[i].end(), params[i].data().begin());
  }
  return result;
}

ScenarioEval scenario_eval(const model::Model& model, std::span<const dsp::FeatureBundle> data,
                           const dsp::NormalizationSpec& norm, std::span<const std::string> tags,
                           const sim::Vec3& antenna) {
  std::vector<std::string> order;
  if (tags.empty()) {
    for (const auto& b : data) {
      if (std::find(order.begin(), order.end(), b.scenario_tag) == order.end()) order.push_back(b.scenario_tag);
    }
  } else {
    order.assign(tags.begin(), tags.end());
  }
  ScenarioEval ev;
  for (const auto& tag : order) {
    std::vector<dsp::FeatureBundle> subset;
    for (const auto& b : data) {
      if (b.scenario_tag == tag) subset.push_back(b);
    }
    if (subset.empty()) throw ConfigError("scenario_eval: no samples tagged '" + tag + "'");
    const auto preds = predict(model, subset, norm);
    const auto labels = labels_of(subset);
    ev.reports.push_back({tag, compute_metrics(preds, labels)});
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto& l = labels[i];
      const auto& p = preds[i];
      PositionRecord r;
      r.scenario_tag = tag;
      r.x = antenna.x + l.dx;
      r.y = antenna.y + l.dy;
      r.z = antenna.z + l.dz;
      const double pa = p.azimuth_deg, ta = l.azimuth_deg;
      r.azimuth_error_deg = angular_mae(std::span<const double>(&pa, 1), std::span<const double>(&ta, 1));
      r.distance_error_m = std::hypot(p.disp[0] - l.dx, p.disp[1] - l.dy, p.disp[2] - l.dz);
      ev.positions.push_back(r);
    }
    ev.predictions.insert(ev.predictions.end(), preds.begin(), preds.end());
  }
  return ev;
}

}  // namespace jamloc::train
