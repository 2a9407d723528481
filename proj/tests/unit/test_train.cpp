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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "jamloc/error.hpp"
#include "jamloc/model/fusion.hpp"
#include "jamloc/train/csv.hpp"
#include "jamloc/train/loss.hpp"
#include "jamloc/train/metrics.hpp"
#include "jamloc/train/sweep.hpp"
#include "jamloc/train/trainer.hpp"
#include "reference_rows.hpp"
#include "synthetic.hpp"

using namespace jamloc;
using namespace jamloc::train;
using model::BatchInputs;
using model::ModelOutput;
using nn::Tensor;
namespace fs = std::filesystem;

namespace {

BatchInputs one_sample(double dx, double dy, double dz) {
  BatchInputs in;
  in.batch = 1;
  const auto l = Label::from_displacement(dx, dy, dz, 0, 0);
  in.disp_target = Tensor::from({1, 3}, {dx, dy, dz});
  in.azimuth_deg = {l.azimuth_deg};
  in.elevation_deg = {l.elevation_deg};
  in.classes = {0};
  in.subclasses = {0};
  return in;
}

ModelOutput output(std::vector<double> disp, std::vector<double> angle) {
  ModelOutput o;
  o.disp = Tensor::from({1, 3}, std::move(disp), true);
  o.angle_raw = Tensor::from({1, 2}, std::move(angle), true);
  return o;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

struct Data {
  std::vector<dsp::FeatureBundle> train, test;
  dsp::NormalizationSpec norm;
};

const Data& data() {
  static const Data d = [] {
    Data x;
    x.train = jamloc::testing::simulated_bundles(24, 3);
    x.test = jamloc::testing::simulated_bundles(8, 4);
    auto walls = jamloc::testing::simulated_bundles(6, 5, "Wall 1");
    x.test.insert(x.test.end(), walls.begin(), walls.end());
    x.norm = dsp::fit_normalization(x.train);
    return x;
  }();
  return d;
}

TrainConfig quick_config() {
  TrainConfig c;
  c.epochs = 3;
  c.batch_size = 8;
  return c;
}

}  // namespace

TEST_CASE("perfect prediction has zero loss") {
  const auto in = one_sample(3.0, 4.0, 1.0);
  const auto out = output({3.0, 4.0, 1.0}, {in.azimuth_deg[0] / 180.0, in.elevation_deg[0] / 90.0});
  const auto t = compute_loss(out, in, {});
  CHECK(t.total.item() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("gamma scales only the displacement gradient") {
  const auto in = one_sample(3.0, 4.0, 1.0);
  auto grad_of = [&](double gamma) {
    auto out = output({1.0, 2.0, -1.0}, {0.1, 0.2});
    LossConfig c;
    c.gamma = gamma;
    compute_loss(out, in, c).total.backward();
    double n2 = 0.0;
    for (double g : out.disp.grad()) n2 += g * g;
    return std::pair{std::sqrt(n2), std::vector<double>(out.angle_raw.grad().begin(), out.angle_raw.grad().end())};
  };
  const auto [small, a1] = grad_of(0.001);
  const auto [large, a2] = grad_of(10.0);
  CHECK(small / large == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(a1 == a2);
  LossConfig bad;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(compute_loss(output({0, 0, 0}, {0, 0}), in, bad), DomainError);
}

TEST_CASE("circular azimuth target picks the nearest wrap") {
  // Candidates for -179 degrees: -0.99444, 1.00556, -2.99444.
  const double t = circular_target(0.99, -179.0);
  CHECK(t == doctest::Approx(-179.0 / 180.0 + 2.0));
  auto in = one_sample(-1.0, -0.01745, 0.0);
  in.azimuth_deg = {-179.0};
  in.elevation_deg = {0.0};
  const auto out = output({-1.0, -0.01745, 0.0}, {0.99, 0.0});
  const double loss = compute_loss(out, in, {}).azimuth.item();
  const double naive = std::pow(0.99 - (-179.0 / 180.0), 2);
  CHECK(loss == doctest::Approx(std::pow(0.99 - t, 2)));
  CHECK(loss < naive / 1000.0);
}

TEST_CASE("l1 regression loss") {
  const auto in = one_sample(1.0, 1.0, 1.0);
  LossConfig c;
  c.kind = RegressionLoss::L1;
  const auto t = compute_loss(output({2.0, 1.0, 0.0}, {0.25, 0.0}), in, c);
  CHECK(t.disp.item() == doctest::Approx(2.0 / 3.0));
  CHECK(regression_loss_from_string("l1") == RegressionLoss::L1);
  CHECK_THROWS_AS(regression_loss_from_string("huber"), ConfigError);
}

TEST_CASE("angular error wraps around") {
  const std::vector<double> p{179.0, 10.0, -90.0}, t{-179.0, 10.0, 90.0};
  CHECK(angular_mae(std::span(p).first(1), std::span(t).first(1)) == doctest::Approx(2.0));
  CHECK(angular_mae(std::span(p).subspan(1, 1), std::span(t).subspan(1, 1)) == 0.0);
  CHECK(angular_mae(p, t) == doctest::Approx((2.0 + 0.0 + 180.0) / 3.0));
}

TEST_CASE("uniform angles have a mean circular distance of 90 degrees") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-180.0, 180.0);
  std::vector<double> a(100000), b(100000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  CHECK(std::abs(angular_mae(a, b) - 90.0) < 2.0);
}

TEST_CASE("distance error reproduces reference aggregates") {
  for (const auto& r : jamloc::testing::kMethodRows) {
    INFO(r.method);
    CHECK(std::abs(dist_error(r.mae_x, r.mae_y, r.mae_z) - r.delta_d) <= 0.005);
  }
  for (const auto& r : jamloc::testing::kScenarioRows) {
    INFO(r.method);
    CHECK(std::abs(dist_error(r.mae_x, r.mae_y, r.mae_z) - r.delta_d) <= 0.005);
  }
  CHECK(dist_error(0, 0, 0) == 0.0);
}

TEST_CASE("compute_metrics") {
  std::vector<Label> labels{Label::from_displacement(1, 2, 0, 0, 0), Label::from_displacement(-3, 1, 2, 1, 0)};
  std::vector<model::Prediction> preds(2);
  preds[0].disp = {2, 2, 0};
  preds[1].disp = {-3, -1, 2};
  preds[0].azimuth_deg = labels[0].azimuth_deg + 10.0;
  preds[1].azimuth_deg = labels[1].azimuth_deg - 20.0;
  preds[0].elevation_deg = labels[0].elevation_deg;
  preds[1].elevation_deg = labels[1].elevation_deg + 4.0;
  preds[0].class_logits = {1.0, 0.0};
  preds[1].class_logits = {2.0, 0.0};
  const auto m = compute_metrics(preds, labels);
  CHECK(m.n == 2);
  CHECK(m.mae_x == doctest::Approx(0.5));
  CHECK(m.mae_y == doctest::Approx(1.0));
  CHECK(m.mae_z == doctest::Approx(0.0));
  CHECK(m.delta_d == doctest::Approx(std::sqrt(1.25)));
  CHECK(m.mean_euclidean == doctest::Approx(1.5));
  CHECK(m.azimuth_mae == doctest::Approx(15.0));
  CHECK(m.elevation_mae == doctest::Approx(2.0));
  REQUIRE(m.accuracy_classes);
  CHECK(*m.accuracy_classes == doctest::Approx(50.0));
  CHECK_FALSE(m.accuracy_subclasses);
}

TEST_CASE("confusion matrix") {
  const std::vector<int> truth{0, 1, 2, 2, 1, 0, 2};
  const auto perfect = confusion_matrix(truth, truth, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(perfect[i][j] == 0);
  CHECK(accuracy(perfect) == 100.0);
  const std::vector<int> pred{0, 2, 2, 1, 1, 0, 0};
  const auto m = confusion_matrix(pred, truth, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t row = 0;
    for (auto v : m[i]) row += v;
    CHECK(row == static_cast<std::size_t>(std::count(truth.begin(), truth.end(), static_cast<int>(i))));
  }
  CHECK(m[1][2] == 1);
  CHECK(accuracy(m) == doctest::Approx(400.0 / 7.0));
  CHECK_THROWS_AS(confusion_matrix(std::vector<int>{3}, std::vector<int>{0}, 3), DomainError);
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = mean_std(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(mean_std(std::vector<double>{7.0}).std == 0.0);
}

TEST_CASE("sweep grids") {
  const auto g = gamma_grid();
  REQUIRE(g.size() == 6);
  CHECK(g.front().gamma == 0.001);
  CHECK(g.back().gamma == 10.0);
  const auto d = dropout_grid(1.0);
  REQUIRE(d.size() == 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(d[i].p_pre == dropout_values()[i]);
    CHECK(d[i].p_post == 0.0);
    CHECK(d[3 + i].p_post == dropout_values()[i]);
    CHECK(d[3 + i].p_pre == 0.0);
  }
}

TEST_CASE("best cell is a unique argmin with documented tie breaks") {
  auto make = [](double gamma, double pre, double post, double dd, double az) {
    SweepSummary s;
    s.cell = {gamma, pre, post};
    s.delta_d.mean = dd;
    s.azimuth.mean = az;
    return s;
  };
  std::vector<SweepSummary> s{make(1.0, 0.1, 0, 2.0, 10), make(0.1, 0.1, 0, 1.5, 12), make(10, 0.1, 0, 1.7, 9)};
  CHECK(best_cell(s) == 1);
  CHECK(best_cell(s, SweepObjective::Azimuth) == 2);
  s.push_back(make(0.01, 0.1, 0, 1.5, 12));
  CHECK(best_cell(s) == 3);  // smaller gamma wins the tie
  std::vector<SweepSummary> d{make(1, 0.3, 0, 1.0, 1), make(1, 0, 0.1, 1.0, 1), make(1, 0.1, 0, 1.0, 1)};
  CHECK(best_cell(d) == 1);  // then the smaller total dropout, then the earlier cell
}

TEST_CASE("train config") {
  TrainConfig c;
  c.epochs = 20;
  CHECK(c.milestones() == std::vector<int>{12, 17});
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("training is deterministic and restores the best epoch") {
  const auto& d = data();
  auto run = [&] {
    model::FusionModel m(model::FusionConfig::tiny(), 5);
    const auto r = train_model(m, d.train, d.test, d.norm, quick_config(), 9);
    return std::pair{r, evaluate(m, std::span(d.test).first(8), d.norm)};
  };
  const auto [a, ea] = run();
  const auto [b, eb] = run();
  REQUIRE(a.history.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.history[e].train_loss == b.history[e].train_loss);
    CHECK(a.history[e].learning_rate == b.history[e].learning_rate);
  }
  REQUIRE(a.best_test);
  // Selection uses the Random-tagged test samples only.
  CHECK(ea.delta_d == doctest::Approx(a.best_test->delta_d).epsilon(1e-12));
  CHECK(ea.azimuth_mae == eb.azimuth_mae);
  double best = 1e30;
  for (const auto& h : a.history) best = std::min(best, h.test->delta_d);
  CHECK(a.best_test->delta_d == best);
}

TEST_CASE("training reduces the loss") {
  const auto& d = data();
  model::FusionModel m(model::FusionConfig::tiny(), 6);
  auto c = quick_config();
  c.epochs = 8;
  c.learning_rate = 5e-3;
  const auto r = train_model(m, d.train, {}, d.norm, c, 1);
  CHECK(r.history.back().train_loss < r.history.front().train_loss);
}

TEST_CASE("scenario evaluation") {
  const auto& d = data();
  model::FusionModel m(model::FusionConfig::tiny(), 7);
  const auto ev = scenario_eval(m, d.test, d.norm);
  REQUIRE(ev.reports.size() == 2);
  CHECK(ev.reports[0].scenario_tag == "Random");
  CHECK(ev.reports[1].scenario_tag == "Wall 1");
  CHECK(ev.reports[0].metrics.n == 8);
  CHECK(ev.positions.size() == d.test.size());
  CHECK(ev.positions[0].x == doctest::Approx(d.test[0].label.dx + 20.0));
  const std::vector<std::string> missing{"Wall 4"};
  CHECK_THROWS_AS(scenario_eval(m, d.test, d.norm, missing), ConfigError);
}

TEST_CASE("sweep runs every cell and seed independent of jobs") {
  const auto& d = data();
  const ModelFactory factory = [](const SweepCell& c, std::uint64_t s) {
    auto cfg = model::FusionConfig::tiny();
    cfg.dropout_pre_concat = c.p_pre;
    cfg.dropout_post_head = c.p_post;
    return std::make_unique<model::FusionModel>(cfg, s);
  };
  auto c = quick_config();
  c.epochs = 1;
  const auto cells = gamma_grid();
  const std::span<const dsp::FeatureBundle> test = std::span(d.test).first(8);
  const auto a = run_sweep(factory, d.train, test, d.norm, c, cells, 2, 3, 1);
  const auto b = run_sweep(factory, d.train, test, d.norm, c, cells, 2, 3, 3);
  CHECK(a.rows.size() == 12);
  CHECK(a.summaries.size() == 6);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].metrics.delta_d == b.rows[i].metrics.delta_d);
  CHECK(a.best == b.best);
  CHECK(a.summaries[0].n_seeds == 2);

  const auto dir = fs::temp_directory_path() / "jamloc_sweep_csv";
  fs::create_directories(dir);
  write_sweep_csv(dir / "s.csv", a);
  // header + cells*seeds runs + cells summaries + best
  CHECK(count_lines(dir / "s.csv") == 1 + 12 + 6 + 1);
  fs::remove_all(dir);
  CHECK_THROWS_AS(run_sweep(factory, d.train, test, d.norm, c, {}, 2, 3, 1), ConfigError);
}

TEST_CASE("csv formatting is fixed precision") {
  CHECK(fmt(1.0) == "1.000000");
  CHECK(fmt(-0.1234567) == "-0.123457");
}
