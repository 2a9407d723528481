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

#include <filesystem>
#include <numeric>

#include "gradcheck.hpp"
#include "jamloc/error.hpp"
#include "jamloc/model/checkpoint.hpp"
#include "jamloc/model/fusion.hpp"
#include "jamloc/model/mcaff.hpp"
#include "jamloc/train/loss.hpp"
#include "synthetic.hpp"

using namespace jamloc;
using namespace jamloc::model;
using jamloc::testing::gradcheck;
using jamloc::testing::random_tensor;

namespace {

const std::vector<dsp::FeatureBundle>& bundles() {
  static const auto b = jamloc::testing::simulated_bundles(6, 5);
  return b;
}

const dsp::NormalizationSpec& norm() {
  static const auto n = dsp::fit_normalization(bundles());
  return n;
}

BatchInputs batch(std::vector<std::size_t> idx = {0, 1}) { return make_batch(bundles(), idx, norm(), dsp::kAllFeatures); }

double end_to_end_error(const Model& m, BatchInputs in) {
  train::LossConfig lc;
  lc.gamma = 0.7;
  auto params = m.parameters();
  jamloc::testing::jitter_biases(params);
  auto f = [&] {
    Rng r(3);
    return train::compute_loss(m.forward(in, Mode::Train, r), in, lc).total;
  };
  const auto rep = gradcheck(f, params, {}, 12);
  INFO("worst tensor ", rep.worst_name, " rel ", rep.worst);
  return rep.worst;
}

bool same_values(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

}  // namespace

TEST_CASE("make_batch shapes and targets") {
  const auto in = batch({0, 2, 3});
  CHECK(in.batch == 3);
  CHECK(in.spectrogram.shape() == nn::Shape{3, 4, 32, 32});
  CHECK(in.iq.shape() == nn::Shape{3, 8, 1024});
  CHECK(in.aoa.shape() == nn::Shape{3, 4, 22});
  CHECK(in.cfo.shape() == nn::Shape{3, 4, 1024});
  CHECK(in.stft.shape() == nn::Shape{3, 4, 128, 15});
  CHECK(in.disp_target.data()[3] == bundles()[2].label.dx);
  CHECK(in.azimuth_deg[2] == bundles()[3].label.azimuth_deg);
  const auto some = make_batch(bundles(), std::vector<std::size_t>{0}, norm(), dsp::kAoa);
  CHECK_FALSE(some.iq.defined());
  CHECK(some.aoa.defined());
}

TEST_CASE("fusion model dimensions") {
  FusionModel m(FusionConfig{}, 1);
  auto in = batch();
  Rng r(0);
  CHECK(m.spec_encoder(in.spectrogram, Mode::Eval, r).shape() == nn::Shape{2, 128});
  CHECK(m.iq_encoder(in.iq, Mode::Eval, r).shape() == nn::Shape{2, 128});
  CHECK(m.aoa_encoder(in.aoa, Mode::Eval, r).shape() == nn::Shape{2, 32});
  CHECK(m.fused(in, Mode::Eval, r).shape() == nn::Shape{2, 288});
  CHECK(m.config().fused_dim() == 288);
  const auto out = m.forward(in, Mode::Eval, r);
  CHECK(out.disp.shape() == nn::Shape{2, 3});
  CHECK(out.angle_raw.shape() == nn::Shape{2, 2});
  CHECK_FALSE(out.class_logits.defined());
  for (double v : out.angle_raw.data()) CHECK(std::abs(v) < 1.0);
  for (const auto& p : to_predictions(out)) {
    CHECK(std::abs(p.azimuth_deg) < 180.0);
    CHECK(std::abs(p.elevation_deg) < 90.0);
  }
}

TEST_CASE("fusion parameter counts are deterministic") {
  CHECK(FusionModel(FusionConfig{}, 1).parameter_count() == 651989);
  CHECK(FusionModel(FusionConfig{}, 2).parameter_count() == 651989);
  auto c = FusionConfig{};
  c.branches = kSpecBranch;
  CHECK(FusionModel(c, 1).parameter_count() == 248757);
  c.branches = kIqBranch;
  CHECK(FusionModel(c, 1).parameter_count() == 369189);
  c.branches = kAoaBranch;
  CHECK(FusionModel(c, 1).parameter_count() == 41221);
}

TEST_CASE("iq receptive field covers the dilation stack") {
  FusionModel m(FusionConfig{}, 1);
  // 2 * kernel * (1 + 2 + 4 + 8 + 16)
  CHECK(m.iq_receptive_field() >= 2 * 3 * 31);
}

TEST_CASE("fusion eval is deterministic and train-mode dropout is seeded") {
  FusionModel m(FusionConfig{}, 4);
  auto in = batch();
  Rng a(1), b(1);
  CHECK(same_values(m.forward(in, Mode::Eval, a).disp, m.forward(in, Mode::Eval, b).disp));
  Rng c(5), d(5), e(6);
  const auto t1 = m.forward(in, Mode::Train, c).disp;
  CHECK(same_values(t1, m.forward(in, Mode::Train, d).disp));
  CHECK_FALSE(same_values(t1, m.forward(in, Mode::Train, e).disp));
}

TEST_CASE("zero spectrogram gives the bias-propagated constant") {
  FusionModel m(FusionConfig{}, 2);
  Rng r(0);
  const auto z = Tensor::zeros({2, 4, 32, 32});
  const auto y = m.spec_encoder(z, Mode::Eval, r);
  for (std::size_t j = 0; j < 128; ++j) CHECK(y.data()[j] == y.data()[128 + j]);
  CHECK(same_values(y, m.spec_encoder(z, Mode::Eval, r)));
}

TEST_CASE("aoa encoder is patch-order aware") {
  FusionModel m(FusionConfig{}, 3);
  auto in = batch({0});
  auto permuted = in.aoa.clone();
  auto src = in.aoa.data();
  auto dst = permuted.data();
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 22; ++j) dst[((k + 1) % 4) * 22 + j] = src[k * 22 + j];
  Rng r(0);
  CHECK_FALSE(same_values(m.aoa_encoder(in.aoa, Mode::Eval, r), m.aoa_encoder(permuted, Mode::Eval, r)));
}

TEST_CASE("kernel-1 conv equals a per-position dense map") {
  std::mt19937_64 rng(1);
  auto x = random_tensor({2, 5, 7}, rng);
  auto w = random_tensor({3, 5, 1}, rng);
  auto b = random_tensor({3}, rng);
  const auto y = nn::ops::conv1d(x, w, b, {});
  const auto xt = nn::ops::reshape(nn::ops::transpose_last2(x), {14, 5});
  const auto d = nn::ops::linear(xt, nn::ops::reshape(w, {3, 5}), b);  // [B*L, 3]
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t o = 0; o < 3; ++o)
      for (std::size_t l = 0; l < 7; ++l)
        CHECK(y.data()[(n * 3 + o) * 7 + l] == doctest::Approx(d.data()[(n * 7 + l) * 3 + o]).epsilon(1e-14));
}

TEST_CASE("fusion config validation and json") {
  auto c = FusionConfig{};
  c.branches = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FusionConfig{};
  c.iq_dilations = {1, 2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = FusionConfig::tiny();
  c.with_classifier = true;
  const auto back = FusionConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}

TEST_CASE("end-to-end gradient of the tiny fusion model") {
  auto cfg = FusionConfig::tiny();
  cfg.with_classifier = true;
  cfg.dropout_pre_concat = 0.2;
  cfg.dropout_post_head = 0.2;
  FusionModel m(cfg, 11);
  CHECK(end_to_end_error(m, batch()) < 1e-3);
}

TEST_CASE("end-to-end gradient of the tiny McAFF model") {
  auto cfg = McaffConfig::tiny();
  cfg.dropout_post_head = 0.2;
  McaffModel m(cfg, 12);
  auto in = batch();
  for (auto& s : in.subclasses) s %= static_cast<int>(cfg.n_subclasses);
  CHECK(end_to_end_error(m, in) < 1e-3);
}

TEST_CASE("mcaff concat width and path ablation arithmetic") {
  McaffModel full(McaffConfig{}, 1);
  auto in = batch();
  Rng r(0);
  CHECK(full.fused(in, Mode::Eval, r).shape() == nn::Shape{2, 4 * 64, 8, 8});
  for (auto p : {McaffPath::IQ, McaffPath::FFT, McaffPath::CFO, McaffPath::STFT}) {
    CHECK(full.path_features(p, in, Mode::Eval, r).shape() == nn::Shape{2, 64, 8, 8});
    auto cfg = McaffConfig{};
    cfg.enabled[static_cast<unsigned>(p)] = false;
    McaffModel less(cfg, 1);
    CHECK(full.parameter_count() - less.parameter_count() == full.stem_parameter_count(p));
  }
  CHECK(full.parameter_count() == 654195);
  CHECK(McaffModel(McaffConfig::preset("IQ"), 1).parameter_count() == 605011);
}

TEST_CASE("mcaff presets") {
  CHECK(McaffConfig::preset_names().size() == 6);
  for (const auto& name : McaffConfig::preset_names()) CHECK(McaffConfig::preset(name).preset_name() == name);
  CHECK(McaffConfig::preset("IQ").enabled_count() == 1);
  CHECK_THROWS_AS(McaffConfig::preset("IQ+XYZ"), ConfigError);
  auto c = McaffConfig{};
  c.enabled = {false, false, false, false};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(McaffConfig::from_json(McaffConfig::preset("FFT+CFO").to_json()).preset_name() == "FFT+CFO");
  CHECK(McaffModel(McaffConfig::preset("FFT"), 1).required_features() == dsp::kSpectrogram);
}

TEST_CASE("shared attention") {
  McaffModel m(McaffConfig{}, 2);
  // One parameter set, registered once, applied to every path.
  const auto att = m.attention().parameters();
  REQUIRE(att.size() == 4);
  const auto all = m.parameters();
  for (const auto& a : att) CHECK(std::count_if(all.begin(), all.end(), [&](const Tensor& t) { return t.id() == a.id(); }) == 1);

  auto in = batch();
  Rng r(0);
  for (auto p : {McaffPath::IQ, McaffPath::STFT}) {
    const auto x = m.path_features(p, in, Mode::Eval, r);
    const auto g = m.attention().gate(x, Mode::Eval, r);
    for (double v : g.data()) CHECK((v > 0.0 && v < 1.0));
    const auto y = m.attention().forward(x, Mode::Eval, r);
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(std::abs(y.data()[i]) <= std::abs(x.data()[i]));
  }
  const auto zero = m.attention().forward(Tensor::zeros({1, 64, 8, 8}), Mode::Eval, r);
  for (double v : zero.data()) CHECK(v == 0.0);
}

TEST_CASE("mcaff logits and softmax") {
  McaffModel m(McaffConfig{}, 3);
  auto in = batch();
  Rng r(0);
  const auto out = m.forward(in, Mode::Eval, r);
  CHECK(out.class_logits.shape() == nn::Shape{2, 6});
  CHECK(out.subclass_logits.shape() == nn::Shape{2, 24});
  const auto p = nn::ops::softmax_rows(out.class_logits);
  for (std::size_t b = 0; b < 2; ++b) CHECK(std::abs(std::accumulate(p.begin() + b * 6, p.begin() + (b + 1) * 6, 0.0) - 1.0) < 1e-9);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "jamloc_ckpt_test";
  std::filesystem::create_directories(dir);
  for (int kind = 0; kind < 2; ++kind) {
    std::unique_ptr<Model> m;
    if (kind == 0) m = std::make_unique<FusionModel>(FusionConfig::tiny(), 5);
    else m = std::make_unique<McaffModel>(McaffConfig::tiny(), 5);
    const auto path = dir / "m.gjw";
    save_model(path, *m, norm(), {{"note", "x"}});
    const auto lm = load_model(path);
    CHECK(lm.model->kind() == m->kind());
    CHECK(lm.extra.at("note") == "x");
    CHECK(lm.norm.iq_mean == norm().iq_mean);
    auto in = batch();
    Rng r(0);
    const auto a = m->forward(in, Mode::Eval, r).disp;
    const auto b = lm.model->forward(in, Mode::Eval, r).disp;
    for (std::size_t i = 0; i < a.numel(); ++i) CHECK(b.data()[i] == doctest::Approx(a.data()[i]).epsilon(1e-5));
  }
  std::filesystem::remove_all(dir);
}
