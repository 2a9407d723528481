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

#include "jamloc/model/common.hpp"

#include <algorithm>

#include "jamloc/error.hpp"
#include "jamloc/nn/ops.hpp"

namespace jamloc::model {

using dsp::kSnapshotLen;
using dsp::kSpecSide;

const char* to_string(ModelKind kind) { return kind == ModelKind::Fusion ? "FUSION" : "MCAFF"; }

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "FUSION" || s == "fusion") return ModelKind::Fusion;
  if (s == "MCAFF" || s == "mcaff") return ModelKind::Mcaff;
  throw ConfigError("unknown model kind '" + s + "'");
}

namespace {

void check_len(const std::vector<float>& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw ShapeError(std::string("make_batch: ") + what + " holds " + std::to_string(v.size()) + " values, expected " +
                     std::to_string(n));
  }
}

}  // namespace

BatchInputs make_batch(std::span<const dsp::FeatureBundle> bundles, std::span<const std::size_t> indices,
                       const dsp::NormalizationSpec& norm, unsigned sets) {
  if (indices.empty()) throw ShapeError("make_batch: empty batch");
  if ((sets & (dsp::kIq | dsp::kAoa | dsp::kCfo)) && !norm.fitted) {
    throw DomainError("make_batch: normalization statistics are not fitted");
  }
  BatchInputs in;
  const std::size_t b = indices.size();
  in.batch = b;
  const std::size_t n_spec = kPatches * kSpecSide * kSpecSide;
  const std::size_t n_iq = 2 * kPatches * kSnapshotLen;
  const std::size_t n_aoa = kPatches * dsp::kAoaFeatures;
  const std::size_t n_cfo = kPatches * kSnapshotLen;
  const std::size_t n_stft = kPatches * dsp::kStftWindow * dsp::kStftFrames;
  std::vector<double> spec, iq, aoa, cfo, stft, disp;
  if (sets & dsp::kSpectrogram) spec.reserve(b * n_spec);
  if (sets & dsp::kIq) iq.reserve(b * n_iq);
  if (sets & dsp::kAoa) aoa.reserve(b * n_aoa);
  if (sets & dsp::kCfo) cfo.reserve(b * n_cfo);
  if (sets & dsp::kStft) stft.reserve(b * n_stft);
  disp.reserve(3 * b);
  for (std::size_t idx : indices) {
    if (idx >= bundles.size()) throw ShapeError("make_batch: index out of range");
    const auto& f = bundles[idx];
    if ((f.sets & sets) != sets) throw ShapeError("make_batch: bundle lacks a required feature set");
    if (sets & dsp::kSpectrogram) {
      check_len(f.spectrogram, n_spec, "spectrogram");
      spec.insert(spec.end(), f.spectrogram.begin(), f.spectrogram.end());
    }
    if (sets & dsp::kIq) {
      check_len(f.iq, n_iq, "iq");
      for (std::size_t c = 0; c < 2 * kPatches; ++c) {
        for (std::size_t i = 0; i < kSnapshotLen; ++i) {
          iq.push_back((f.iq[c * kSnapshotLen + i] - norm.iq_mean[c]) / norm.iq_std[c]);
        }
      }
    }
    if (sets & dsp::kAoa) {
      check_len(f.aoa, n_aoa, "aoa");
      for (std::size_t i = 0; i < n_aoa; ++i) aoa.push_back((f.aoa[i] - norm.aoa_mean[i]) / norm.aoa_std[i]);
    }
    if (sets & dsp::kCfo) {
      check_len(f.cfo, n_cfo, "cfo");
      for (std::size_t k = 0; k < kPatches; ++k) {
        for (std::size_t i = 0; i < kSnapshotLen; ++i) {
          cfo.push_back((f.cfo[k * kSnapshotLen + i] - norm.cfo_mean[k]) / norm.cfo_std[k]);
        }
      }
    }
    if (sets & dsp::kStft) {
      check_len(f.stft, n_stft, "stft");
      stft.insert(stft.end(), f.stft.begin(), f.stft.end());
    }
    disp.push_back(f.label.dx);
    disp.push_back(f.label.dy);
    disp.push_back(f.label.dz);
    in.azimuth_deg.push_back(f.label.azimuth_deg);
    in.elevation_deg.push_back(f.label.elevation_deg);
    in.classes.push_back(f.label.jammer_class);
    in.subclasses.push_back(static_cast<int>(f.label.subclass));
  }
  if (sets & dsp::kSpectrogram) in.spectrogram = Tensor::from({b, kPatches, kSpecSide, kSpecSide}, std::move(spec));
  if (sets & dsp::kIq) in.iq = Tensor::from({b, 2 * kPatches, kSnapshotLen}, std::move(iq));
  if (sets & dsp::kAoa) in.aoa = Tensor::from({b, kPatches, dsp::kAoaFeatures}, std::move(aoa));
  if (sets & dsp::kCfo) in.cfo = Tensor::from({b, kPatches, kSnapshotLen}, std::move(cfo));
  if (sets & dsp::kStft) in.stft = Tensor::from({b, kPatches, dsp::kStftWindow, dsp::kStftFrames}, std::move(stft));
  in.disp_target = Tensor::from({b, 3}, std::move(disp));
  return in;
}

int Prediction::predicted_class() const {
  if (class_logits.empty()) return -1;
  return static_cast<int>(std::max_element(class_logits.begin(), class_logits.end()) - class_logits.begin());
}

int Prediction::predicted_subclass() const {
  if (subclass_logits.empty()) return -1;
  return static_cast<int>(std::max_element(subclass_logits.begin(), subclass_logits.end()) -
                          subclass_logits.begin());
}

std::vector<Prediction> to_predictions(const ModelOutput& out) {
  const std::size_t b = out.disp.dim(0);
  std::vector<Prediction> preds(b);
  const auto d = out.disp.data();
  const auto a = out.angle_raw.data();
  for (std::size_t i = 0; i < b; ++i) {
    auto& p = preds[i];
    p.disp = {d[3 * i], d[3 * i + 1], d[3 * i + 2]};
    p.angle_raw = {a[2 * i], a[2 * i + 1]};
    p.azimuth_deg = 180.0 * p.angle_raw[0];
    p.elevation_deg = 90.0 * p.angle_raw[1];
    if (out.class_logits.defined()) {
      const std::size_t n = out.class_logits.dim(1);
      const auto c = out.class_logits.data();
      p.class_logits.assign(c.begin() + static_cast<std::ptrdiff_t>(i * n),
                            c.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    if (out.subclass_logits.defined()) {
      const std::size_t n = out.subclass_logits.dim(1);
      const auto c = out.subclass_logits.data();
      p.subclass_logits.assign(c.begin() + static_cast<std::ptrdiff_t>(i * n),
                               c.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
  }
  return preds;
}

std::size_t Model::parameter_count() const {
  const auto p = parameters();
  return nn::parameter_count(p);
}

Head::Head(std::size_t in, std::size_t hidden_dim, std::size_t out_dim, Rng& init, const std::string& name)
    : hidden(nn::LayerSpec::dense(in, hidden_dim), init, name + ".hidden"),
      out(nn::LayerSpec::dense(hidden_dim, out_dim), init, name + ".out") {}

Tensor Head::forward(const Tensor& x, double post_dropout, Mode mode, Rng& rng) const {
  Tensor h = nn::ops::relu(hidden.forward(x, mode, rng));
  h = nn::ops::dropout(h, post_dropout, mode, rng);
  return out.forward(h, mode, rng);
}

void Head::collect(std::vector<Tensor>& params) const {
  for (const auto& t : hidden.parameters()) params.push_back(t);
  for (const auto& t : out.parameters()) params.push_back(t);
}

HeadSet::HeadSet(std::size_t in, std::size_t hidden, std::size_t n_classes, std::size_t n_subclasses, Rng& init)
    : disp(in, hidden, 3, init, "head.disp"), angle(in, hidden, 2, init, "head.angle") {
  if (n_classes) {
    cls = Head(in, hidden, n_classes, init, "head.class");
    with_classes = true;
  }
  if (n_subclasses) {
    subcls = Head(in, hidden, n_subclasses, init, "head.subclass");
    with_subclasses = true;
  }
}

ModelOutput HeadSet::forward(const Tensor& features, double post_dropout, Mode mode, Rng& rng) const {
  ModelOutput out;
  out.disp = disp.forward(features, post_dropout, mode, rng);
  out.angle_raw = nn::ops::tanh(angle.forward(features, post_dropout, mode, rng));
  if (with_classes) out.class_logits = cls.forward(features, post_dropout, mode, rng);
  if (with_subclasses) out.subclass_logits = subcls.forward(features, post_dropout, mode, rng);
  return out;
}

void HeadSet::collect(std::vector<Tensor>& params) const {
  disp.collect(params);
  angle.collect(params);
  if (with_classes) cls.collect(params);
  if (with_subclasses) subcls.collect(params);
}

}  // namespace jamloc::model
