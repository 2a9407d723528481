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

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jamloc/dsp/features.hpp"
#include "jamloc/nn/layers.hpp"
#include "jamloc/nn/tensor.hpp"

namespace jamloc::model {

using nn::Mode;
using nn::Rng;
using nn::Tensor;

enum class ModelKind { Fusion, Mcaff };
const char* to_string(ModelKind kind);  // "FUSION" / "MCAFF"
ModelKind model_kind_from_string(const std::string& s);

// Standardized model inputs for a mini-batch. Only the tensors a model asks
// for through required_features() are populated.
struct BatchInputs {
  std::size_t batch = 0;
  Tensor spectrogram;  // [B,4,32,32]
  Tensor iq;           // [B,8,1024]
  Tensor aoa;          // [B,4,22]
  Tensor cfo;          // [B,4,1024]
  Tensor stft;         // [B,4,128,15]
  Tensor disp_target;  // [B,3] meters
  std::vector<double> azimuth_deg, elevation_deg;
  std::vector<int> classes, subclasses;
};

BatchInputs make_batch(std::span<const dsp::FeatureBundle> bundles, std::span<const std::size_t> indices,
                       const dsp::NormalizationSpec& norm, unsigned sets);

// Raw network outputs; angle_raw holds tanh outputs in (-1,1).
struct ModelOutput {
  Tensor disp;             // [B,3]
  Tensor angle_raw;        // [B,2]
  Tensor class_logits;     // [B,n_classes] or undefined
  Tensor subclass_logits;  // [B,n_subclasses] or undefined
};

// Per-sample prediction in physical units.
struct Prediction {
  std::array<double, 3> disp{};
  std::array<double, 2> angle_raw{};
  double azimuth_deg = 0.0;    // 180 * angle_raw[0]
  double elevation_deg = 0.0;  // 90 * angle_raw[1]
  std::vector<double> class_logits;
  std::vector<double> subclass_logits;
  int predicted_class() const;
  int predicted_subclass() const;
};

std::vector<Prediction> to_predictions(const ModelOutput& out);

class Model {
 public:
  virtual ~Model() = default;
  virtual ModelKind kind() const = 0;
  virtual ModelOutput forward(const BatchInputs& in, Mode mode, Rng& rng) const = 0;
  virtual std::vector<Tensor> parameters() const = 0;
  virtual unsigned required_features() const = 0;
  virtual nlohmann::json config_json() const = 0;
  std::size_t parameter_count() const;
};

// Per-task heads: Dense in->hidden, ReLU, optional dropout, Dense hidden->out.
struct Head {
  nn::Layer hidden;
  nn::Layer out;
  Head() = default;
  Head(std::size_t in, std::size_t hidden_dim, std::size_t out_dim, Rng& init, const std::string& name);
  Tensor forward(const Tensor& x, double post_dropout, Mode mode, Rng& rng) const;
  void collect(std::vector<Tensor>& params) const;
};

struct HeadSet {
  Head disp, angle, cls, subcls;
  bool with_classes = false, with_subclasses = false;
  HeadSet() = default;
  HeadSet(std::size_t in, std::size_t hidden, std::size_t n_classes, std::size_t n_subclasses, Rng& init);
  ModelOutput forward(const Tensor& features, double post_dropout, Mode mode, Rng& rng) const;
  void collect(std::vector<Tensor>& params) const;
};

}  // namespace jamloc::model
