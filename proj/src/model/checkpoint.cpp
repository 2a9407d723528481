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

#include "jamloc/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "jamloc/error.hpp"
#include "jamloc/io/binary.hpp"
#include "jamloc/model/fusion.hpp"
#include "jamloc/model/mcaff.hpp"
#include "jamloc/nn/checkpoint.hpp"

namespace jamloc::model {

constexpr char kMetaMagic[4] = {'G', 'J', 'M', 'D'};

std::unique_ptr<Model> make_model(ModelKind kind, const nlohmann::json& config, std::uint64_t init_seed) {
  if (kind == ModelKind::Fusion) return std::make_unique<FusionModel>(FusionConfig::from_json(config), init_seed);
  return std::make_unique<McaffModel>(McaffConfig::from_json(config), init_seed);
}

void save_model(const std::filesystem::path& path, const Model& model, const dsp::NormalizationSpec& norm,
                const nlohmann::json& extra) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto params = model.parameters();
  nn::write_weights(out, params);
  const nlohmann::json meta{{"kind", to_string(model.kind())},
                            {"config", model.config_json()},
                            {"normalization", norm.to_json()},
                            {"extra", extra}};
  const std::string text = meta.dump();
  io::BinaryWriter w(out);
  w.bytes(kMetaMagic, 4);
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text.data(), text.size());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  auto weights = nn::read_weights(in);
  io::BinaryReader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMetaMagic, 4) != 0) throw FormatError("magic", "checkpoint lacks a GJMD metadata block");
  const auto n = r.u32();
  std::string text(n, '\0');
  r.bytes(text.data(), n);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("format", std::string("checkpoint metadata: ") + e.what());
  }
  LoadedModel lm;
  try {
    lm.model = make_model(model_kind_from_string(meta.at("kind").get<std::string>()), meta.at("config"), 0);
    lm.norm = dsp::NormalizationSpec::from_json(meta.at("normalization"));
    lm.extra = meta.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("format", std::string("checkpoint metadata: ") + e.what());
  }
  auto params = lm.model->parameters();
  if (params.size() != weights.size()) {
    throw FormatError("format", "checkpoint holds " + std::to_string(weights.size()) + " tensors, model expects " +
                                    std::to_string(params.size()));
  }
  nn::assign_weights(params, weights);
  return lm;
}

}  // namespace jamloc::model
