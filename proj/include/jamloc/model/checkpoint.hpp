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

#include <filesystem>
#include <memory>

#include "jamloc/model/common.hpp"

namespace jamloc::model {

// GJW1 weights followed by a "GJMD" block: u32 byte length, then UTF-8 JSON
// holding the model kind tag, the model config, the normalization statistics
// and any caller metadata under "extra".
void save_model(const std::filesystem::path& path, const Model& model, const dsp::NormalizationSpec& norm,
                const nlohmann::json& extra = nlohmann::json::object());

struct LoadedModel {
  std::unique_ptr<Model> model;
  dsp::NormalizationSpec norm;
  nlohmann::json extra;
};

LoadedModel load_model(const std::filesystem::path& path);

// Builds an untrained model of the given kind from its config JSON.
std::unique_ptr<Model> make_model(ModelKind kind, const nlohmann::json& config, std::uint64_t init_seed);

}  // namespace jamloc::model
