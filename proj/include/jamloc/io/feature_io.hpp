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
#include <span>
#include <vector>

#include "jamloc/dsp/features.hpp"

namespace jamloc::io {

// Feature cache: GJLD framing with a "FEAT" chunk tag after the version.
// Layout: magic, u16 version, "FEAT", u32 feature sets, u32 n, then per
// record tag, label, five length-prefixed f32 arrays and a CRC32.
void write_features(std::span<const dsp::FeatureBundle> bundles, const std::filesystem::path& path);
std::vector<dsp::FeatureBundle> read_features(const std::filesystem::path& path);

}  // namespace jamloc::io
