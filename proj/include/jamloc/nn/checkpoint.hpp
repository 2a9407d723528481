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
#include <iosfwd>
#include <vector>

#include "jamloc/nn/tensor.hpp"

namespace jamloc::nn {

// "GJW1" parameter file: magic, u32 tensor count, then per tensor
// u32 rank, u32 dims..., f32 data. Little-endian throughout.
void write_weights(std::ostream& os, std::span<const Tensor> tensors);
std::vector<Tensor> read_weights(std::istream& is);

// Copies values from `source` into `target`, checking shapes pairwise.
void assign_weights(std::span<Tensor> target, std::span<const Tensor> source);

}  // namespace jamloc::nn
