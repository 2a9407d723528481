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

#include "jamloc/nn/checkpoint.hpp"

#include <istream>
#include <ostream>

#include "jamloc/error.hpp"
#include "jamloc/io/binary.hpp"

namespace jamloc::nn {

void write_weights(std::ostream& os, std::span<const Tensor> tensors) {
  io::BinaryWriter w(os);
  w.bytes("GJW1", 4);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.data()) w.f32(static_cast<float>(v));
  }
}

std::vector<Tensor> read_weights(std::istream& is) {
  io::BinaryReader r(is);
  char magic[4];
  r.bytes(magic, 4);
  if (std::string(magic, 4) != "GJW1") throw FormatError("magic", "weights: bad magic, expected GJW1");
  const auto count = r.u32();
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rank = r.u32();
    if (rank == 0 || rank > 8) throw FormatError("format", "weights: implausible rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& d : shape) d = r.u32();
    std::vector<double> values(numel(shape));
    for (auto& v : values) v = r.f32();
    out.push_back(Tensor::from(std::move(shape), std::move(values), true));
  }
  return out;
}

void assign_weights(std::span<Tensor> target, std::span<const Tensor> source) {
  if (target.size() != source.size()) {
    throw ShapeError("assign_weights: " + std::to_string(source.size()) + " tensors for " +
                     std::to_string(target.size()) + " parameters");
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i].shape() != source[i].shape()) {
      throw ShapeError("assign_weights: tensor " + std::to_string(i) + " has shape " +
                       to_string(source[i].shape()) + ", expected " + to_string(target[i].shape()));
    }
    auto dst = target[i].data();
    auto src = source[i].data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace jamloc::nn
