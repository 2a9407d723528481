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

#include "jamloc/io/feature_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "jamloc/error.hpp"
#include "jamloc/io/binary.hpp"
#include "jamloc/io/dataset_io.hpp"

namespace jamloc::io {

namespace {

constexpr char kFeatTag[4] = {'F', 'E', 'A', 'T'};

void write_array(BinaryWriter& w, const std::vector<float>& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (float x : v) w.f32(x);
}

std::vector<float> read_array(BinaryReader& r) {
  const auto n = r.u32();
  if (n > (1u << 24)) throw FormatError("format", "feature array length exceeds limit");
  std::vector<float> v(n);
  for (auto& x : v) x = r.f32();
  return v;
}

}  // namespace

void write_features(std::span<const dsp::FeatureBundle> bundles, const std::filesystem::path& path) {
  const unsigned sets = bundles.empty() ? 0u : bundles.front().sets;
  for (const auto& b : bundles) {
    if (b.sets != sets) throw ShapeError("write_features: bundles disagree on feature sets");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  BinaryWriter w(out);
  w.bytes(kDatasetMagic, 4);
  w.u16(kDatasetVersion);
  w.bytes(kFeatTag, 4);
  w.u32(sets);
  w.u32(static_cast<std::uint32_t>(bundles.size()));
  for (const auto& b : bundles) {
    std::ostringstream buf(std::ios::binary);
    BinaryWriter bw(buf);
    bw.str(b.scenario_tag);
    bw.f64(b.label.dx);
    bw.f64(b.label.dy);
    bw.f64(b.label.dz);
    bw.f64(b.label.azimuth_deg);
    bw.f64(b.label.elevation_deg);
    bw.f64(static_cast<double>(b.label.jammer_class));
    bw.u32(b.label.subclass);
    write_array(bw, b.spectrogram);
    write_array(bw, b.iq);
    write_array(bw, b.aoa);
    write_array(bw, b.cfo);
    write_array(bw, b.stft);
    const std::string bytes = buf.str();
    w.bytes(bytes.data(), bytes.size());
    w.u32(crc32_of({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()}));
  }
}

std::vector<dsp::FeatureBundle> read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  BinaryReader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kDatasetMagic, 4) != 0) throw FormatError("magic", "not a GJLD container");
  const auto version = r.u16();
  if (version != kDatasetVersion) throw FormatError("version", "unsupported feature cache version");
  char tag[4];
  r.bytes(tag, 4);
  if (std::memcmp(tag, kFeatTag, 4) != 0) throw FormatError("magic", "container holds no FEAT chunk");
  const unsigned sets = r.u32();
  const auto n = r.u32();
  std::vector<dsp::FeatureBundle> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    // Record length is only known after parsing, so checksum the consumed span.
    const auto start = in.tellg();
    dsp::FeatureBundle b;
    b.sets = sets;
    b.scenario_tag = r.str();
    b.label.dx = r.f64();
    b.label.dy = r.f64();
    b.label.dz = r.f64();
    b.label.azimuth_deg = r.f64();
    b.label.elevation_deg = r.f64();
    b.label.jammer_class = static_cast<int>(r.f64());
    b.label.subclass = r.u32();
    b.spectrogram = read_array(r);
    b.iq = read_array(r);
    b.aoa = read_array(r);
    b.cfo = read_array(r);
    b.stft = read_array(r);
    const auto end = in.tellg();
    std::string bytes(static_cast<std::size_t>(end - start), '\0');
    in.seekg(start);
    r.bytes(bytes.data(), bytes.size());
    if (crc32_of({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()}) != r.u32()) {
      throw FormatError("checksum", "feature record " + std::to_string(i) + " failed CRC32 check");
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace jamloc::io
