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

#include "jamloc/io/dataset_io.hpp"

#include <cstring>
#include <sstream>

#include <zlib.h>

#include "jamloc/error.hpp"
#include "jamloc/io/binary.hpp"

namespace jamloc::io {

std::uint32_t crc32_of(std::span<const unsigned char> bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(crc32(c, bytes.data(), static_cast<uInt>(bytes.size())));
}

std::size_t record_bytes(const IQSnapshot& s, std::uint16_t version) {
  return 4 + s.scenario_tag.size() + 6 * 8 + 4 + s.samples.size() * 8 + (version >= 2 ? 4 : 0);
}

namespace {

void write_record(BinaryWriter& w, const IQSnapshot& s) {
  w.str(s.scenario_tag);
  const Label& l = s.label;
  w.f64(l.dx);
  w.f64(l.dy);
  w.f64(l.dz);
  w.f64(l.azimuth_deg);
  w.f64(l.elevation_deg);
  w.f64(static_cast<double>(l.jammer_class));
  w.u32(l.subclass);
  for (const auto& c : s.samples) {
    w.f32(c.real());
    w.f32(c.imag());
  }
}

IQSnapshot read_record(BinaryReader& r, std::uint32_t snapshot_len) {
  IQSnapshot s;
  s.snapshot_len = snapshot_len;
  s.scenario_tag = r.str();
  Label& l = s.label;
  l.dx = r.f64();
  l.dy = r.f64();
  l.dz = r.f64();
  l.azimuth_deg = r.f64();
  l.elevation_deg = r.f64();
  l.jammer_class = static_cast<int>(r.f64());
  l.subclass = r.u32();
  s.samples.resize(kPatches * static_cast<std::size_t>(snapshot_len));
  for (auto& c : s.samples) {
    const float re = r.f32();
    const float im = r.f32();
    c = {re, im};
  }
  return s;
}

DatasetHeader read_header(BinaryReader& r) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kDatasetMagic, 4) != 0) throw FormatError("magic", "not a GJLD dataset file");
  DatasetHeader h;
  h.version = r.u16();
  if (h.version != 1 && h.version != 2) {
    throw FormatError("version", "unsupported dataset version " + std::to_string(h.version));
  }
  h.sample_rate = r.f64();
  h.snapshot_len = r.u32();
  h.n_snapshots = r.u32();
  return h;
}

}  // namespace

void write_dataset(std::span<const IQSnapshot> snapshots, const std::filesystem::path& path, double sample_rate,
                   std::uint16_t version) {
  if (version != 1 && version != 2) throw FormatError("version", "cannot write version " + std::to_string(version));
  const std::size_t len = snapshots.empty() ? 1024 : snapshots.front().snapshot_len;
  for (const auto& s : snapshots) {
    if (s.snapshot_len != len) throw ShapeError("write_dataset: inconsistent snapshot_len across records");
    if (s.samples.size() != kPatches * len) throw ShapeError("write_dataset: record sample count mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  BinaryWriter w(out);
  w.bytes(kDatasetMagic, 4);
  w.u16(version);
  w.f64(sample_rate);
  w.u32(static_cast<std::uint32_t>(len));
  w.u32(static_cast<std::uint32_t>(snapshots.size()));
  for (const auto& s : snapshots) {
    if (version >= 2) {
      std::ostringstream buf(std::ios::binary);
      BinaryWriter bw(buf);
      write_record(bw, s);
      const std::string bytes = buf.str();
      w.bytes(bytes.data(), bytes.size());
      w.u32(crc32_of({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()}));
    } else {
      write_record(w, s);
    }
  }
}

DatasetReader::DatasetReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open '" + path.string() + "'");
  BinaryReader r(in_);
  header_ = read_header(r);
}

std::optional<IQSnapshot> DatasetReader::next() {
  if (read_ >= header_.n_snapshots) return std::nullopt;
  if (header_.version >= 2) {
    // Tag length decides the record size; read the whole record for the CRC.
    BinaryReader r(in_);
    const std::uint32_t tag_len = r.u32();
    if (tag_len > (1u << 20)) throw FormatError("format", "scenario tag length exceeds limit");
    const std::size_t body = 4 + tag_len + 6 * 8 + 4 + kPatches * std::size_t{header_.snapshot_len} * 8;
    std::string bytes(body, '\0');
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((tag_len >> (8 * i)) & 0xff);
    r.bytes(bytes.data() + 4, body - 4);
    const std::uint32_t stored = r.u32();
    if (crc32_of({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()}) != stored) {
      throw FormatError("checksum", "record " + std::to_string(read_) + " failed CRC32 check");
    }
    std::istringstream rec(bytes, std::ios::binary);
    BinaryReader rr(rec);
    ++read_;
    return read_record(rr, header_.snapshot_len);
  }
  BinaryReader r(in_);
  ++read_;
  return read_record(r, header_.snapshot_len);
}

std::vector<IQSnapshot> read_dataset(const std::filesystem::path& path, DatasetHeader* header) {
  DatasetReader reader(path);
  std::vector<IQSnapshot> out;
  out.reserve(reader.header().n_snapshots);
  while (auto s = reader.next()) out.push_back(std::move(*s));
  if (header) *header = reader.header();
  return out;
}

}  // namespace jamloc::io
