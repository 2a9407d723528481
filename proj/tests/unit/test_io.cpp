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
#include <fstream>
#include <random>

#include "jamloc/dsp/features.hpp"
#include "jamloc/error.hpp"
#include "jamloc/io/dataset_io.hpp"
#include "jamloc/io/feature_io.hpp"

using namespace jamloc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("jamloc_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<IQSnapshot> random_snapshots(std::size_t n, std::size_t len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d;
  std::vector<IQSnapshot> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = out[i];
    s.snapshot_len = len;
    for (std::size_t j = 0; j < kPatches * len; ++j) s.samples.emplace_back(d(rng), d(rng));
    s.label = Label::from_displacement(d(rng), 5.0 + d(rng), 2.0, static_cast<int>(i % 6), static_cast<std::uint32_t>(i % 24));
    s.scenario_tag = i % 2 ? "Wall 3" : "Random";
  }
  return out;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void flip_byte(const fs::path& p, std::size_t offset) {
  std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.read(&c, 1);
  c = static_cast<char>(c ^ 0x5a);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(&c, 1);
}

}  // namespace

TEST_CASE("empty dataset is a header-only file") {
  TempDir t;
  const auto p = t.path / "empty.gjld";
  io::write_dataset({}, p);
  CHECK(fs::file_size(p) == io::kDatasetHeaderBytes);
  io::DatasetHeader h;
  CHECK(io::read_dataset(p, &h).empty());
  CHECK(h.n_snapshots == 0);
  CHECK(h.version == io::kDatasetVersion);
}

TEST_CASE("dataset round trip is byte identical") {
  TempDir t;
  const auto snaps = random_snapshots(100, 64, 1);
  io::write_dataset(snaps, t.path / "a.gjld", 2e7);
  io::DatasetHeader h;
  const auto back = io::read_dataset(t.path / "a.gjld", &h);
  CHECK(back == snaps);
  CHECK(h.sample_rate == 2e7);
  CHECK(h.snapshot_len == 64);
  io::write_dataset(back, t.path / "b.gjld", 2e7);
  CHECK(slurp(t.path / "a.gjld") == slurp(t.path / "b.gjld"));
  std::size_t expected = io::kDatasetHeaderBytes;
  for (const auto& s : snaps) expected += io::record_bytes(s, 2);
  CHECK(fs::file_size(t.path / "a.gjld") == expected);
}

TEST_CASE("streaming reader yields records in order") {
  TempDir t;
  const auto snaps = random_snapshots(5, 32, 2);
  io::write_dataset(snaps, t.path / "s.gjld");
  io::DatasetReader r(t.path / "s.gjld");
  CHECK(r.header().n_snapshots == 5);
  for (const auto& s : snaps) CHECK(*r.next() == s);
  CHECK_FALSE(r.next().has_value());
}

TEST_CASE("version 1 files carry no checksum") {
  TempDir t;
  const auto snaps = random_snapshots(3, 16, 3);
  io::write_dataset(snaps, t.path / "v1.gjld", 1e8, 1);
  CHECK(io::record_bytes(snaps[0], 1) + 4 == io::record_bytes(snaps[0], 2));
  CHECK(io::read_dataset(t.path / "v1.gjld") == snaps);
}

TEST_CASE("corruption is detected") {
  TempDir t;
  const auto snaps = random_snapshots(4, 32, 4);
  const auto p = t.path / "c.gjld";
  auto kind_of = [&] {
    try {
      io::read_dataset(p);
    } catch (const FormatError& e) {
      return e.kind();
    }
    return std::string("none");
  };
  io::write_dataset(snaps, p);
  flip_byte(p, io::kDatasetHeaderBytes + io::record_bytes(snaps[0], 2) / 2);
  CHECK(kind_of() == "checksum");

  io::write_dataset(snaps, p);
  flip_byte(p, 0);
  CHECK(kind_of() == "magic");

  io::write_dataset(snaps, p);
  flip_byte(p, 4);
  CHECK(kind_of() == "version");

  io::write_dataset(snaps, p);
  fs::resize_file(p, fs::file_size(p) - 7);
  CHECK(kind_of() == "truncated");
}

TEST_CASE("inconsistent snapshot lengths are rejected") {
  TempDir t;
  auto snaps = random_snapshots(2, 16, 5);
  snaps[1] = random_snapshots(1, 32, 6)[0];
  CHECK_THROWS_AS(io::write_dataset(snaps, t.path / "x.gjld"), ShapeError);
  CHECK_THROWS_AS(io::read_dataset(t.path / "missing.gjld"), IoError);
}

TEST_CASE("crc32 matches the reference check value") {
  const std::string s = "123456789";
  CHECK(io::crc32_of({reinterpret_cast<const unsigned char*>(s.data()), s.size()}) == 0xCBF43926u);
}

TEST_CASE("feature cache round trip") {
  TempDir t;
  const auto snaps = random_snapshots(3, 1024, 7);
  std::vector<dsp::FeatureBundle> b;
  for (const auto& s : snaps) b.push_back(dsp::extract_features(s));
  io::write_features(b, t.path / "f.feat");
  const auto back = io::read_features(t.path / "f.feat");
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].spectrogram == b[i].spectrogram);
    CHECK(back[i].iq == b[i].iq);
    CHECK(back[i].aoa == b[i].aoa);
    CHECK(back[i].cfo == b[i].cfo);
    CHECK(back[i].stft == b[i].stft);
    CHECK(back[i].label == b[i].label);
    CHECK(back[i].scenario_tag == b[i].scenario_tag);
    CHECK(back[i].sets == b[i].sets);
  }
  flip_byte(t.path / "f.feat", fs::file_size(t.path / "f.feat") - 100);
  CHECK_THROWS_AS(io::read_features(t.path / "f.feat"), FormatError);
}
