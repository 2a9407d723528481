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

#include "jamloc/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "jamloc/error.hpp"
#include "jamloc/train/csv.hpp"

namespace jamloc::cli {

namespace pt = boost::property_tree;

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::Desk;
  if (s == "paper") return Scale::Paper;
  throw ConfigError("unknown scale '" + s + "' (expected desk or paper)");
}

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> parts;
  boost::split(parts, s, [sep](char c) { return c == sep; });
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) { return boost::join(v, sep); }

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"seed"}},
      {"sim",
       {"train_scenario", "heldout", "test_fraction", "noise_floor_dbm", "power_dbm", "bandwidth_mhz",
        "max_snapshots"}},
      {"features", {"normalization"}},
      {"model", {"kind", "branches", "mcaff_paths", "dropout_pre", "dropout_post", "with_classifier"}},
      {"train",
       {"gamma", "loss", "lr", "momentum", "weight_decay", "batch_size", "epochs", "n_seeds", "milestones",
        "lr_decay", "clip_grad_norm", "select_tag"}},
      {"sweep", {"grid", "objective"}},
  };
  return s;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const pt::ptree::path_type path(key, '/');
  if (!tree.get_child_optional(path)) return fallback;
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_error& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '/'));
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("bad boolean for '" + key + "': " + *v);
}

}  // namespace

unsigned branches_from_string(const std::string& s) {
  unsigned b = 0;
  for (const auto& tok : split_list(s, ',')) {
    if (tok == "spec") b |= model::kSpecBranch;
    else if (tok == "iq") b |= model::kIqBranch;
    else if (tok == "aoa") b |= model::kAoaBranch;
    else throw ConfigError("unknown fusion branch '" + tok + "' (expected spec, iq, aoa)");
  }
  if (!b) throw ConfigError("model.branches must name at least one branch");
  return b;
}

std::string branches_to_string(unsigned b) {
  std::vector<std::string> v;
  if (b & model::kSpecBranch) v.push_back("spec");
  if (b & model::kIqBranch) v.push_back("iq");
  if (b & model::kAoaBranch) v.push_back("aoa");
  return join(v, ",");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  std::vector<std::string> unknown;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (!schema().at("").count(key)) unknown.push_back(key);
      continue;
    }
    const auto sec = schema().find(key);
    if (sec == schema().end() || key.empty()) {
      unknown.push_back("[" + key + "]");
      continue;
    }
    for (const auto& [k, v] : node) {
      if (!sec->second.count(k)) unknown.push_back(key + "." + k);
    }
  }
  if (!unknown.empty()) throw ConfigError("unknown config keys: " + join(unknown, ", "));

  RunConfig c;
  c.seed = get<std::uint64_t>(tree, "seed", c.seed);
  auto& s = c.sim;
  s.train_scenario = get<std::string>(tree, "sim/train_scenario", s.train_scenario);
  if (auto h = tree.get_optional<std::string>(pt::ptree::path_type("sim/heldout", '/'))) s.heldout = split_list(*h, ',');
  s.test_fraction = get(tree, "sim/test_fraction", s.test_fraction);
  s.noise_floor_dbm = get(tree, "sim/noise_floor_dbm", s.noise_floor_dbm);
  s.power_dbm = get(tree, "sim/power_dbm", s.power_dbm);
  s.bandwidth_mhz = get(tree, "sim/bandwidth_mhz", s.bandwidth_mhz);
  s.max_snapshots = get<std::size_t>(tree, "sim/max_snapshots", s.max_snapshots);
  c.normalization = get<std::string>(tree, "features/normalization", c.normalization);
  if (c.normalization != "train_split") {
    throw ConfigError("features.normalization must be train_split (statistics come from the training split)");
  }
  auto& m = c.model;
  m.kind = model::model_kind_from_string(get<std::string>(tree, "model/kind", "fusion"));
  if (auto b = tree.get_optional<std::string>(pt::ptree::path_type("model/branches", '/'))) {
    m.branches = branches_from_string(*b);
  }
  m.mcaff_paths = get<std::string>(tree, "model/mcaff_paths", m.mcaff_paths);
  m.dropout_pre = get(tree, "model/dropout_pre", m.dropout_pre);
  m.dropout_post = get(tree, "model/dropout_post", m.dropout_post);
  m.with_classifier = get_bool(tree, "model/with_classifier", m.with_classifier);
  auto& t = c.train;
  t.gamma = get(tree, "train/gamma", t.gamma);
  t.loss = train::regression_loss_from_string(get<std::string>(tree, "train/loss", "mse"));
  t.learning_rate = get(tree, "train/lr", t.learning_rate);
  t.momentum = get(tree, "train/momentum", t.momentum);
  t.weight_decay = get(tree, "train/weight_decay", t.weight_decay);
  t.batch_size = get<std::size_t>(tree, "train/batch_size", t.batch_size);
  t.epochs = get(tree, "train/epochs", t.epochs);
  t.n_seeds = get(tree, "train/n_seeds", t.n_seeds);
  if (auto ms = tree.get_optional<std::string>(pt::ptree::path_type("train/milestones", '/'))) {
    t.milestone_fractions.clear();
    for (const auto& tok : split_list(*ms, ',')) {
      try {
        t.milestone_fractions.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad value in train.milestones: '" + tok + "'");
      }
    }
  }
  t.lr_decay_factor = get(tree, "train/lr_decay", t.lr_decay_factor);
  t.clip_grad_norm = get(tree, "train/clip_grad_norm", t.clip_grad_norm);
  t.select_tag = get<std::string>(tree, "train/select_tag", t.select_tag);
  t.validate();
  c.sweep.grid = get<std::string>(tree, "sweep/grid", c.sweep.grid);
  if (c.sweep.grid != "gamma" && c.sweep.grid != "dropout" && c.sweep.grid != "both") {
    throw ConfigError("sweep.grid must be gamma, dropout or both");
  }
  const auto obj = get<std::string>(tree, "sweep/objective", "delta_d");
  if (obj == "delta_d") c.sweep.objective = train::SweepObjective::DeltaD;
  else if (obj == "azimuth") c.sweep.objective = train::SweepObjective::Azimuth;
  else throw ConfigError("sweep.objective must be delta_d or azimuth");
  // Validate model settings early.
  if (m.kind == model::ModelKind::Fusion) c.fusion_config().validate();
  else c.mcaff_config().validate();
  if (!(s.test_fraction > 0.0 && s.test_fraction < 1.0)) throw ConfigError("sim.test_fraction must lie in (0,1)");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  using train::fmt;
  std::ostringstream o;
  std::vector<std::string> ms;
  for (double f : c.train.milestone_fractions) ms.push_back(fmt(f));
  o << "seed = " << c.seed << "\n\n[sim]\n"
    << "train_scenario = " << c.sim.train_scenario << '\n'
    << "heldout = " << join(c.sim.heldout, ",") << '\n'
    << "test_fraction = " << fmt(c.sim.test_fraction) << '\n'
    << "noise_floor_dbm = " << fmt(c.sim.noise_floor_dbm) << '\n'
    << "power_dbm = " << fmt(c.sim.power_dbm) << '\n'
    << "bandwidth_mhz = " << fmt(c.sim.bandwidth_mhz) << '\n'
    << "max_snapshots = " << c.sim.max_snapshots << "\n\n[features]\n"
    << "normalization = " << c.normalization << "\n\n[model]\n"
    << "kind = " << (c.model.kind == model::ModelKind::Fusion ? "fusion" : "mcaff") << '\n'
    << "branches = " << branches_to_string(c.model.branches) << '\n'
    << "mcaff_paths = " << c.model.mcaff_paths << '\n'
    << "dropout_pre = " << fmt(c.model.dropout_pre) << '\n'
    << "dropout_post = " << fmt(c.model.dropout_post) << '\n'
    << "with_classifier = " << (c.model.with_classifier ? "true" : "false") << "\n\n[train]\n"
    << "gamma = " << fmt(c.train.gamma) << '\n'
    << "loss = " << train::to_string(c.train.loss) << '\n'
    << "lr = " << fmt(c.train.learning_rate) << '\n'
    << "momentum = " << fmt(c.train.momentum) << '\n'
    << "weight_decay = " << fmt(c.train.weight_decay) << '\n'
    << "batch_size = " << c.train.batch_size << '\n'
    << "epochs = " << c.train.epochs << '\n'
    << "n_seeds = " << c.train.n_seeds << '\n'
    << "milestones = " << join(ms, ",") << '\n'
    << "lr_decay = " << fmt(c.train.lr_decay_factor) << '\n'
    << "clip_grad_norm = " << fmt(c.train.clip_grad_norm) << '\n'
    << "select_tag = " << c.train.select_tag << "\n\n[sweep]\n"
    << "grid = " << c.sweep.grid << '\n'
    << "objective = " << (c.sweep.objective == train::SweepObjective::DeltaD ? "delta_d" : "azimuth") << '\n';
  return o.str();
}

sim::SimConfig RunConfig::sim_config(const std::string& scenario, Scale scale) const {
  auto sc = sim::scenario_preset(scenario);
  if (scale == Scale::Paper) sim::apply_paper_scale(sc);
  sc.scene.noise_floor_dbm = sim.noise_floor_dbm;
  sc.mobile.power_dbm = sim.power_dbm;
  sc.mobile.bandwidth_hz = sim.bandwidth_mhz * 1e6;
  if (sim.max_snapshots) sc.max_snapshots = sim.max_snapshots;
  return sc;
}

model::FusionConfig RunConfig::fusion_config() const {
  model::FusionConfig f;
  f.branches = model.branches;
  f.dropout_pre_concat = model.dropout_pre;
  f.dropout_post_head = model.dropout_post;
  f.with_classifier = model.with_classifier;
  return f;
}

model::McaffConfig RunConfig::mcaff_config() const {
  auto m = model::McaffConfig::preset(model.mcaff_paths);
  m.dropout_post_head = model.dropout_post;
  return m;
}

std::unique_ptr<model::Model> RunConfig::make_model(std::uint64_t init_seed, double p_pre, double p_post) const {
  if (model.kind == model::ModelKind::Fusion) {
    auto f = fusion_config();
    f.dropout_pre_concat = p_pre;
    f.dropout_post_head = p_post;
    return std::make_unique<model::FusionModel>(f, init_seed);
  }
  auto m = mcaff_config();
  m.dropout_post_head = p_post;
  return std::make_unique<model::McaffModel>(m, init_seed);
}

void RunConfig::apply_scale(Scale scale) {
  if (scale == Scale::Paper) {
    train.epochs = 200;
    train.n_seeds = 10;
  }
}

}  // namespace jamloc::cli
