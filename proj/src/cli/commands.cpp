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

#include "jamloc/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <spdlog/spdlog.h>

#include "jamloc/error.hpp"
#include "jamloc/io/dataset_io.hpp"
#include "jamloc/io/feature_io.hpp"
#include "jamloc/model/checkpoint.hpp"
#include "jamloc/train/csv.hpp"

namespace jamloc::cli {

namespace fs = std::filesystem;
using train::fmt;

namespace {

RunConfig resolve_config(const CommonOptions& opt) {
  RunConfig cfg = opt.config.empty() ? RunConfig{} : load_config(opt.config);
  cfg.apply_scale(opt.scale);
  if (opt.seed) cfg.seed = *opt.seed;
  return cfg;
}

void prepare_out(const CommonOptions& opt) {
  if (opt.out.empty()) throw ConfigError("--out is required");
  if (fs::exists(opt.out)) {
    if (!fs::is_directory(opt.out)) throw IoError("output path '" + opt.out.string() + "' is not a directory");
    if (!fs::is_empty(opt.out) && !opt.overwrite) {
      throw Error("exists", "output directory '" + opt.out.string() + "' is not empty (use --overwrite)");
    }
  }
  fs::create_directories(opt.out);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
}

std::vector<dsp::FeatureBundle> extract_all(const std::vector<IQSnapshot>& snaps) {
  std::vector<dsp::FeatureBundle> out;
  out.reserve(snaps.size());
  for (const auto& s : snaps) out.push_back(dsp::extract_features(s));
  return out;
}

}  // namespace

std::vector<dsp::FeatureBundle> load_bundles(const fs::path& dir_or_file, const std::string& split) {
  if (fs::is_regular_file(dir_or_file)) {
    if (dir_or_file.extension() == ".feat") return io::read_features(dir_or_file);
    return extract_all(io::read_dataset(dir_or_file));
  }
  if (!fs::is_directory(dir_or_file)) throw IoError("data path '" + dir_or_file.string() + "' does not exist");
  const auto feat = dir_or_file / (split + ".feat");
  if (fs::exists(feat)) return io::read_features(feat);
  const auto raw = dir_or_file / (split + ".gjld");
  if (!fs::exists(raw)) throw IoError("missing '" + raw.string() + "' (run simulate first)");
  return extract_all(io::read_dataset(raw));
}

int cmd_simulate(const CommonOptions& opt) {
  const RunConfig cfg = resolve_config(opt);
  prepare_out(opt);
  const auto main_cfg = cfg.sim_config(cfg.sim.train_scenario, opt.scale);
  auto all = sim::make_dataset(main_cfg, cfg.seed, opt.jobs);
  auto [train_set, test_set] = sim::split_train_test(std::move(all), cfg.sim.test_fraction, cfg.seed);
  spdlog::info("simulate: {} train / {} test snapshots of '{}'", train_set.size(), test_set.size(),
               cfg.sim.train_scenario);
  for (std::size_t i = 0; i < cfg.sim.heldout.size(); ++i) {
    const auto& tag = cfg.sim.heldout[i];
    const auto sc = cfg.sim_config(tag, opt.scale);
    // Held-out sets draw from their own seed stream.
    auto held = sim::make_dataset(sc, cfg.seed + 1000003ULL * (i + 1), opt.jobs);
    spdlog::info("simulate: {} snapshots of '{}'", held.size(), tag);
    for (auto& s : held) test_set.push_back(std::move(s));
  }
  io::write_dataset(train_set, opt.out / "train.gjld", main_cfg.scene.sample_rate);
  io::write_dataset(test_set, opt.out / "test.gjld", main_cfg.scene.sample_rate);
  write_text(opt.out / "config.cfg", to_text(cfg));
  return 0;
}

int cmd_featurize(const CommonOptions& opt, const fs::path& in) {
  prepare_out(opt);
  for (const char* split : {"train", "test"}) {
    const auto raw = in / (std::string(split) + ".gjld");
    if (!fs::exists(raw)) throw IoError("missing '" + raw.string() + "'");
    const auto bundles = extract_all(io::read_dataset(raw));
    io::write_features(bundles, opt.out / (std::string(split) + ".feat"));
    spdlog::info("featurize: {} {} bundles", bundles.size(), split);
  }
  if (fs::exists(in / "config.cfg")) fs::copy_file(in / "config.cfg", opt.out / "config.cfg", fs::copy_options::overwrite_existing);
  return 0;
}

namespace {

void write_history(const fs::path& path, const train::TrainResult& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "epoch,learning_rate,train_loss,test_delta_d,test_azimuth_mae,test_elevation_mae\n";
  for (const auto& h : r.history) {
    out << h.epoch << ',' << fmt(h.learning_rate) << ',' << fmt(h.train_loss) << ','
        << (h.test ? fmt(h.test->delta_d) : "") << ',' << (h.test ? fmt(h.test->azimuth_mae) : "") << ','
        << (h.test ? fmt(h.test->elevation_mae) : "") << '\n';
  }
}

std::vector<std::string> tags_in(std::span<const dsp::FeatureBundle> data) {
  std::vector<std::string> tags;
  for (const auto& b : data) {
    if (std::find(tags.begin(), tags.end(), b.scenario_tag) == tags.end()) tags.push_back(b.scenario_tag);
  }
  return tags;
}

}  // namespace

int cmd_train(const CommonOptions& opt, const fs::path& data) {
  const RunConfig cfg = resolve_config(opt);
  prepare_out(opt);
  const auto train_set = load_bundles(data, "train");
  const auto test_set = load_bundles(data, "test");
  const auto norm = dsp::fit_normalization(train_set);
  const auto tags = tags_in(test_set);

  std::ofstream seeds(opt.out / "seeds.csv", std::ios::trunc);
  seeds << "seed,best_epoch,n,mae_x,mae_y,mae_z,delta_d,mean_euclidean,azimuth_mae,elevation_mae,accuracy_classes\n";
  std::map<std::string, std::vector<train::MetricsReport>> per_tag;
  std::vector<double> dd, mx, my, mz, az, el;
  int best_seed = -1;
  double best_dd = 0.0;
  std::vector<train::PositionRecord> best_positions;
  for (int k = 0; k < cfg.train.n_seeds; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    auto m = cfg.make_model(seed, cfg.model.dropout_pre, cfg.model.dropout_post);
    const auto result = train::train_model(*m, train_set, test_set, norm, cfg.train, seed);
    write_history(opt.out / ("history_seed" + std::to_string(k) + ".csv"), result);
    model::save_model(opt.out / ("model_seed" + std::to_string(k) + ".gjw"), *m, norm, {{"seed", seed}});
    const auto ev = train::scenario_eval(*m, test_set, norm, tags);
    const train::MetricsReport* sel = &ev.reports.front().metrics;
    for (const auto& r : ev.reports) {
      per_tag[r.scenario_tag].push_back(r.metrics);
      if (r.scenario_tag == cfg.train.select_tag) sel = &r.metrics;
    }
    seeds << seed << ',' << result.best_epoch << ',' << sel->n << ',' << fmt(sel->mae_x) << ',' << fmt(sel->mae_y)
          << ',' << fmt(sel->mae_z) << ',' << fmt(sel->delta_d) << ',' << fmt(sel->mean_euclidean) << ','
          << fmt(sel->azimuth_mae) << ',' << fmt(sel->elevation_mae) << ','
          << (sel->accuracy_classes ? fmt(*sel->accuracy_classes) : "") << '\n';
    dd.push_back(sel->delta_d);
    mx.push_back(sel->mae_x);
    my.push_back(sel->mae_y);
    mz.push_back(sel->mae_z);
    az.push_back(sel->azimuth_mae);
    el.push_back(sel->elevation_mae);
    if (best_seed < 0 || sel->delta_d < best_dd) {
      best_seed = k;
      best_dd = sel->delta_d;
      best_positions = ev.positions;
      fs::copy_file(opt.out / ("model_seed" + std::to_string(k) + ".gjw"), opt.out / "model.gjw",
                    fs::copy_options::overwrite_existing);
    }
    spdlog::info("train: seed {} {} delta_d {:.3f} m azimuth {:.2f} deg", seed, cfg.train.select_tag,
                 sel->delta_d, sel->azimuth_mae);
  }
  for (const auto& [label, f] : {std::pair<const char*, bool>{"mean", true}, {"std", false}}) {
    auto pick = [&](const std::vector<double>& v) {
      const auto s = train::mean_std(v);
      return fmt(f ? s.mean : s.std);
    };
    seeds << label << ",,," << pick(mx) << ',' << pick(my) << ',' << pick(mz) << ',' << pick(dd) << ",,"
          << pick(az) << ',' << pick(el) << ",\n";
  }
  // metrics.csv holds per-tag means over seeds.
  std::vector<train::ScenarioReport> mean_reports;
  for (const auto& tag : tags) {
    const auto& v = per_tag[tag];
    train::MetricsReport r;
    r.n = v.front().n;
    double acc = 0.0;
    bool has_acc = true;
    for (const auto& x : v) {
      r.mae_x += x.mae_x / v.size();
      r.mae_y += x.mae_y / v.size();
      r.mae_z += x.mae_z / v.size();
      r.delta_d += x.delta_d / v.size();
      r.mean_euclidean += x.mean_euclidean / v.size();
      r.azimuth_mae += x.azimuth_mae / v.size();
      r.elevation_mae += x.elevation_mae / v.size();
      if (x.accuracy_classes) acc += *x.accuracy_classes / v.size();
      else has_acc = false;
    }
    if (has_acc) r.accuracy_classes = acc;
    mean_reports.push_back({tag, r});
  }
  train::write_metrics_csv(opt.out / "metrics.csv", mean_reports);
  train::write_per_position_csv(opt.out / "per_position.csv", best_positions);
  write_text(opt.out / "config.cfg", to_text(cfg));
  return 0;
}

int cmd_eval(const CommonOptions& opt, const fs::path& checkpoint, const fs::path& data) {
  prepare_out(opt);
  const auto lm = model::load_model(checkpoint);
  const auto test_set = load_bundles(data, "test");
  const auto ev = train::scenario_eval(*lm.model, test_set, lm.norm);
  train::write_metrics_csv(opt.out / "metrics.csv", ev.reports);
  train::write_per_position_csv(opt.out / "per_position.csv", ev.positions);
  if (!ev.predictions.empty() && !ev.predictions.front().class_logits.empty()) {
    std::vector<int> pred, truth;
    std::size_t i = 0;
    for (const auto& r : ev.reports) {
      for (const auto& b : test_set) {
        if (b.scenario_tag != r.scenario_tag) continue;
        pred.push_back(ev.predictions[i++].predicted_class());
        truth.push_back(b.label.jammer_class);
      }
    }
    const auto n = ev.predictions.front().class_logits.size();
    train::write_confusion_csv(opt.out / "confusion.csv", train::confusion_matrix(pred, truth, n));
  }
  for (const auto& r : ev.reports) {
    spdlog::info("eval: {} n={} delta_d {:.3f} m azimuth {:.2f} deg", r.scenario_tag, r.metrics.n, r.metrics.delta_d,
                 r.metrics.azimuth_mae);
  }
  return 0;
}

int cmd_sweep(const CommonOptions& opt, const fs::path& data) {
  const RunConfig cfg = resolve_config(opt);
  prepare_out(opt);
  const auto train_set = load_bundles(data, "train");
  auto test_set = load_bundles(data, "test");
  // Sweeps score the training scenario's test split only.
  std::erase_if(test_set, [&](const dsp::FeatureBundle& b) { return b.scenario_tag != cfg.train.select_tag; });
  if (test_set.empty()) throw ConfigError("sweep: no test samples tagged '" + cfg.train.select_tag + "'");
  const auto norm = dsp::fit_normalization(train_set);
  const train::ModelFactory factory = [&](const train::SweepCell& c, std::uint64_t s) {
    return cfg.make_model(s, c.p_pre, c.p_post);
  };
  std::ofstream out(opt.out / "sweep.csv", std::ios::trunc);
  bool header = true;
  for (const std::string grid : {"gamma", "dropout"}) {
    if (cfg.sweep.grid != "both" && cfg.sweep.grid != grid) continue;
    const auto cells = grid == "gamma" ? train::gamma_grid(cfg.model.dropout_pre, cfg.model.dropout_post)
                                       : train::dropout_grid(cfg.train.gamma);
    const auto result = train::run_sweep(factory, train_set, test_set, norm, cfg.train, cells, cfg.train.n_seeds,
                                         cfg.seed, opt.jobs, cfg.sweep.objective);
    const auto tmp = opt.out / ("sweep_" + grid + ".tmp");
    train::write_sweep_csv(tmp, result);
    std::ifstream in(tmp);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        if (header) out << "grid," << line << '\n';
        header = false;
        continue;
      }
      out << grid << ',' << line << '\n';
    }
    in.close();
    fs::remove(tmp);
    const auto& b = result.summaries[result.best].cell;
    spdlog::info("sweep {}: best gamma {} p_pre {} p_post {}", grid, b.gamma, b.p_pre, b.p_post);
  }
  write_text(opt.out / "config.cfg", to_text(cfg));
  return 0;
}

namespace {

using Table = std::vector<std::map<std::string, std::string>>;

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  std::vector<std::string> header;
  Table rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    boost::split(cells, line, [](char c) { return c == ','; });
    if (header.empty()) {
      header = cells;
      continue;
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string num(const std::string& s, int digits) {
  if (s.empty()) return "--";
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(digits);
  o << std::stod(s);
  return o.str();
}

}  // namespace

int cmd_report(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw IoError("run directory '" + run_dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(run_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::ostringstream md;
  md << "# Run report: " << run_dir.filename().string() << "\n";
  for (const auto& f : files) {
    const auto name = f.filename().string();
    const auto rel = fs::relative(f, run_dir).string();
    if (name == "metrics.csv") {
      md << "\n## Scenario results (`" << rel << "`)\n\n"
         << "| Scenario | n | x [m] | y [m] | z [m] | Δd [m] | α [°] | β [°] | Acc. [%] |\n"
         << "|---|---|---|---|---|---|---|---|---|\n";
      for (const auto& r : read_csv(f)) {
        md << "| " << r.at("scenario") << " | " << r.at("n") << " | " << num(r.at("mae_x"), 3) << " | "
           << num(r.at("mae_y"), 3) << " | " << num(r.at("mae_z"), 3) << " | " << num(r.at("delta_d"), 3) << " | "
           << num(r.at("azimuth_mae"), 3) << " | " << num(r.at("elevation_mae"), 3) << " | "
           << num(r.at("accuracy_classes"), 2) << " |\n";
      }
    } else if (name == "seeds.csv") {
      md << "\n## Per-seed results (`" << rel << "`)\n\n"
         << "| Seed | x [m] | y [m] | z [m] | Δd [m] | α [°] | β [°] |\n|---|---|---|---|---|---|---|\n";
      for (const auto& r : read_csv(f)) {
        md << "| " << r.at("seed") << " | " << num(r.at("mae_x"), 3) << " | " << num(r.at("mae_y"), 3) << " | "
           << num(r.at("mae_z"), 3) << " | " << num(r.at("delta_d"), 3) << " | " << num(r.at("azimuth_mae"), 3)
           << " | " << num(r.at("elevation_mae"), 3) << " |\n";
      }
    } else if (name == "sweep.csv") {
      md << "\n## Sweep summary (`" << rel << "`)\n\n"
         << "| Grid | γ | p_pre | p_post | Δd [m] | α [°] | β [°] |\n|---|---|---|---|---|---|---|\n";
      for (const auto& r : read_csv(f)) {
        if (r.at("kind") == "run") continue;
        const bool best = r.at("kind") == "best";
        md << "| " << r.at("grid") << (best ? " (best)" : "") << " | " << num(r.at("gamma"), 3) << " | "
           << num(r.at("p_pre"), 1) << " | " << num(r.at("p_post"), 1) << " | " << num(r.at("delta_d"), 3) << " ± "
           << num(r.at("delta_d_std"), 3) << " | " << num(r.at("azimuth_mae"), 3) << " ± "
           << num(r.at("azimuth_mae_std"), 3) << " | " << num(r.at("elevation_mae"), 3) << " ± "
           << num(r.at("elevation_mae_std"), 3) << " |\n";
      }
    } else if (name == "confusion.csv") {
      const auto rows = read_csv(f);
      md << "\n## Confusion matrix (`" << rel << "`)\n\nRows are true classes, columns predictions.\n\n| |";
      for (std::size_t j = 0; j < rows.size(); ++j) md << ' ' << to_string(static_cast<JammerClass>(j)) << " |";
      md << "\n|---|";
      for (std::size_t j = 0; j < rows.size(); ++j) md << "---|";
      md << '\n';
      for (std::size_t i = 0; i < rows.size(); ++i) {
        md << "| " << to_string(static_cast<JammerClass>(i)) << " |";
        for (std::size_t j = 0; j < rows.size(); ++j) md << ' ' << rows[i].at("pred_" + std::to_string(j)) << " |";
        md << '\n';
      }
    } else if (name == "per_position.csv") {
      // Mean azimuth error on a 1 m grid per scenario.
      std::map<std::tuple<std::string, long, long>, std::pair<double, std::size_t>> bins;
      for (const auto& r : read_csv(f)) {
        const auto key = std::make_tuple(r.at("scenario"), std::lround(std::floor(std::stod(r.at("x")))),
                                         std::lround(std::floor(std::stod(r.at("y")))));
        auto& b = bins[key];
        b.first += std::stod(r.at("azimuth_error_deg"));
        ++b.second;
      }
      const auto map_path = f.parent_path() / "position_map.csv";
      std::ofstream out(map_path, std::ios::trunc);
      out << "scenario,x_cell,y_cell,count,mean_azimuth_error_deg\n";
      for (const auto& [k, v] : bins) {
        out << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ',' << v.second << ','
            << fmt(v.first / static_cast<double>(v.second)) << '\n';
      }
      md << "\n## Per-position errors\n\n`" << rel << "` binned to 1 m cells in `"
         << fs::relative(map_path, run_dir).string() << "`.\n";
    }
  }
  write_text(run_dir / "report.md", md.str());
  return 0;
}

}  // namespace jamloc::cli
