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

#include <iostream>

#include <CLI11.hpp>

#include "jamloc/cli/commands.hpp"
#include "jamloc/error.hpp"
#include "jamloc/log.hpp"

namespace {

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace jamloc;
  init_logging();

  CLI::App app{"GNSS jammer localization toolkit"};
  app.require_subcommand(1);

  cli::CommonOptions opt;
  std::string scale = "desk";
  std::string data, checkpoint, run_dir;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", opt.config, "INI run configuration");
    sub->add_option("--out", opt.out, "Output directory")->required();
    sub->add_option("--seed", opt.seed, "Override the configured seed");
    sub->add_option("--jobs", opt.jobs, "Worker threads for simulation and sweeps")->check(CLI::PositiveNumber);
    sub->add_flag("--overwrite", opt.overwrite, "Allow writing into a nonempty output directory");
    sub->add_option("--scale", scale, "Experiment scale")->check(CLI::IsMember({"desk", "paper"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate IQ datasets");
  add_common(simulate, true);
  auto* featurize = app.add_subcommand("featurize", "Extract features from simulated datasets");
  add_common(featurize, false);
  featurize->add_option("--data", data, "Directory with train.gjld and test.gjld")->required();
  auto* train = app.add_subcommand("train", "Train models over several seeds");
  add_common(train, true);
  train->add_option("--data", data, "Dataset or feature directory")->required();
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint per scenario");
  add_common(eval, false);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint (.gjw)")->required();
  eval->add_option("--data", data, "Dataset directory or file")->required();
  auto* sweep = app.add_subcommand("sweep", "Hyperparameter sweeps");
  add_common(sweep, true);
  sweep->add_option("--data", data, "Dataset or feature directory")->required();
  auto* report = app.add_subcommand("report", "Summarize a run directory into report.md");
  report->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    opt.scale = cli::scale_from_string(scale);
    if (command == "simulate") return cli::cmd_simulate(opt);
    if (command == "featurize") return cli::cmd_featurize(opt, data);
    if (command == "train") return cli::cmd_train(opt, data);
    if (command == "eval") return cli::cmd_eval(opt, checkpoint, data);
    if (command == "sweep") return cli::cmd_sweep(opt, data);
    return cli::cmd_report(run_dir);
  } catch (const Error& e) {
    std::cerr << "error: kind=" << e.kind() << " command=" << command << " message=" << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal command=" << command << " message=" << one_line(e.what()) << '\n';
    return 1;
  }
}
