// Copyright 2026 The mudiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mudiv/cli.hpp"

namespace {

void print_list() {
  for (const auto& info : mudiv::cli::kExperiments) std::cout << info.name << "  " << info.description << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mudiv::cli;
  CLI::App app{"mudiv: cost-benefit analysis of multiuser diversity with feedback"};
  app.require_subcommand(0, 1);
  bool list_flag = false;
  app.add_flag("--list", list_flag, "List the experiments and exit");

  auto* list = app.add_subcommand("list", "List the experiments");
  auto* run = app.add_subcommand("run", "Run one experiment");

  std::string config_file;
  std::string experiment, snr_db, blocklength, l_fb, lambda_r, k_total, trials, seed, workers, output_dir, variant;
  run->add_option("--config", config_file, "Flat key = value config file")->check(CLI::ExistingFile);
  run->add_option("--experiment", experiment, "Experiment name (see `mudiv list`)");
  run->add_option("--snr-db", snr_db, "Average SNR in dB; comma-separated list allowed");
  run->add_option("--blocklength", blocklength, "Blocklength in symbols; comma-separated list allowed");
  run->add_option("--l-fb", l_fb, "Feedback bits per user");
  run->add_option("--lambda-r", lambda_r, "Downlink rate weight (FDD)");
  run->add_option("--k-total", k_total, "Users in the cell");
  run->add_option("--trials", trials, "Monte Carlo trials per estimate");
  run->add_option("--seed", seed, "Monte Carlo seed");
  run->add_option("--workers", workers, "Worker threads (MUDIV_WORKERS overrides)");
  run->add_option("--output-dir", output_dir, "Output directory");
  run->add_option("--sumrate-variant", variant, "joint | uplink_unconditional");

  CLI11_PARSE(app, argc, argv);

  if (list_flag || list->parsed()) {
    print_list();
    return 0;
  }
  if (!run->parsed()) {
    std::cout << app.help();
    return 0;
  }
  if (config_file.empty() && experiment.empty()) {
    std::cerr << "mudiv run: pass --config or --experiment\n";
    return 2;
  }

  try {
    ExperimentSpec spec = config_file.empty() ? ExperimentSpec{} : load_config(config_file);
    const std::pair<const char*, const std::string*> overrides[] = {
        {"experiment", &experiment}, {"snr_db", &snr_db},     {"blocklength", &blocklength},
        {"l_fb", &l_fb},             {"lambda_r", &lambda_r}, {"k_total", &k_total},
        {"trials", &trials},         {"seed", &seed},         {"workers", &workers},
        {"output_dir", &output_dir}, {"sumrate_variant", &variant}};
    for (const auto& [key, value] : overrides)
      if (!value->empty()) apply_option(spec, key, *value);
    apply_environment(spec);
    const auto result = run_experiment(spec);
    std::cout << result.summary;
    for (const auto& f : result.csv_files) std::cout << "wrote " << f.string() << "\n";
    std::cout << "wrote " << result.summary_file.string() << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "mudiv: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mudiv: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
