// Copyright 2026 The nspshare Authors
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

// Batch front end: parse a flat key = value config (command-line flags win),
// run the Monte Carlo experiment and emit CSV logs, summary tables, scatter
// data and a manifest. Exit codes: 0 success, 1 validation error, 2 runtime
// failure.

#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nspshare/experiment_io.hpp"
#include "nspshare/montecarlo.hpp"

namespace {

void print_summary(const nspshare::ExperimentSummary& summary) {
  std::cout << std::left << std::setw(16) << "arm" << std::right
            << std::setw(8) << "h_rms" << std::setw(12) << "rmse_deg"
            << std::setw(12) << "bias_deg" << std::setw(14) << "mean_leakage"
            << std::setw(10) << "n_trials" << '\n';
  for (const nspshare::SummaryRow& row : summary.rows) {
    std::cout << std::left << std::setw(16) << row.arm << std::right
              << std::setw(8) << row.h_rms << std::setw(12) << std::setprecision(4)
              << row.rmse_deg << std::setw(12) << row.bias_deg << std::setw(14)
              << row.mean_leakage << std::setw(10) << row.n_trials << '\n';
  }
  if (summary.failed_arm_entries > 0)
    std::cout << "failed arm entries: " << summary.failed_arm_entries << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Null-space-projection spectrum sharing simulator: MIMO radar angle "
      "estimation under a Rayleigh-perturbed interference channel"};
  app.set_version_flag("--version", std::string(nspshare::kToolVersion));

  std::string config_path;
  std::string out_dir = "out";
  std::string hrms_list;
  std::string projection_target;
  std::string perturbation_style;
  std::string target_placement;
  int trials = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  double grid_step_deg = 0.0;
  int m_tx = 0, m_rx = 0, n_rx = 0, samples = 0;

  app.add_option("--config", config_path, "flat key = value config file")
      ->check(CLI::ExistingFile);
  app.add_option("--trials", trials, "number of Monte Carlo trials");
  app.add_option("--seed", seed, "64-bit master seed");
  app.add_option("--hrms", hrms_list,
                 "comma list of rms wave heights, e.g. 1,2,3,4");
  app.add_option("--snr-db", snr_db, "per-receive-antenna SNR in dB");
  app.add_option("--out", out_dir, "output directory (default: out)");
  app.add_option("--projection-target", projection_target,
                 "perturbed | stale")
      ->check(CLI::IsMember({"perturbed", "stale"}));
  app.add_option("--perturbation-style", perturbation_style,
                 "real | complex")
      ->check(CLI::IsMember({"real", "complex"}));
  app.add_option("--target-placement", target_placement, "random | sweep")
      ->check(CLI::IsMember({"random", "sweep"}));
  app.add_option("--m-tx", m_tx, "radar transmit antennas");
  app.add_option("--m-rx", m_rx, "radar receive antennas");
  app.add_option("--n-rx", n_rx, "communication receive antennas");
  app.add_option("--samples", samples, "waveform snapshots per trial");
  app.add_option("--grid-step-deg", grid_step_deg,
                 "ML search grid step in degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  nspshare::ExperimentConfig config;
  try {
    if (!config_path.empty())
      config = nspshare::parse_config_file(config_path,
                                           /*validate_after=*/false);
    if (app.count("--trials")) config.num_trials = trials;
    if (app.count("--seed")) config.master_seed = seed;
    if (app.count("--hrms"))
      config.h_rms_values = nspshare::parse_double_list("h_rms", hrms_list);
    if (app.count("--snr-db")) config.snr_db = snr_db;
    if (app.count("--projection-target"))
      config.projection_target =
          nspshare::parse_projection_target(projection_target);
    if (app.count("--perturbation-style"))
      config.perturbation_style =
          nspshare::parse_perturbation_style(perturbation_style);
    if (app.count("--target-placement"))
      config.target_placement =
          nspshare::parse_target_placement(target_placement);
    if (app.count("--m-tx")) config.m_tx = m_tx;
    if (app.count("--m-rx")) config.m_rx = m_rx;
    if (app.count("--n-rx")) config.n_rx = n_rx;
    if (app.count("--samples")) config.num_samples = samples;
    if (app.count("--grid-step-deg")) config.grid_step_deg = grid_step_deg;
    config.validate();
  } catch (const nspshare::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }

  try {
    const nspshare::ExperimentResult result = nspshare::run_experiment(config);
    const nspshare::OutputFiles files = nspshare::emit_results(
        result.summary, result.trials, config, out_dir,
        nspshare::current_timestamp_utc());
    print_summary(result.summary);
    std::cout << "wrote " << files.trials.string() << ", "
              << files.summary.string() << ", " << files.scatter.size()
              << " scatter file(s), " << files.manifest.string() << '\n';
    for (const nspshare::SummaryRow& row : result.summary.rows) {
      if (row.n_trials < 1) {
        std::cerr << "error: arm '" << row.arm << "' (h_rms "
                  << row.h_rms << ") has no successful trial\n";
        return 2;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
