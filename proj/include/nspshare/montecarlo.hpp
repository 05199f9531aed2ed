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

#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nspshare/array_geometry.hpp"
#include "nspshare/channel.hpp"
#include "nspshare/estimator.hpp"
#include "nspshare/nsp.hpp"
#include "nspshare/rng.hpp"
#include "nspshare/waveform.hpp"

namespace nspshare {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Which channel the perturbed-projection arm nulls.
enum class ProjectionTarget {
  /// Project onto null(H + dH): the channel moved and the radar tracked it.
  kPerturbedChannel,
  /// Project onto null(H) while the true channel is H + dH (stale ICSI).
  kStaleChannel,
};

enum class TargetPlacement {
  kRandomGrid,  // uniform over grid points in [target_min, target_max] deg
  kSweep,       // cycle through those grid points by trial id
};

struct ExperimentConfig {
  int m_tx = 4;
  int m_rx = 4;
  int n_rx = 2;
  int num_samples = 256;
  double grid_step_deg = 0.5;
  double snr_db = 25.0;
  std::vector<double> h_rms_values = {1.0, 2.0, 3.0, 4.0};
  int num_trials = 1000;
  std::uint64_t master_seed = 1;
  PerturbationStyle perturbation_style =
      PerturbationStyle::kRealPositiveRayleigh;
  ProjectionTarget projection_target = ProjectionTarget::kPerturbedChannel;
  TargetPlacement target_placement = TargetPlacement::kRandomGrid;
  double target_min_deg = -60.0;
  double target_max_deg = 60.0;

  void validate() const {
    if (m_tx < 1) throw ConfigError("m_tx must be >= 1");
    if (m_rx < 1) throw ConfigError("m_rx must be >= 1");
    if (n_rx < 1) throw ConfigError("n_rx must be >= 1");
    if (n_rx >= m_tx)
      throw ConfigError(
          "n_rx must be < m_tx: a channel with n_rx >= m_tx has no null "
          "space to project into");
    if (num_samples < m_tx)
      throw ConfigError("num_samples must be >= m_tx");
    const int block =
        static_cast<int>(std::bit_ceil(static_cast<unsigned>(m_tx)));
    if (num_samples % block != 0)
      throw ConfigError("num_samples must be a multiple of " +
                        std::to_string(block) +
                        " (Hadamard block for m_tx)");
    if (!(grid_step_deg > 0.0) || grid_step_deg > 180.0)
      throw ConfigError("grid_step_deg must be in (0, 180]");
    if (!std::isfinite(snr_db)) throw ConfigError("snr_db must be finite");
    if (num_trials < 1) throw ConfigError("num_trials must be >= 1");
    if (h_rms_values.empty()) throw ConfigError("h_rms must be nonempty");
    for (double h : h_rms_values)
      if (!(h >= 0.0) || !std::isfinite(h))
        throw ConfigError("h_rms values must be finite and >= 0");
    if (target_min_deg < -90.0 || target_max_deg > 90.0 ||
        target_min_deg > target_max_deg)
      throw ConfigError(
          "target placement range must satisfy -90 <= min <= max <= 90");
    if (target_grid_count() < 1)
      throw ConfigError(
          "target placement range contains no grid point for this step");
  }

  ArrayGeometry geometry() const {
    return ArrayGeometry{.num_tx = m_tx, .num_rx = m_rx};
  }

  MLGrid make_grid() const { return MLGrid::uniform_degrees(grid_step_deg); }

  /// Per-receive-antenna SNR = |path_gain|^2 * (transmit power per snapshot)
  /// / noise_power, with unit path gain and transmit power m_tx/num_samples
  /// for the normalized orthogonal waveform.
  double noise_power() const {
    const double transmit_power =
        static_cast<double>(m_tx) / static_cast<double>(num_samples);
    return transmit_power / std::pow(10.0, snr_db / 10.0);
  }

  /// First grid index inside [target_min_deg, target_max_deg].
  std::size_t target_grid_first() const {
    const double lo = (target_min_deg + 90.0) / grid_step_deg;
    return static_cast<std::size_t>(std::ceil(lo - 1e-9));
  }

  /// Number of grid points inside the target placement range.
  std::size_t target_grid_count() const {
    const double hi = (target_max_deg + 90.0) / grid_step_deg;
    const auto last = static_cast<long long>(std::floor(hi + 1e-9));
    const auto first = static_cast<long long>(target_grid_first());
    return last < first ? 0 : static_cast<std::size_t>(last - first + 1);
  }
};

/// Per-trial, per-h_rms record of all waveform arms. Estimates are absent
/// where an arm failed (no null space, or the ML denominator degenerated at
/// every grid angle).
struct TrialResult {
  int trial_id = 0;
  double h_rms = 0.0;
  double theta_true_deg = 0.0;
  std::optional<double> theta_hat_original_deg;
  std::optional<double> theta_hat_nsp_deg;
  std::optional<double> theta_hat_nsp_perturbed_deg;
  double leakage_original = std::numeric_limits<double>::quiet_NaN();
  double leakage_nsp = std::numeric_limits<double>::quiet_NaN();
  double leakage_nsp_perturbed = std::numeric_limits<double>::quiet_NaN();
  double leakage_stale = std::numeric_limits<double>::quiet_NaN();
  int nullity = 0;
};

inline constexpr std::string_view kArmOriginal = "original";
inline constexpr std::string_view kArmNsp = "nsp";
inline constexpr std::string_view kArmNspPerturbed = "nsp_perturbed";
inline constexpr std::string_view kArmStaleLeakage = "stale_leakage";

struct SummaryRow {
  std::string arm;
  double h_rms = 0.0;  // 0 for the h-independent arms
  double rmse_deg = std::numeric_limits<double>::quiet_NaN();
  double bias_deg = std::numeric_limits<double>::quiet_NaN();
  double mean_leakage = std::numeric_limits<double>::quiet_NaN();
  int n_trials = 0;  // successful trials for the arm
};

struct ExperimentSummary {
  std::vector<SummaryRow> rows;
  int failed_arm_entries = 0;
};

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<TrialResult> trials;
};

namespace detail {

struct ArmAccumulator {
  double err_sq_sum = 0.0;
  double err_sum = 0.0;
  double leak_sum = 0.0;
  int n_estimates = 0;
  int n_leakages = 0;

  void add(std::optional<double> theta_hat_deg, double theta_true_deg,
           double leak) {
    if (theta_hat_deg) {
      const double err = *theta_hat_deg - theta_true_deg;
      err_sq_sum += err * err;
      err_sum += err;
      ++n_estimates;
    }
    if (std::isfinite(leak)) {
      leak_sum += leak;
      ++n_leakages;
    }
  }

  SummaryRow row(std::string_view arm, double h_rms) const {
    SummaryRow r;
    r.arm = std::string(arm);
    r.h_rms = h_rms;
    r.n_trials = n_estimates;
    if (n_estimates > 0) {
      r.rmse_deg = std::sqrt(err_sq_sum / n_estimates);
      r.bias_deg = err_sum / n_estimates;
    }
    if (n_leakages > 0) r.mean_leakage = leak_sum / n_leakages;
    return r;
  }
};

}  // namespace detail

/// Runs one independent trial: draws the interference channel, a unit-rms
/// perturbation, the target angle and the receiver noise from substreams
/// keyed by (master_seed, trial_id, role), then evaluates every arm against
/// the same noise and target. Perturbations for the h_rms sweep scale the
/// one unit draw, so arms stay paired across h as well. Returns one record
/// per configured h_rms value.
inline std::vector<TrialResult> run_trial(const ExperimentConfig& config,
                                          int trial_id) {
  config.validate();
  const ArrayGeometry geometry = config.geometry();
  const RadarWaveform waveform =
      generate_orthogonal_bpsk(config.m_tx, config.num_samples);
  const CorrelationMatrix r_original = correlation_matrix(waveform);
  const MLGrid grid = config.make_grid();
  const double noise_power = config.noise_power();
  const std::complex<double> path_gain{1.0, 0.0};

  // Target placement over the configured grid-point range.
  const std::size_t first = config.target_grid_first();
  const std::size_t count = config.target_grid_count();
  std::size_t target_index = first;
  if (config.target_placement == TargetPlacement::kRandomGrid) {
    auto target_stream = substream(config.master_seed,
                                   static_cast<std::uint64_t>(trial_id),
                                   "target");
    auto offset = static_cast<std::size_t>(target_stream.uniform() *
                                           static_cast<double>(count));
    if (offset >= count) offset = count - 1;
    target_index = first + offset;
  } else {
    target_index = first + static_cast<std::size_t>(trial_id) % count;
  }
  const double theta_true_rad = grid.angles[target_index];
  const double theta_true_deg =
      grid_degree(config.grid_step_deg, target_index);

  auto channel_stream = substream(config.master_seed,
                                  static_cast<std::uint64_t>(trial_id),
                                  "channel");
  const InterferenceChannel channel =
      sample_interference_channel(config.n_rx, config.m_tx, channel_stream);

  auto perturbation_stream = substream(config.master_seed,
                                       static_cast<std::uint64_t>(trial_id),
                                       "perturbation");
  const Eigen::MatrixXcd delta_unit = sample_perturbation(
      config.n_rx, config.m_tx,
      PerturbationModel{1.0, config.perturbation_style}, perturbation_stream);

  // All arms rebuild the noise stream from the same key, so they see the
  // identical noise realization (paired arms).
  const auto estimate_arm =
      [&](const Eigen::MatrixXcd& transmitted,
          const CorrelationMatrix& correlation) -> std::optional<double> {
    auto noise_stream = substream(config.master_seed,
                                  static_cast<std::uint64_t>(trial_id),
                                  "noise");
    const ReceiveSnapshot snapshot =
        simulate_received(geometry, transmitted, theta_true_rad, path_gain,
                          noise_power, noise_stream);
    try {
      const double rad =
          estimate_aoa(snapshot, transmitted, correlation, grid, geometry);
      return grid_degree(config.grid_step_deg, grid.index_of(rad));
    } catch (const EstimationFailure&) {
      return std::nullopt;
    }
  };

  const std::optional<double> theta_original =
      estimate_arm(waveform.samples, r_original);
  const double leak_original = leakage(channel, waveform.samples);

  // Unperturbed NSP arm; its projected waveform also drives the stale arm.
  std::optional<Projector> p_unperturbed;
  int nullity = 0;
  std::optional<double> theta_nsp;
  double leak_nsp = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXcd x_nsp;
  try {
    const NullSpaceBasis basis = null_space_basis(channel);
    nullity = basis.nullity();
    p_unperturbed = projector(basis);
  } catch (const NoNullSpaceError&) {
  }
  if (p_unperturbed) {
    x_nsp = project_waveform(*p_unperturbed, waveform);
    theta_nsp = estimate_arm(x_nsp, correlation_matrix(x_nsp));
    leak_nsp = leakage(channel, x_nsp);
  }

  std::vector<TrialResult> records;
  records.reserve(config.h_rms_values.size());
  for (double h_rms : config.h_rms_values) {
    TrialResult record;
    record.trial_id = trial_id;
    record.h_rms = h_rms;
    record.theta_true_deg = theta_true_deg;
    record.theta_hat_original_deg = theta_original;
    record.theta_hat_nsp_deg = theta_nsp;
    record.leakage_original = leak_original;
    record.leakage_nsp = leak_nsp;
    record.nullity = nullity;

    const InterferenceChannel perturbed =
        perturbed_channel(channel, h_rms * delta_unit);

    if (config.projection_target == ProjectionTarget::kPerturbedChannel) {
      try {
        const Projector p = projector(null_space_basis(perturbed));
        const Eigen::MatrixXcd x = project_waveform(p, waveform);
        record.theta_hat_nsp_perturbed_deg =
            estimate_arm(x, correlation_matrix(x));
        record.leakage_nsp_perturbed = leakage(perturbed, x);
      } catch (const NoNullSpaceError&) {
      }
    } else if (p_unperturbed) {
      // Stale projector: identical waveform and noise as the nsp arm, so
      // the estimate is reused rather than recomputed.
      record.theta_hat_nsp_perturbed_deg = theta_nsp;
      record.leakage_nsp_perturbed = leakage(perturbed, x_nsp);
    }

    if (p_unperturbed) record.leakage_stale = leakage(perturbed, x_nsp);
    records.push_back(std::move(record));
  }
  return records;
}

/// Aggregates trial records into per-arm, per-h_rms summary rows in a fixed
/// order: original, nsp, then nsp_perturbed and stale_leakage per h_rms in
/// config order. Failed arm entries are excluded and counted.
inline ExperimentSummary summarize(const std::vector<TrialResult>& trials,
                                   const ExperimentConfig& config) {
  detail::ArmAccumulator original;
  detail::ArmAccumulator nsp;
  std::vector<detail::ArmAccumulator> perturbed(config.h_rms_values.size());
  std::vector<detail::ArmAccumulator> stale(config.h_rms_values.size());
  int failed = 0;

  int last_trial_id = -1;
  bool first_record = true;
  for (const TrialResult& record : trials) {
    const bool new_trial =
        first_record || record.trial_id != last_trial_id;
    first_record = false;
    last_trial_id = record.trial_id;

    if (new_trial) {
      original.add(record.theta_hat_original_deg, record.theta_true_deg,
                   record.leakage_original);
      if (!record.theta_hat_original_deg) ++failed;
      nsp.add(record.theta_hat_nsp_deg, record.theta_true_deg,
              record.leakage_nsp);
      if (!record.theta_hat_nsp_deg) ++failed;
    }

    for (std::size_t k = 0; k < config.h_rms_values.size(); ++k) {
      if (record.h_rms != config.h_rms_values[k]) continue;
      perturbed[k].add(record.theta_hat_nsp_perturbed_deg,
                       record.theta_true_deg, record.leakage_nsp_perturbed);
      if (!record.theta_hat_nsp_perturbed_deg) ++failed;
      stale[k].add(record.theta_hat_nsp_deg, record.theta_true_deg,
                   record.leakage_stale);
      if (!std::isfinite(record.leakage_stale)) ++failed;
      break;
    }
  }

  ExperimentSummary summary;
  summary.failed_arm_entries = failed;
  summary.rows.push_back(original.row(kArmOriginal, 0.0));
  summary.rows.push_back(nsp.row(kArmNsp, 0.0));
  for (std::size_t k = 0; k < config.h_rms_values.size(); ++k) {
    summary.rows.push_back(
        perturbed[k].row(kArmNspPerturbed, config.h_rms_values[k]));
    SummaryRow stale_row =
        stale[k].row(kArmStaleLeakage, config.h_rms_values[k]);
    // The stale arm transmits the nsp waveform; report its leakage count.
    stale_row.n_trials = stale[k].n_leakages;
    summary.rows.push_back(std::move(stale_row));
  }
  return summary;
}

/// Runs the full experiment. Trials are independent pure functions of
/// (config, trial_id); this loop evaluates them in id order.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialResult> trials;
  trials.reserve(static_cast<std::size_t>(config.num_trials) *
                 config.h_rms_values.size());
  for (int trial_id = 0; trial_id < config.num_trials; ++trial_id) {
    std::vector<TrialResult> records = run_trial(config, trial_id);
    for (TrialResult& record : records) trials.push_back(std::move(record));
  }
  ExperimentSummary summary = summarize(trials, config);
  bool any_success = false;
  for (const SummaryRow& row : summary.rows)
    if (row.n_trials > 0) any_success = true;
  if (!any_success)
    throw std::runtime_error("run_experiment: every trial failed");
  return {std::move(summary), std::move(trials)};
}

}  // namespace nspshare
