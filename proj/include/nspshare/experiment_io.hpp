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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "nspshare/montecarlo.hpp"

namespace nspshare {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest decimal that round-trips the exact double value.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace io_detail {

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t' ||
                           text.front() == '\r'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r'))
    text.remove_suffix(1);
  return text;
}

inline std::string_view strip_quotes(std::string_view text) {
  if (text.size() >= 2 &&
      ((text.front() == '"' && text.back() == '"') ||
       (text.front() == '\'' && text.back() == '\'')))
    return text.substr(1, text.size() - 2);
  return text;
}

inline double parse_double(std::string_view field, std::string_view value) {
  double out = 0.0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size())
    throw ConfigError(std::string(field) + ": expected a number, got '" +
                      std::string(value) + "'");
  return out;
}

inline long long parse_integer(std::string_view field,
                               std::string_view value) {
  long long out = 0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size())
    throw ConfigError(std::string(field) + ": expected an integer, got '" +
                      std::string(value) + "'");
  return out;
}

inline std::uint64_t parse_uint64(std::string_view field,
                                  std::string_view value) {
  std::uint64_t out = 0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size())
    throw ConfigError(std::string(field) +
                      ": expected an unsigned integer, got '" +
                      std::string(value) + "'");
  return out;
}

}  // namespace io_detail

/// Parses a comma-separated list of numbers such as "1,2,3,4".
inline std::vector<double> parse_double_list(std::string_view field,
                                             std::string_view value) {
  std::vector<double> out;
  std::string_view rest = io_detail::trim(value);
  if (rest.empty())
    throw ConfigError(std::string(field) + ": empty list");
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = io_detail::trim(rest.substr(0, comma));
    out.push_back(io_detail::parse_double(field, item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

inline std::string_view perturbation_style_name(PerturbationStyle style) {
  return style == PerturbationStyle::kRealPositiveRayleigh ? "real"
                                                           : "complex";
}

inline PerturbationStyle parse_perturbation_style(std::string_view value) {
  if (value == "real") return PerturbationStyle::kRealPositiveRayleigh;
  if (value == "complex") return PerturbationStyle::kComplexRayleighUniformPhase;
  throw ConfigError("perturbation_style must be 'real' or 'complex', got '" +
                    std::string(value) + "'");
}

inline std::string_view projection_target_name(ProjectionTarget target) {
  return target == ProjectionTarget::kPerturbedChannel ? "perturbed" : "stale";
}

inline ProjectionTarget parse_projection_target(std::string_view value) {
  if (value == "perturbed") return ProjectionTarget::kPerturbedChannel;
  if (value == "stale") return ProjectionTarget::kStaleChannel;
  throw ConfigError("projection_target must be 'perturbed' or 'stale', got '" +
                    std::string(value) + "'");
}

inline std::string_view target_placement_name(TargetPlacement placement) {
  return placement == TargetPlacement::kRandomGrid ? "random" : "sweep";
}

inline TargetPlacement parse_target_placement(std::string_view value) {
  if (value == "random") return TargetPlacement::kRandomGrid;
  if (value == "sweep") return TargetPlacement::kSweep;
  throw ConfigError("target_placement must be 'random' or 'sweep', got '" +
                    std::string(value) + "'");
}

/// Applies one config entry. Unknown keys are rejected by name.
inline void apply_config_entry(ExperimentConfig& config, std::string_view key,
                               std::string_view value) {
  using io_detail::parse_double;
  using io_detail::parse_integer;
  using io_detail::parse_uint64;
  if (key == "m_tx")
    config.m_tx = static_cast<int>(parse_integer(key, value));
  else if (key == "m_rx")
    config.m_rx = static_cast<int>(parse_integer(key, value));
  else if (key == "n_rx")
    config.n_rx = static_cast<int>(parse_integer(key, value));
  else if (key == "num_samples")
    config.num_samples = static_cast<int>(parse_integer(key, value));
  else if (key == "grid_step_deg")
    config.grid_step_deg = parse_double(key, value);
  else if (key == "snr_db")
    config.snr_db = parse_double(key, value);
  else if (key == "h_rms")
    config.h_rms_values = parse_double_list(key, value);
  else if (key == "num_trials")
    config.num_trials = static_cast<int>(parse_integer(key, value));
  else if (key == "master_seed")
    config.master_seed = parse_uint64(key, value);
  else if (key == "perturbation_style")
    config.perturbation_style = parse_perturbation_style(value);
  else if (key == "projection_target")
    config.projection_target = parse_projection_target(value);
  else if (key == "target_placement")
    config.target_placement = parse_target_placement(value);
  else if (key == "target_min_deg")
    config.target_min_deg = parse_double(key, value);
  else if (key == "target_max_deg")
    config.target_max_deg = parse_double(key, value);
  else
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

/// Reads a flat key = value config file. '#' starts a comment; blank lines
/// are skipped; values may be quoted. Missing keys keep their defaults.
inline ExperimentConfig parse_config_file(const std::string& path,
                                          bool validate_after = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  ExperimentConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos)
      text = text.substr(0, hash);
    text = io_detail::trim(text);
    if (text.empty()) continue;
    const auto equals = text.find('=');
    if (equals == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    const std::string_view key = io_detail::trim(text.substr(0, equals));
    const std::string_view value =
        io_detail::strip_quotes(io_detail::trim(text.substr(equals + 1)));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": empty key");
    apply_config_entry(config, key, value);
  }
  if (validate_after) config.validate();
  return config;
}

inline std::string format_h_rms_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

/// UTC timestamp for the manifest, e.g. 2026-08-09T12:34:56Z.
inline std::string current_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

struct OutputFiles {
  std::filesystem::path trials;
  std::filesystem::path summary;
  std::filesystem::path manifest;
  std::vector<std::pair<std::string, std::filesystem::path>> scatter;
};

namespace io_detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open output file '" + path.string() +
                             "'");
  return out;
}

inline void finish_output(std::ofstream& out,
                          const std::filesystem::path& path) {
  out.flush();
  if (!out)
    throw std::runtime_error("write failure on '" + path.string() + "'");
}

inline void append_trial_row(std::string& out, int trial_id,
                             std::string_view arm, double h_rms,
                             double theta_true_deg,
                             std::optional<double> theta_hat_deg, double leak,
                             int nullity, bool failed) {
  out += std::to_string(trial_id);
  out += ',';
  out += arm;
  out += ',';
  out += format_double(h_rms);
  out += ',';
  out += format_double(theta_true_deg);
  out += ',';
  out += theta_hat_deg ? format_double(*theta_hat_deg) : "nan";
  out += ',';
  out += format_double(leak);
  out += ',';
  out += std::to_string(nullity);
  out += ',';
  out += failed ? '1' : '0';
  out += '\n';
}

}  // namespace io_detail

/// Writes trials.csv, summary.csv, per-arm scatter files and the manifest
/// into out_dir (created if needed). File contents are deterministic for a
/// given result; only the manifest carries the timestamp.
inline OutputFiles emit_results(const ExperimentSummary& summary,
                                const std::vector<TrialResult>& trials,
                                const ExperimentConfig& config,
                                const std::string& out_dir,
                                std::string_view timestamp) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + out_dir +
                             "': " + ec.message());

  OutputFiles files;
  files.trials = dir / "trials.csv";
  files.summary = dir / "summary.csv";
  files.manifest = dir / "manifest";

  // trials.csv: one row per trial per arm (long format).
  {
    std::string body =
        "trial_id,arm,h_rms,theta_true_deg,theta_hat_deg,leakage,nullity,"
        "failed\n";
    int last_trial_id = -1;
    bool first_record = true;
    for (const TrialResult& r : trials) {
      const bool new_trial = first_record || r.trial_id != last_trial_id;
      first_record = false;
      last_trial_id = r.trial_id;
      if (new_trial) {
        io_detail::append_trial_row(body, r.trial_id, kArmOriginal, 0.0,
                                    r.theta_true_deg,
                                    r.theta_hat_original_deg,
                                    r.leakage_original, r.nullity,
                                    !r.theta_hat_original_deg.has_value());
        io_detail::append_trial_row(body, r.trial_id, kArmNsp, 0.0,
                                    r.theta_true_deg, r.theta_hat_nsp_deg,
                                    r.leakage_nsp, r.nullity,
                                    !r.theta_hat_nsp_deg.has_value());
      }
      io_detail::append_trial_row(
          body, r.trial_id, kArmNspPerturbed, r.h_rms, r.theta_true_deg,
          r.theta_hat_nsp_perturbed_deg, r.leakage_nsp_perturbed, r.nullity,
          !r.theta_hat_nsp_perturbed_deg.has_value());
      io_detail::append_trial_row(body, r.trial_id, kArmStaleLeakage, r.h_rms,
                                  r.theta_true_deg, r.theta_hat_nsp_deg,
                                  r.leakage_stale, r.nullity,
                                  !std::isfinite(r.leakage_stale));
    }
    auto out = io_detail::open_output(files.trials);
    out << body;
    io_detail::finish_output(out, files.trials);
  }

  // summary.csv.
  {
    auto out = io_detail::open_output(files.summary);
    out << "arm,h_rms,rmse_deg,bias_deg,mean_leakage,n_trials\n";
    for (const SummaryRow& row : summary.rows) {
      out << row.arm << ',' << format_double(row.h_rms) << ','
          << format_double(row.rmse_deg) << ',' << format_double(row.bias_deg)
          << ',' << format_double(row.mean_leakage) << ',' << row.n_trials
          << '\n';
    }
    io_detail::finish_output(out, files.summary);
  }

  // Scatter files: successful estimates only, Fig. 2/3 axes.
  const auto write_scatter = [&](const std::string& name, auto&& include,
                                 auto&& estimate) {
    const fs::path path = dir / ("scatter_" + name + ".csv");
    auto out = io_detail::open_output(path);
    out << "theta_true_deg,theta_hat_deg\n";
    int last_trial_id = -1;
    bool first_record = true;
    for (const TrialResult& r : trials) {
      const bool new_trial = first_record || r.trial_id != last_trial_id;
      first_record = false;
      last_trial_id = r.trial_id;
      if (!include(r, new_trial)) continue;
      const std::optional<double> theta = estimate(r);
      if (!theta) continue;
      out << format_double(r.theta_true_deg) << ',' << format_double(*theta)
          << '\n';
    }
    io_detail::finish_output(out, path);
    files.scatter.emplace_back(name, path);
  };

  write_scatter(
      std::string(kArmOriginal),
      [](const TrialResult&, bool new_trial) { return new_trial; },
      [](const TrialResult& r) { return r.theta_hat_original_deg; });
  write_scatter(
      std::string(kArmNsp),
      [](const TrialResult&, bool new_trial) { return new_trial; },
      [](const TrialResult& r) { return r.theta_hat_nsp_deg; });
  for (double h : config.h_rms_values) {
    write_scatter(
        std::string(kArmNspPerturbed) + "_hrms" + format_double(h),
        [h](const TrialResult& r, bool) { return r.h_rms == h; },
        [](const TrialResult& r) { return r.theta_hat_nsp_perturbed_deg; });
  }

  // Manifest: config echo plus provenance; with the config it reproduces
  // the run bit-exactly.
  {
    auto out = io_detail::open_output(files.manifest);
    out << "tool=simulate\n";
    out << "version=" << kToolVersion << '\n';
    out << "timestamp=" << timestamp << '\n';
    out << "m_tx=" << config.m_tx << '\n';
    out << "m_rx=" << config.m_rx << '\n';
    out << "n_rx=" << config.n_rx << '\n';
    out << "num_samples=" << config.num_samples << '\n';
    out << "grid_step_deg=" << format_double(config.grid_step_deg) << '\n';
    out << "snr_db=" << format_double(config.snr_db) << '\n';
    out << "h_rms=" << format_h_rms_list(config.h_rms_values) << '\n';
    out << "num_trials=" << config.num_trials << '\n';
    out << "master_seed=" << config.master_seed << '\n';
    out << "perturbation_style="
        << perturbation_style_name(config.perturbation_style) << '\n';
    out << "projection_target="
        << projection_target_name(config.projection_target) << '\n';
    out << "target_placement="
        << target_placement_name(config.target_placement) << '\n';
    out << "target_min_deg=" << format_double(config.target_min_deg) << '\n';
    out << "target_max_deg=" << format_double(config.target_max_deg) << '\n';
    out << "output.trials=" << files.trials.filename().string() << '\n';
    out << "output.summary=" << files.summary.filename().string() << '\n';
    for (const auto& [name, path] : files.scatter)
      out << "output.scatter." << name << '=' << path.filename().string()
          << '\n';
    io_detail::finish_output(out, files.manifest);
  }

  return files;
}

}  // namespace nspshare
