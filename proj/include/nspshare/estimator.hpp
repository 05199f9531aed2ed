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
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nspshare/array_geometry.hpp"
#include "nspshare/rng.hpp"
#include "nspshare/waveform.hpp"

namespace nspshare {

/// The ML objective denominator vanished at every grid angle, so no angle
/// estimate exists for this snapshot.
struct EstimationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// M_R x L received snapshot from a single point target.
struct ReceiveSnapshot {
  Eigen::MatrixXcd samples;
  double true_angle = 0.0;  // radians
  std::complex<double> path_gain{1.0, 0.0};
  double noise_power = 0.0;  // variance per complex sample
};

/// M_R x M_T matched-filter matrix E(tau_r, omega_D): the received snapshot
/// correlated against the delayed, Doppler-compensated transmit waveform.
struct MatchedFilterOutput {
  Eigen::MatrixXcd entries;
  double delay = 0.0;    // snapshots
  double doppler = 0.0;  // radians per snapshot
};

inline double degrees_to_radians(double degrees) {
  return degrees * (std::numbers::pi / 180.0);
}

/// Grid angle i in degrees for a [-90, 90] grid with the given step. Kept as
/// a single expression so every conversion site produces bit-identical
/// values.
inline double grid_degree(double step_deg, std::size_t index) {
  return -90.0 + step_deg * static_cast<double>(index);
}

/// Angle search grid over [-pi/2, pi/2].
struct MLGrid {
  std::vector<double> angles;  // radians, strictly increasing
  double step = 0.0;           // radians

  /// Grid over [-90, 90] degrees inclusive (when the step divides 180).
  static MLGrid uniform_degrees(double step_deg) {
    if (!(step_deg > 0.0))
      throw std::invalid_argument("MLGrid: step must be > 0");
    const auto count =
        static_cast<std::size_t>(std::floor(180.0 / step_deg + 1e-9)) + 1;
    MLGrid grid;
    grid.step = degrees_to_radians(step_deg);
    grid.angles.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      grid.angles.push_back(degrees_to_radians(grid_degree(step_deg, i)));
    return grid;
  }

  /// Index of a value previously taken from `angles` (exact match).
  std::size_t index_of(double angle_rad) const {
    for (std::size_t i = 0; i < angles.size(); ++i)
      if (angles[i] == angle_rad) return i;
    throw std::invalid_argument("MLGrid: angle is not a grid point");
  }
};

/// y(n) = path_gain * A(theta) x(n) + noise(n), with i.i.d. circular complex
/// Gaussian noise of per-entry variance noise_power. Delay is folded into
/// the steering phases and the Doppler shift is zero (stationary target at
/// the reference range). Column-major noise fill order is part of the
/// determinism contract.
inline ReceiveSnapshot simulate_received(const ArrayGeometry& geometry,
                                         const Eigen::MatrixXcd& waveform,
                                         double true_angle,
                                         std::complex<double> path_gain,
                                         double noise_power,
                                         RandomStream& rng) {
  if (noise_power < 0.0)
    throw std::invalid_argument("simulate_received: noise_power must be >= 0");
  if (waveform.rows() != geometry.num_tx)
    throw std::invalid_argument(
        "simulate_received: waveform rows must equal num_tx");

  const SteeringMatrix a = steering_matrix(
      receive_steering(geometry, true_angle),
      transmit_steering(geometry, true_angle));
  Eigen::MatrixXcd received = path_gain * (a.entries * waveform);
  if (noise_power > 0.0) {
    const double scale = std::sqrt(noise_power);
    for (Eigen::Index j = 0; j < received.cols(); ++j)
      for (Eigen::Index i = 0; i < received.rows(); ++i)
        received(i, j) += scale * rng.complex_gaussian();
  }
  return {std::move(received), true_angle, path_gain, noise_power};
}

/// E(tau_r, omega_D) = sum_n y(n) x(n - tau_r)^H exp(j omega_D n), the
/// discrete realization of the matched-filter integral. The delay is applied
/// in whole snapshots; in the default experiment both arguments are zero
/// (known and compensated).
inline MatchedFilterOutput matched_filter(const ReceiveSnapshot& snapshot,
                                          const Eigen::MatrixXcd& waveform,
                                          double delay = 0.0,
                                          double doppler = 0.0) {
  const Eigen::MatrixXcd& y = snapshot.samples;
  if (y.cols() != waveform.cols())
    throw std::invalid_argument(
        "matched_filter: snapshot and waveform lengths differ");

  if (delay == 0.0 && doppler == 0.0)
    return {y * waveform.adjoint(), delay, doppler};

  const auto shift = static_cast<Eigen::Index>(std::llround(delay));
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(y.rows(), waveform.rows());
  for (Eigen::Index n = 0; n < y.cols(); ++n) {
    const Eigen::Index m = n - shift;
    if (m < 0 || m >= waveform.cols()) continue;
    const std::complex<double> rotation =
        std::polar(1.0, doppler * static_cast<double>(n));
    e.noalias() += (y.col(n) * rotation) * waveform.col(m).adjoint();
  }
  return {std::move(e), delay, doppler};
}

namespace detail {

/// a_T^H R^T a_T, real nonnegative for Hermitian PSD R.
inline double ml_denominator(const Eigen::VectorXcd& a_t,
                             const Eigen::MatrixXcd& correlation) {
  const std::complex<double> q = a_t.dot(correlation.transpose() * a_t);
  return q.real();
}

/// Guard floor below which the transmit gain is treated as vanishing.
inline double denominator_floor(const Eigen::MatrixXcd& correlation) {
  return 1e-12 * std::abs(correlation.trace().real());
}

}  // namespace detail

/// The ML angle spectrum |a_R^H E a_T*|^2 / (M_R a_T^H R^T a_T), evaluated
/// at one angle. R is the correlation matrix of the waveform that was
/// actually transmitted (identity for the orthogonal set, P for a projected
/// set). Throws EstimationFailure when the denominator falls below the
/// guard floor at this angle; grid searches skip such points instead.
inline double ml_objective(double angle, const MatchedFilterOutput& filtered,
                           const CorrelationMatrix& correlation,
                           const ArrayGeometry& geometry) {
  const Eigen::VectorXcd a_r = receive_steering(geometry, angle).entries;
  const Eigen::VectorXcd a_t = transmit_steering(geometry, angle).entries;
  const double denominator =
      geometry.num_rx * detail::ml_denominator(a_t, correlation.entries);
  const double floor = geometry.num_rx *
                       detail::denominator_floor(correlation.entries);
  if (!(denominator > floor))
    throw EstimationFailure("ml_objective: degenerate denominator");
  const std::complex<double> numerator =
      a_r.dot(filtered.entries * a_t.conjugate());
  return std::norm(numerator) / denominator;
}

/// Grid arg max of the ML objective. Grid points with a vanishing
/// denominator are skipped; ties break toward the smallest angle.
inline double estimate_aoa(const ReceiveSnapshot& snapshot,
                           const Eigen::MatrixXcd& waveform_used,
                           const CorrelationMatrix& correlation_used,
                           const MLGrid& grid,
                           const ArrayGeometry& geometry) {
  if (grid.angles.empty())
    throw std::invalid_argument("estimate_aoa: empty grid");
  const MatchedFilterOutput filtered =
      matched_filter(snapshot, waveform_used);
  const double floor = detail::denominator_floor(correlation_used.entries);

  bool found = false;
  double best_angle = 0.0;
  double best_value = 0.0;
  for (double angle : grid.angles) {
    const Eigen::VectorXcd a_t = transmit_steering(geometry, angle).entries;
    const double gain = detail::ml_denominator(a_t, correlation_used.entries);
    if (!(gain > floor)) continue;
    const Eigen::VectorXcd a_r = receive_steering(geometry, angle).entries;
    const std::complex<double> numerator =
        a_r.dot(filtered.entries * a_t.conjugate());
    const double value = std::norm(numerator) / (geometry.num_rx * gain);
    if (!found || value > best_value) {
      found = true;
      best_value = value;
      best_angle = angle;
    }
  }
  if (!found)
    throw EstimationFailure(
        "estimate_aoa: denominator degenerate at every grid angle");
  return best_angle;
}

}  // namespace nspshare
