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
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nspshare/rng.hpp"

namespace nspshare {

/// N_R x M_T complex channel from the radar transmit array to the
/// communication receive array.
struct InterferenceChannel {
  Eigen::MatrixXcd entries;
};

enum class PerturbationStyle {
  /// Raw Rayleigh wave-height magnitudes, zero phase (default).
  kRealPositiveRayleigh,
  /// Same magnitudes with independent uniform phases.
  kComplexRayleighUniformPhase,
};

/// Rayleigh wave-height perturbation of the channel coefficients; h_rms is
/// both the rms wave height and the rms of each perturbation entry.
struct PerturbationModel {
  double h_rms = 1.0;
  PerturbationStyle style = PerturbationStyle::kRealPositiveRayleigh;
};

/// (N_R*M_T) x (N_R*M_T) second moment E{vec(dH) vec(dH)^H} of the
/// perturbation, with vec the column-stacking operator.
struct SecondMomentMatrix {
  Eigen::MatrixXcd entries;
};

/// I.i.d. circularly-symmetric complex Gaussian entries with unit second
/// moment: Rayleigh magnitude of rms 1, uniform phase. Column-major fill
/// order is part of the determinism contract.
inline InterferenceChannel sample_interference_channel(int n_rx, int m_tx,
                                                       RandomStream& rng) {
  if (n_rx < 1 || m_tx < 1)
    throw std::invalid_argument(
        "sample_interference_channel: dimensions must be >= 1");
  Eigen::MatrixXcd h(n_rx, m_tx);
  for (int j = 0; j < m_tx; ++j)
    for (int i = 0; i < n_rx; ++i) h(i, j) = rng.complex_gaussian();
  return {std::move(h)};
}

/// One wave-height draw from p(h) = (2h/h_rms^2) exp(-(h/h_rms)^2).
/// h_rms = 0 degenerates to the zero height.
inline double sample_wave_height(const PerturbationModel& model,
                                 RandomStream& rng) {
  if (model.h_rms < 0.0)
    throw std::invalid_argument("sample_wave_height: h_rms must be >= 0");
  if (model.h_rms == 0.0) return 0.0;
  return rng.rayleigh(model.h_rms);
}

/// Root-mean-square wave height of N observed waves: sqrt(mean of h_n^2).
inline double rms_wave_height(const std::vector<double>& heights) {
  if (heights.empty())
    throw std::invalid_argument("rms_wave_height: empty height list");
  double acc = 0.0;
  for (double h : heights) acc += h * h;
  return std::sqrt(acc / static_cast<double>(heights.size()));
}

/// I.i.d. perturbation matrix with entry rms h_rms. Default style keeps the
/// raw nonnegative Rayleigh magnitudes; the alternate style attaches an
/// independent uniform phase to each entry. Column-major fill order.
inline Eigen::MatrixXcd sample_perturbation(int n_rx, int m_tx,
                                            const PerturbationModel& model,
                                            RandomStream& rng) {
  if (n_rx < 1 || m_tx < 1)
    throw std::invalid_argument("sample_perturbation: dimensions must be >= 1");
  if (model.h_rms < 0.0)
    throw std::invalid_argument("sample_perturbation: h_rms must be >= 0");
  Eigen::MatrixXcd delta = Eigen::MatrixXcd::Zero(n_rx, m_tx);
  if (model.h_rms == 0.0) return delta;
  for (int j = 0; j < m_tx; ++j) {
    for (int i = 0; i < n_rx; ++i) {
      const double magnitude = rng.rayleigh(model.h_rms);
      if (model.style == PerturbationStyle::kRealPositiveRayleigh) {
        delta(i, j) = std::complex<double>(magnitude, 0.0);
      } else {
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        delta(i, j) = std::polar(magnitude, phase);
      }
    }
  }
  return delta;
}

/// H_perturbed = H + dH.
inline InterferenceChannel perturbed_channel(const InterferenceChannel& channel,
                                             const Eigen::MatrixXcd& delta) {
  if (channel.entries.rows() != delta.rows() ||
      channel.entries.cols() != delta.cols())
    throw std::invalid_argument("perturbed_channel: dimension mismatch");
  return {channel.entries + delta};
}

/// Sample average of vec(dH) vec(dH)^H; Hermitian PSD by construction.
/// The paper's covariance takes no mean subtraction, so neither does this.
inline SecondMomentMatrix empirical_second_moment(
    const std::vector<Eigen::MatrixXcd>& samples) {
  if (samples.empty())
    throw std::invalid_argument("empirical_second_moment: no samples");
  const Eigen::Index dim = samples.front().size();
  Eigen::MatrixXcd moment = Eigen::MatrixXcd::Zero(dim, dim);
  for (const Eigen::MatrixXcd& s : samples) {
    if (s.size() != dim)
      throw std::invalid_argument(
          "empirical_second_moment: inconsistent sample dimensions");
    const Eigen::Map<const Eigen::VectorXcd> v(s.data(), s.size());
    moment.noalias() += v * v.adjoint();
  }
  moment /= static_cast<double>(samples.size());
  return {std::move(moment)};
}

}  // namespace nspshare
