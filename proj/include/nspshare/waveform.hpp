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
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace nspshare {

/// M_T x L complex baseband sample matrix; row m is the signal of transmit
/// element m over L unit-spaced snapshots. Constant envelope: every sample
/// is +amplitude or -amplitude.
struct RadarWaveform {
  Eigen::MatrixXcd samples;
  double amplitude = 0.0;
};

/// M_T x M_T Hermitian positive-semidefinite waveform correlation matrix.
struct CorrelationMatrix {
  Eigen::MatrixXcd entries;
};

/// Generates constant-envelope BPSK rows with a Walsh-Hadamard sign pattern,
/// scaled by 1/sqrt(num_samples) so that X X^H = I.
///
/// num_samples must be at least num_tx and a multiple of the smallest power
/// of two >= num_tx (the Hadamard block size).
inline RadarWaveform generate_orthogonal_bpsk(int num_tx, int num_samples) {
  if (num_tx < 1)
    throw std::invalid_argument("generate_orthogonal_bpsk: num_tx must be >= 1");
  if (num_samples < num_tx)
    throw std::invalid_argument(
        "generate_orthogonal_bpsk: num_samples < num_tx, orthogonal rows are "
        "impossible");
  const int block =
      static_cast<int>(std::bit_ceil(static_cast<unsigned>(num_tx)));
  if (num_samples % block != 0)
    throw std::invalid_argument(
        "generate_orthogonal_bpsk: num_samples must be a multiple of " +
        std::to_string(block));

  const double amplitude = 1.0 / std::sqrt(static_cast<double>(num_samples));
  Eigen::MatrixXcd samples(num_tx, num_samples);
  for (int m = 0; m < num_tx; ++m) {
    for (int n = 0; n < num_samples; ++n) {
      // Sylvester-Hadamard sign: (-1)^popcount(m & n mod block).
      const bool negative =
          std::popcount(static_cast<unsigned>(m & (n % block))) & 1;
      samples(m, n) = std::complex<double>(negative ? -amplitude : amplitude, 0.0);
    }
  }
  return {std::move(samples), amplitude};
}

/// R_x = X X^H, the discrete realization of the correlation integral over
/// the observation window.
inline CorrelationMatrix correlation_matrix(const Eigen::MatrixXcd& samples) {
  return {samples * samples.adjoint()};
}

inline CorrelationMatrix correlation_matrix(const RadarWaveform& waveform) {
  return correlation_matrix(waveform.samples);
}

}  // namespace nspshare
