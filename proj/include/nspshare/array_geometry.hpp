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

namespace nspshare {

/// Uniform linear array with broadside angle convention. Element spacing is
/// in carrier wavelengths; element 0 is the phase reference. Propagation
/// delays are folded into narrowband phase shifts, so the carrier frequency
/// never appears explicitly in the steering entries.
struct ArrayGeometry {
  int num_tx = 4;
  int num_rx = 4;
  double element_spacing = 0.5;  // wavelengths
  double carrier_angular_frequency =
      2.0 * std::numbers::pi * 3.55e9;  // rad/s, mid 3550-3600 MHz band

  void validate() const {
    if (num_tx < 1)
      throw std::invalid_argument("ArrayGeometry: num_tx must be >= 1");
    if (num_rx < 1)
      throw std::invalid_argument("ArrayGeometry: num_rx must be >= 1");
    if (!(element_spacing > 0.0))
      throw std::invalid_argument(
          "ArrayGeometry: element_spacing must be > 0");
  }
};

/// Array response phase vector a(theta); every entry has unit modulus.
struct SteeringVector {
  Eigen::VectorXcd entries;
  double angle = 0.0;  // radians
};

/// Rank-one transmit-receive steering matrix A(theta) = a_R a_T^T.
struct SteeringMatrix {
  Eigen::MatrixXcd entries;  // num_rx x num_tx
};

namespace detail {

inline Eigen::VectorXcd phase_ramp(int length, double spacing, double angle) {
  // Element k sees the phase -2*pi*spacing*k*sin(angle).
  Eigen::VectorXcd v(length);
  const double step = -2.0 * std::numbers::pi * spacing * std::sin(angle);
  for (int k = 0; k < length; ++k)
    v(k) = std::polar(1.0, step * static_cast<double>(k));
  return v;
}

}  // namespace detail

inline SteeringVector transmit_steering(const ArrayGeometry& geometry,
                                        double angle) {
  return {detail::phase_ramp(geometry.num_tx, geometry.element_spacing, angle),
          angle};
}

inline SteeringVector receive_steering(const ArrayGeometry& geometry,
                                       double angle) {
  return {detail::phase_ramp(geometry.num_rx, geometry.element_spacing, angle),
          angle};
}

/// A(theta) = a_R(theta) a_T(theta)^T. Plain transpose, no conjugation.
inline SteeringMatrix steering_matrix(const SteeringVector& receive,
                                      const SteeringVector& transmit) {
  return {receive.entries * transmit.entries.transpose()};
}

}  // namespace nspshare
