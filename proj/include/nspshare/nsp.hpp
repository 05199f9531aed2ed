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
#include <stdexcept>

#include "nspshare/channel.hpp"
#include "nspshare/waveform.hpp"

namespace nspshare {

/// The channel has full column rank: no null space to project into, so
/// null-space-projection sharing is impossible for this geometry.
struct NoNullSpaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orthonormal basis of the channel's (numerical) null space, from the right
/// singular vectors whose singular values vanish relative to the largest.
struct NullSpaceBasis {
  Eigen::MatrixXcd columns;         // M_T x nullity, orthonormal
  Eigen::VectorXd singular_values;  // all min(N_R, M_T) values, descending
  double tolerance = 0.0;           // relative vanishing threshold used

  int nullity() const { return static_cast<int>(columns.cols()); }
};

/// Hermitian idempotent projector P = V V^H onto the null space.
struct Projector {
  Eigen::MatrixXcd entries;  // M_T x M_T
};

/// Null space of the channel via full SVD. A singular value counts toward
/// the rank only when it exceeds rel_tolerance * sigma_max, so scaling the
/// channel never changes the result. Columns of V beyond min(N_R, M_T) are
/// always part of the null space.
inline NullSpaceBasis null_space_basis(const InterferenceChannel& channel,
                                       double rel_tolerance = 1e-8) {
  const Eigen::MatrixXcd& h = channel.entries;
  if (h.rows() < 1 || h.cols() < 1)
    throw std::invalid_argument("null_space_basis: empty channel");
  if (!(rel_tolerance > 0.0))
    throw std::invalid_argument("null_space_basis: rel_tolerance must be > 0");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeFullV);
  const Eigen::VectorXd singular_values = svd.singularValues();
  const double cutoff =
      singular_values.size() > 0 ? rel_tolerance * singular_values(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
    if (singular_values(i) > cutoff) ++rank;

  const Eigen::Index nullity = h.cols() - rank;
  if (nullity < 1)
    throw NoNullSpaceError(
        "null_space_basis: channel has full column rank, no null space");
  return {svd.matrixV().rightCols(nullity), singular_values, rel_tolerance};
}

/// P = V V^H.
inline Projector projector(const NullSpaceBasis& basis) {
  if (basis.columns.cols() < 1)
    throw std::invalid_argument("projector: empty basis");
  return {basis.columns * basis.columns.adjoint()};
}

/// Projected waveform P X.
inline Eigen::MatrixXcd project_waveform(const Projector& p,
                                         const Eigen::MatrixXcd& samples) {
  if (p.entries.cols() != samples.rows())
    throw std::invalid_argument("project_waveform: dimension mismatch");
  return p.entries * samples;
}

inline Eigen::MatrixXcd project_waveform(const Projector& p,
                                         const RadarWaveform& waveform) {
  return project_waveform(p, waveform.samples);
}

/// Residual interference at the communication receiver, relative to the
/// transmitted (projected) waveform energy: ||H X||_F / ||X||_F.
/// 0/0 is defined as 0.
inline double leakage(const InterferenceChannel& true_channel,
                      const Eigen::MatrixXcd& projected) {
  if (true_channel.entries.cols() != projected.rows())
    throw std::invalid_argument("leakage: dimension mismatch");
  const double energy = projected.norm();
  if (energy == 0.0) return 0.0;
  return (true_channel.entries * projected).norm() / energy;
}

}  // namespace nspshare
