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

#include "nspshare/array_geometry.hpp"

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>

using namespace nspshare;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double kPi = std::numbers::pi;

ArrayGeometry geometry(int num_tx, int num_rx) {
  ArrayGeometry g;
  g.num_tx = num_tx;
  g.num_rx = num_rx;
  return g;
}
}  // namespace

TEST_CASE("broadside steering is all ones") {
  const SteeringVector a = transmit_steering(geometry(4, 4), 0.0);
  REQUIRE(a.entries.size() == 4);
  for (int k = 0; k < 4; ++k) {
    REQUIRE(a.entries(k).real() == 1.0);
    REQUIRE(a.entries(k).imag() == 0.0);
  }
}

TEST_CASE("30 degree transmit steering on two elements") {
  // Direct evaluation: sin 30 deg = 0.5, so the second entry is
  // exp(-j*2*pi*0.5*0.5) = exp(-j*pi/2) = -j.
  const SteeringVector a = transmit_steering(geometry(2, 2), kPi / 6.0);
  REQUIRE_THAT(a.entries(0).real(), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(a.entries(1).real(), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(a.entries(1).imag(), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("receive steering at -30 degrees flips the phase") {
  const SteeringVector a = receive_steering(geometry(2, 2), -kPi / 6.0);
  REQUIRE_THAT(a.entries(1).real(), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(a.entries(1).imag(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("steering norm equals element count at any angle") {
  const ArrayGeometry g = geometry(5, 3);
  for (double deg = -90.0; deg <= 90.0; deg += 7.5) {
    const double angle = deg * kPi / 180.0;
    REQUIRE_THAT(transmit_steering(g, angle).entries.squaredNorm(),
                 WithinAbs(5.0, 1e-12));
    REQUIRE_THAT(receive_steering(g, angle).entries.squaredNorm(),
                 WithinAbs(3.0, 1e-12));
  }
}

TEST_CASE("conjugate symmetry: conj(a(theta)) = a(-theta)") {
  const ArrayGeometry g = geometry(4, 6);
  for (double deg = -88.0; deg <= 88.0; deg += 11.0) {
    const double angle = deg * kPi / 180.0;
    const Eigen::VectorXcd lhs = receive_steering(g, angle).entries.conjugate();
    const Eigen::VectorXcd rhs = receive_steering(g, -angle).entries;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("steering depends on the angle only through its sine") {
  const ArrayGeometry g = geometry(4, 4);
  for (double deg : {10.0, 35.0, 60.0}) {
    const double theta = deg * kPi / 180.0;
    const double mirrored = kPi - theta;  // same sine up to rounding
    const Eigen::VectorXcd lhs = transmit_steering(g, theta).entries;
    const Eigen::VectorXcd rhs = transmit_steering(g, mirrored).entries;
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("steering matrix at broadside is all ones") {
  const ArrayGeometry g = geometry(2, 2);
  const SteeringMatrix a =
      steering_matrix(receive_steering(g, 0.0), transmit_steering(g, 0.0));
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 2; ++k)
      REQUIRE(std::abs(a.entries(l, k) - std::complex<double>(1.0, 0.0)) <
              1e-15);
}

TEST_CASE("steering matrix is the entrywise outer product with rank one") {
  const ArrayGeometry g = geometry(4, 3);
  for (double deg : {-72.5, -13.0, 0.5, 41.0, 89.0}) {
    const double angle = deg * kPi / 180.0;
    const SteeringVector a_r = receive_steering(g, angle);
    const SteeringVector a_t = transmit_steering(g, angle);
    const SteeringMatrix a = steering_matrix(a_r, a_t);
    REQUIRE(a.entries.rows() == 3);
    REQUIRE(a.entries.cols() == 4);

    // Brute-force entrywise check of A[l][k] = a_R[l] * a_T[k].
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 4; ++k)
        REQUIRE(std::abs(a.entries(l, k) - a_r.entries(l) * a_t.entries(k)) ==
                0.0);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a.entries);
    REQUIRE(svd.singularValues()(1) < 1e-12);
    REQUIRE_THAT(a.entries.squaredNorm(), WithinAbs(12.0, 1e-9));
  }
}

TEST_CASE("every steering matrix entry is unit modulus on a 1 degree grid") {
  const ArrayGeometry g = geometry(4, 4);
  for (int deg = -90; deg <= 90; ++deg) {
    const double angle = deg * kPi / 180.0;
    const SteeringMatrix a =
        steering_matrix(receive_steering(g, angle), transmit_steering(g, angle));
    for (int l = 0; l < 4; ++l)
      for (int k = 0; k < 4; ++k)
        REQUIRE_THAT(std::abs(a.entries(l, k)), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("geometry validation rejects degenerate parameters") {
  REQUIRE_THROWS_AS(geometry(0, 4).validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(geometry(4, 0).validate(), std::invalid_argument);
  ArrayGeometry g = geometry(4, 4);
  g.element_spacing = 0.0;
  REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
}
