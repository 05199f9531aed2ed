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

#include "nspshare/channel.hpp"

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <vector>

using namespace nspshare;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// Closed-form Rayleigh facts used as oracles below:
//   E[h^2] = h_rms^2, P(h <= h_rms) = 1 - e^-1, E[h] = h_rms * sqrt(pi)/2.
constexpr double kCdfAtRms = 0.6321205588285577;    // 1 - exp(-1)
constexpr double kMeanFactor = 0.8862269254527580;  // sqrt(pi)/2
}  // namespace

TEST_CASE("interference channel entries have unit second moment") {
  RandomStream rng(101);
  double power = 0.0;
  const int draws = 1000;
  const double n = 1e6;  // 10^6 entries via 1000 blocks of 10x100
  for (int k = 0; k < draws; ++k) {
    const InterferenceChannel h = sample_interference_channel(10, 100, rng);
    power += h.entries.squaredNorm();
  }
  REQUIRE_THAT(power / n, WithinRel(1.0, 0.01));
}

TEST_CASE("a wide random channel is full rank with clear singular values") {
  RandomStream rng(102);
  const InterferenceChannel h = sample_interference_channel(2, 4, rng);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.entries);
  REQUIRE(svd.singularValues().size() == 2);
  REQUIRE(svd.singularValues().minCoeff() > 1e-8);
}

TEST_CASE("channel sampling is a pure function of the seed") {
  RandomStream a(103), b(103);
  const InterferenceChannel ha = sample_interference_channel(3, 5, a);
  const InterferenceChannel hb = sample_interference_channel(3, 5, b);
  REQUIRE(ha.entries == hb.entries);
}

TEST_CASE("wave heights follow the Rayleigh law") {
  const PerturbationModel model{2.0, PerturbationStyle::kRealPositiveRayleigh};
  RandomStream rng(104);
  const int n = 1'000'000;
  double sum_sq = 0.0;
  int below_rms = 0;
  for (int i = 0; i < n; ++i) {
    const double h = sample_wave_height(model, rng);
    REQUIRE(h >= 0.0);
    sum_sq += h * h;
    if (h <= model.h_rms) ++below_rms;
  }
  // Empirical rms within 1% of h_rms (E[h^2] = h_rms^2).
  REQUIRE_THAT(std::sqrt(sum_sq / n), WithinRel(2.0, 0.01));
  // Empirical CDF at h_rms within 0.5% of 1 - e^-1.
  REQUIRE_THAT(static_cast<double>(below_rms) / n,
               WithinRel(kCdfAtRms, 0.005));
}

TEST_CASE("degenerate wave-height model returns zero") {
  RandomStream rng(105);
  REQUIRE(sample_wave_height({0.0, PerturbationStyle::kRealPositiveRayleigh},
                             rng) == 0.0);
  REQUIRE_THROWS_AS(
      sample_wave_height({-1.0, PerturbationStyle::kRealPositiveRayleigh},
                         rng),
      std::invalid_argument);
}

TEST_CASE("rms wave height of a finite sample") {
  // Direct formula: sqrt((3^2 + 4^2) / 2) = sqrt(12.5).
  REQUIRE_THAT(rms_wave_height({3.0, 4.0}),
               WithinAbs(3.5355339059327378, 1e-15));
  REQUIRE(rms_wave_height({5.0, 5.0, 5.0, 5.0}) == 5.0);
  REQUIRE_THROWS_AS(rms_wave_height({}), std::invalid_argument);
}

TEST_CASE("rms of a million sampled heights recovers h_rms") {
  const PerturbationModel model{2.0, PerturbationStyle::kRealPositiveRayleigh};
  RandomStream rng(106);
  std::vector<double> heights(1'000'000);
  for (double& h : heights) h = sample_wave_height(model, rng);
  REQUIRE_THAT(rms_wave_height(heights), WithinRel(2.0, 0.01));
}

TEST_CASE("perturbation entries have rms h_rms") {
  RandomStream rng(107);
  const PerturbationModel model{3.0, PerturbationStyle::kRealPositiveRayleigh};
  const Eigen::MatrixXcd delta = sample_perturbation(1000, 1000, model, rng);
  REQUIRE_THAT(std::sqrt(delta.squaredNorm() / 1e6), WithinRel(3.0, 0.01));
  // Default style keeps the raw nonnegative magnitudes.
  REQUIRE(delta.imag().cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(delta.real().minCoeff() >= 0.0);
}

TEST_CASE("complex perturbation style has the same rms and uniform phase") {
  RandomStream rng(108);
  const PerturbationModel model{
      3.0, PerturbationStyle::kComplexRayleighUniformPhase};
  const Eigen::MatrixXcd delta = sample_perturbation(500, 500, model, rng);
  REQUIRE_THAT(std::sqrt(delta.squaredNorm() / 25e4), WithinRel(3.0, 0.01));
  // Zero-mean phases push the entry mean toward zero.
  REQUIRE(std::abs(delta.mean()) < 0.02);
}

TEST_CASE("zero h_rms perturbs nothing") {
  RandomStream rng(109);
  const Eigen::MatrixXcd delta = sample_perturbation(
      2, 4, {0.0, PerturbationStyle::kRealPositiveRayleigh}, rng);
  REQUIRE(delta.norm() == 0.0);
}

TEST_CASE("perturbed channel is the entrywise sum") {
  RandomStream rng(110);
  const InterferenceChannel h = sample_interference_channel(2, 4, rng);
  const Eigen::MatrixXcd delta = sample_perturbation(
      2, 4, {1.5, PerturbationStyle::kRealPositiveRayleigh}, rng);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 4);

  REQUIRE(perturbed_channel(h, zero).entries == h.entries);
  REQUIRE(perturbed_channel({zero}, delta).entries == delta);
  REQUIRE((perturbed_channel(h, delta).entries - h.entries) == delta);
  REQUIRE_THROWS_AS(perturbed_channel(h, Eigen::MatrixXcd::Zero(3, 4)),
                    std::invalid_argument);
}

TEST_CASE("second moment of the real-positive perturbation") {
  RandomStream rng(111);
  const PerturbationModel model{2.0, PerturbationStyle::kRealPositiveRayleigh};
  std::vector<Eigen::MatrixXcd> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i)
    draws.push_back(sample_perturbation(2, 4, model, rng));
  const SecondMomentMatrix moment = empirical_second_moment(draws);
  REQUIRE(moment.entries.rows() == 8);

  // Diagonal: E[h^2] = h_rms^2 = 4. Off-diagonal: E[h]^2 = (pi/4) h_rms^2.
  const double off_expected =
      kMeanFactor * kMeanFactor * model.h_rms * model.h_rms;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const std::complex<double> m = moment.entries(i, j);
      REQUIRE(std::abs(m.imag()) < 1e-12);
      if (i == j)
        REQUIRE_THAT(m.real(), WithinRel(4.0, 0.02));
      else
        REQUIRE_THAT(m.real(), WithinRel(off_expected, 0.02));
    }
}

TEST_CASE("second moment of the complex style is diagonal") {
  RandomStream rng(112);
  const PerturbationModel model{
      2.0, PerturbationStyle::kComplexRayleighUniformPhase};
  std::vector<Eigen::MatrixXcd> draws;
  draws.reserve(100000);
  for (int i = 0; i < 100000; ++i)
    draws.push_back(sample_perturbation(2, 4, model, rng));
  const SecondMomentMatrix moment = empirical_second_moment(draws);
  const double h_sq = model.h_rms * model.h_rms;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (i == j)
        REQUIRE_THAT(moment.entries(i, j).real(), WithinRel(h_sq, 0.02));
      else
        REQUIRE(std::abs(moment.entries(i, j)) < 0.02 * h_sq);
    }
}

TEST_CASE("empirical second moment is Hermitian PSD for any sample set") {
  RandomStream rng(113);
  std::vector<Eigen::MatrixXcd> draws;
  for (int i = 0; i < 50; ++i)
    draws.push_back(sample_interference_channel(2, 3, rng).entries);
  const SecondMomentMatrix moment = empirical_second_moment(draws);
  REQUIRE((moment.entries - moment.entries.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(moment.entries);
  REQUIRE(eig.eigenvalues().minCoeff() >=
          -1e-8 * eig.eigenvalues().maxCoeff());
  REQUIRE_THROWS_AS(empirical_second_moment({}), std::invalid_argument);
}
