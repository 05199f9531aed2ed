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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace nspshare {

/// SplitMix64 finalizer. Decorrelates nearby integer keys before they are
/// used as engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// FNV-1a hash of a role tag such as "noise" or "channel".
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Substream key derivation:
///   seed = mix64(mix64(mix64(master_seed) ^ counter) ^ fnv1a64(tag))
/// Every sampler draws from a stream keyed by (master seed, trial counter,
/// role tag), so results never depend on execution order and trials can run
/// concurrently without perturbing each other.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t counter,
                                           std::string_view tag) noexcept {
  return mix64(mix64(mix64(master_seed) ^ counter) ^ fnv1a64(tag));
}

/// Deterministic random stream. The engine is std::mt19937_64, whose output
/// sequence is bit-exact per the standard; all variate transforms below are
/// explicit, so a given seed produces the same draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_open() { return 1.0 - uniform(); }

  /// Standard normal N(0, 1) via Box-Muller.
  double gaussian() {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double phase = kTwoPi * uniform();
    return radius * std::cos(phase);
  }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = 1: exponential
  /// power, uniform phase.
  std::complex<double> complex_gaussian() {
    const double radius = std::sqrt(-std::log(uniform_open()));
    const double phase = kTwoPi * uniform();
    return {radius * std::cos(phase), radius * std::sin(phase)};
  }

  /// One draw from the Rayleigh law p(h) = (2h/rms^2) exp(-(h/rms)^2),
  /// parameterized so that E[h^2] = rms^2.
  double rayleigh(double rms) {
    return rms * std::sqrt(-std::log(uniform_open()));
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
};

inline RandomStream substream(std::uint64_t master_seed, std::uint64_t counter,
                              std::string_view tag) {
  return RandomStream(derive_stream_seed(master_seed, counter, tag));
}

}  // namespace nspshare
