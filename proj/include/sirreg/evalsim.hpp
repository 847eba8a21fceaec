// Copyright 2026 The sirreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIRREG_EVALSIM_HPP_
#define SIRREG_EVALSIM_HPP_

#include <cstdint>
#include <string>

#include "sirreg/moments.hpp"

namespace sirreg {

// kQuadratic is symmetric, so SIR cannot recover its direction.
enum class Link { kLinear, kCubic, kSinh, kQuadratic };

std::string to_string(Link link);
Link parse_link(const std::string& name);

struct SimSpec {
  Index n = 100;
  Index p = 5;
  Basis true_basis;  // p x d, orthonormal columns
  Link link = Link::kLinear;
  double noise_sd = 0.0;
  double predictor_correlation = 0.0;  // AR(1) rho in [0, 1)
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Single-index basis (e_1 + ... + e_k) / sqrt(k) on the first k coordinates.
Basis leading_direction(Index p, Index k);

/// Draws X ~ N(0, R) with R_ij = rho^|i-j| and
///   Y = sum_j link(a_j^T x) + noise_sd * N(0, 1).
/// Deterministic for a given rng_seed.
Dataset simulate(const SimSpec& spec);

/// ||P_A - P_B||_F / sqrt(2d), in [0, 1]. Throws InputError on mismatched
/// shapes and NumericalError on rank-deficient inputs.
double subspace_distance(const Basis& a, const Basis& b);

}  // namespace sirreg

#endif  // SIRREG_EVALSIM_HPP_
