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

#ifndef SIRREG_RIDGE_ALS_HPP_
#define SIRREG_RIDGE_ALS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sirreg/moments.hpp"

namespace sirreg {

/// Thrown by the C-update when A^T Sigma^2 A is singular, which is where a
/// degenerate ridge iteration ends up once A has collapsed.
class SingularUpdateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// How the A-update normal equations are solved.
enum class AUpdateSolver {
  kAuto,       // Kronecker when p*d <= kMaxKroneckerSize, else eigen-structured
  kKronecker,  // materialize the pd x pd system
  kStructured  // diagonalize Sigma^2 and sum_y f_y C_y C_y^T separately
};

/// C_y = (A^T Sigma^2 A)^{-1} A^T Sigma (xbar_y - xbar) for every slice.
Loadings als_update_loadings(const SlicedMoments& m, const Basis& a);

/// Minimizer of G_tau over A for fixed C:
///   {sum_y f_y (C_y C_y^T (x) Sigma^2) + tau I} vec(A) = sum_y f_y vec(Sigma (xbar_y - xbar) C_y^T).
Basis als_update_basis(const SlicedMoments& m, const Loadings& c, double tau,
                       AUpdateSolver solver = AUpdateSolver::kAuto);

/// One alternating least-squares sweep from A: returns (C^(k+1), A^(k+1)).
std::pair<Loadings, Basis> als_step(const SlicedMoments& m, const Basis& a,
                                    double tau);

struct AlsConfig {
  double tau = 1.0;
  int d = 1;
  int max_iters = 1000;
  double a_norm_tolerance = 1e-8;
  // Successive iterates closer than this (Frobenius) count as converged.
  double step_tolerance = 1e-12;
  std::uint64_t rng_seed = 0;
  double init_scale = 1.0;
  // Overrides the random Gaussian start when set (p x d).
  std::optional<Basis> initial_basis;

  void validate() const;
};

enum class AlsStopReason {
  kMaxIterations,
  kANormBelowTolerance,
  kSingularCUpdate,
  kConverged
};

std::string to_string(AlsStopReason reason);

/// One record per iterate A^(k), paired with its optimal loadings C^(k+1).
struct AlsRecord {
  int iter = 0;
  double objective = 0.0;     // G_tau(A^(k), C^(k+1))
  double a_norm = 0.0;        // ||A^(k)||_F
  double c_norm = 0.0;        // ||C^(k+1)||_F
  double product_norm = 0.0;  // max_y ||Sigma A^(k) C_y^(k+1)||
};

struct AlsTrace {
  std::vector<AlsRecord> records;
  AlsStopReason stop_reason = AlsStopReason::kMaxIterations;
  int iterations = 0;  // number of A-updates performed
  Basis initial_basis;
  Basis final_basis;
  double final_a_norm = 0.0;
  bool rank_warning = false;  // d exceeded rank(Sigma)

  /// Largest increase objective[k+1] - objective[k] along the trace.
  double max_objective_increase() const;
};

/// Runs the Li-Yin alternating least-squares iteration on G_tau until
/// max_iters, ||A^(k)|| < a_norm_tolerance, convergence, or a singular
/// C-update. The stop reason is recorded; this never throws on numerics.
AlsTrace run_als(const SlicedMoments& m, const AlsConfig& config);

/// Whether argmin G_tau is non-empty: true iff every Sigma (xbar_y - xbar)
/// vanishes up to the threshold. Witnesses are the 0-based slices that do not.
struct ExistenceReport {
  bool exists = true;
  std::vector<int> witnesses;
  double threshold = 0.0;
  std::vector<double> witness_norms;  // ||Sigma (xbar_y - xbar)|| for all y
  // Set when exists: the minimum value sum_y f_y ||xbar_y - xbar||^2.
  double minimum = 0.0;
};

/// 1e-10 * ||Sigma||_2 * max_y ||xbar_y - xbar||.
double default_existence_threshold(const SlicedMoments& m);

ExistenceReport check_existence(const SlicedMoments& m,
                                std::optional<double> threshold = {});

/// A pair (A, C) with G_tau(A, C) < G_tau(0, C), built from eigenvectors of
/// Sigma as in the constructive nonexistence argument.
struct Counterexample {
  Basis a;
  Loadings c;
  double epsilon = 0.0;
  int slice = 0;              // y0, 0-based
  double leading_eigenvalue = 0.0;  // lambda* paired with q*
  // -f_y0 sum_columns ((xbar_y0 - xbar)^T q)^2 + tau d epsilon^2
  double gap = 0.0;
};

Counterexample construct_counterexample(const SlicedMoments& m, double tau,
                                        int d,
                                        double epsilon_fraction = 0.5);

}  // namespace sirreg

#endif  // SIRREG_RIDGE_ALS_HPP_
