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

#ifndef SIRREG_RSIR_HPP_
#define SIRREG_RSIR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sirreg/moments.hpp"

namespace sirreg {

enum class FitMethod { kSir, kRsir };

std::string to_string(FitMethod method);

struct FitDiagnostics {
  // Condition number of the whitening matrix Sigma + tau I.
  double condition_number = 0.0;
  Index numerical_rank = 0;
  // Gamma carries no signal: every eigenvalue is (numerically) zero.
  bool uninformative = false;
  // lambda_d and lambda_{d+1} coincide, so the span is ill-determined.
  bool eigenvalue_tie = false;
};

/// Estimated central-subspace basis. Columns are unit norm, ordered by
/// decreasing eigenvalue, and signed so that the entry of largest magnitude
/// is positive.
struct FitResult {
  Basis basis;
  Vector eigenvalues;  // d leading eigenvalues, decreasing
  double tau = 0.0;
  FitMethod method = FitMethod::kSir;
  FitDiagnostics diagnostics;
};

/// Leading d eigenpairs of Gamma v = lambda (Sigma + shift I) v, solved by
/// Cholesky whitening and a symmetric eigensolve. Requires Sigma + shift I
/// positive definite.
FitResult generalized_eigen_fit(const SlicedMoments& m, int d, double shift);

/// Classical SIR: eigenvectors of Sigma^{-1} Gamma. Throws NumericalError
/// when Sigma is singular or ill-conditioned.
FitResult fit_sir(const SlicedMoments& m, int d);

/// Regularized SIR: eigenvectors of (Sigma + tau I)^{-1} Gamma, tau > 0.
FitResult fit_rsir(const SlicedMoments& m, int d, double tau);

/// Optimal loadings for fixed A under H_tau:
///   C_y = (A^T (Sigma + tau I) A)^{-1} A^T (xbar_y - xbar).
Loadings profile_loadings(const SlicedMoments& m, const Basis& a, double tau);

/// min over C of H_tau(A, C) - H_tau(0, 0)
///   = -sum_y f_y (xbar_y - xbar)^T A (A^T (Sigma + tau I) A)^{-1} A^T (xbar_y - xbar).
/// Depends on span(A) only. Throws NumericalError for rank-deficient A.
double profile_H(const SlicedMoments& m, const Basis& a, double tau);

struct TauSelection {
  std::vector<double> grid;
  std::vector<double> scores;  // +inf where a fit was impossible
  double chosen = 0.0;
  int folds = 0;
  std::uint64_t rng_seed = 0;

  bool operator==(const TauSelection&) const = default;
};

/// Cross-validated choice of tau.
///
/// Slices are formed once on the full data; folds are stratified by slice.
/// For each tau and fold the basis is fit on the training part (fit_sir when
/// tau == 0, fit_rsir otherwise), training loadings come from
/// profile_loadings, and the held-out fold is scored by
///   sum_y f_y^val ||(xbar_y^val - xbar^val) - Sigma^tr A C_y||^2.
/// Scores are fold averages; ties go to the smaller tau.
TauSelection select_tau_cv(const Dataset& data, int h, int d,
                           const std::vector<double>& grid, int folds,
                           std::uint64_t rng_seed);

/// Fold id per observation, stratified by slice label. Each slice is
/// shuffled with its own generator derived from rng_seed and dealt
/// round-robin across folds.
std::vector<int> stratified_folds(const SliceAssignment& slices, int folds,
                                  std::uint64_t rng_seed);

}  // namespace sirreg

#endif  // SIRREG_RSIR_HPP_
