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

#ifndef SIRREG_CRITERIA_HPP_
#define SIRREG_CRITERIA_HPP_

#include "sirreg/moments.hpp"

namespace sirreg {

/// Gradients of G_tau. grad_a is reshaped to p x d, so vec(grad_a) is the
/// gradient with respect to vec(A); column y of grad_c is the gradient with
/// respect to C_y.
struct GradientPair {
  Matrix grad_a;
  Matrix grad_c;
};

/// Sigma^{-1}-weighted SIR discrepancy
///   G(A, C) = sum_y f_y r_y^T Sigma^{-1} r_y,  r_y = (xbar_y - xbar) - Sigma A C_y.
/// Throws NumericalError when Sigma is not invertible.
double eval_G(const SlicedMoments& m, const Basis& a, const Loadings& c);

/// Ridge SIR objective with Euclidean residuals
///   G_tau(A, C) = sum_y f_y ||r_y||^2 + tau ||vec(A)||^2.
/// Never needs Sigma^{-1}.
double eval_G_tau(const SlicedMoments& m, const Basis& a, const Loadings& c,
                  double tau);

/// H_tau(A, C) = G(A, C) + tau sum_y f_y ||A C_y||^2. Needs Sigma^{-1}.
double eval_H_tau(const SlicedMoments& m, const Basis& a, const Loadings& c,
                  double tau);

/// H_tau(A, C) - H_tau(0, 0), evaluated as
///   sum_y f_y C_y^T A^T (Sigma + tau I) A C_y - 2 sum_y f_y (xbar_y - xbar)^T A C_y.
/// Defined for every Sigma; with tau = 0 this is G(A, C) - G(0, 0).
double eval_H_tau_shifted(const SlicedMoments& m, const Basis& a,
                          const Loadings& c, double tau);

/// Analytic gradient of G_tau, computed in reshaped matrix form
///   grad_a = 2 sum_y f_y [Sigma^2 A C_y C_y^T - Sigma (xbar_y - xbar) C_y^T] + 2 tau A.
GradientPair grad_G_tau(const SlicedMoments& m, const Basis& a,
                        const Loadings& c, double tau);

/// grad_a from the explicit Kronecker form (C_y^T (x) Sigma). Materializes
/// p x pd blocks; throws InputError when p * d exceeds kMaxKroneckerSize.
Vector grad_a_kronecker(const SlicedMoments& m, const Basis& a,
                        const Loadings& c, double tau);

inline constexpr Index kMaxKroneckerSize = 10000;

/// Terms of vec(A)^T grad_a = sum_y C_y^T grad_c[y] + 2 tau ||vec(A)||^2.
struct IdentityResidual {
  double lhs = 0.0;      // vec(A)^T grad_a
  double rhs_c = 0.0;    // sum_y C_y^T grad_c[y]
  double penalty = 0.0;  // 2 tau ||vec(A)||^2
  double residual = 0.0; // |lhs - rhs_c - penalty|

  /// Tolerance contract: residual <= rel_tol * (1 + |lhs| + |rhs_c| + |penalty|).
  bool holds(double rel_tol = 1e-9) const;
};

IdentityResidual key_identity_residual(const SlicedMoments& m, const Basis& a,
                                       const Loadings& c, double tau);

/// max_y || Sigma A C_y - (C_y^T (x) Sigma) vec(A) ||, with the Kronecker
/// factor materialized.
double vec_kron_check(const SlicedMoments& m, const Basis& a,
                      const Loadings& c);

}  // namespace sirreg

#endif  // SIRREG_CRITERIA_HPP_
