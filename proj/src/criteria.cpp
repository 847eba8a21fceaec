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

#include "sirreg/criteria.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <string>

namespace sirreg {
namespace {

void check_shapes(const SlicedMoments& m, const Basis& a, const Loadings& c) {
  if (a.rows() != m.p()) {
    throw InputError("basis has " + std::to_string(a.rows()) +
                     " rows, expected p = " + std::to_string(m.p()));
  }
  if (a.cols() < 1 || a.cols() > m.p()) {
    throw InputError("basis must have between 1 and p columns");
  }
  if (c.rows() != a.cols() || c.cols() != m.h()) {
    throw InputError("loadings must be d x h = " + std::to_string(a.cols()) +
                     " x " + std::to_string(m.h()));
  }
  if (!a.allFinite() || !c.allFinite()) {
    throw InputError("basis and loadings must be finite");
  }
}

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InputError("tau must be a finite non-negative number");
  }
}

Eigen::LDLT<Matrix> invertible_sigma(const SlicedMoments& m) {
  if (condition_number(m.sigma) >= kMaxConditionNumber) {
    throw NumericalError(
        "SIR criterion undefined: Sigma_x not invertible (condition number "
        "at or above 1e12)");
  }
  return Eigen::LDLT<Matrix>(m.sigma);
}

}  // namespace

double eval_G(const SlicedMoments& m, const Basis& a, const Loadings& c) {
  check_shapes(m, a, c);
  const auto sigma_inv = invertible_sigma(m);
  const Matrix residuals = m.centered_means() - m.sigma * a * c;
  const Matrix weighted = sigma_inv.solve(residuals);
  double total = 0.0;
  for (Index y = 0; y < m.h(); ++y) {
    total += m.f(y) * residuals.col(y).dot(weighted.col(y));
  }
  return std::max(total, 0.0);
}

double eval_G_tau(const SlicedMoments& m, const Basis& a, const Loadings& c,
                  double tau) {
  check_shapes(m, a, c);
  check_tau(tau);
  const Matrix residuals = m.centered_means() - m.sigma * a * c;
  double total = 0.0;
  for (Index y = 0; y < m.h(); ++y) {
    total += m.f(y) * residuals.col(y).squaredNorm();
  }
  return total + tau * a.squaredNorm();
}

double eval_H_tau(const SlicedMoments& m, const Basis& a, const Loadings& c,
                  double tau) {
  check_tau(tau);
  const double g = eval_G(m, a, c);
  const Matrix ac = a * c;
  double penalty = 0.0;
  for (Index y = 0; y < m.h(); ++y) penalty += m.f(y) * ac.col(y).squaredNorm();
  return g + tau * penalty;
}

double eval_H_tau_shifted(const SlicedMoments& m, const Basis& a,
                          const Loadings& c, double tau) {
  check_shapes(m, a, c);
  check_tau(tau);
  const Matrix ac = a * c;
  const Matrix shifted = m.sigma * ac + tau * ac;
  const Matrix centered = m.centered_means();
  double total = 0.0;
  for (Index y = 0; y < m.h(); ++y) {
    total += m.f(y) * (ac.col(y).dot(shifted.col(y)) -
                       2.0 * centered.col(y).dot(ac.col(y)));
  }
  return total;
}

GradientPair grad_G_tau(const SlicedMoments& m, const Basis& a,
                        const Loadings& c, double tau) {
  check_shapes(m, a, c);
  check_tau(tau);
  const Matrix weighted_c = c * m.f.asDiagonal();  // column y is f_y C_y
  const Matrix sigma_a = m.sigma * a;
  const Matrix centered = m.centered_means();

  GradientPair g;
  g.grad_a = 2.0 * (m.sigma * (sigma_a * (c * weighted_c.transpose()) -
                               centered * weighted_c.transpose())) +
             2.0 * tau * a;
  g.grad_c = 2.0 * (sigma_a.transpose() * (sigma_a * c - centered)) *
             m.f.asDiagonal();
  return g;
}

Vector grad_a_kronecker(const SlicedMoments& m, const Basis& a,
                        const Loadings& c, double tau) {
  check_shapes(m, a, c);
  check_tau(tau);
  const Index pd = a.size();
  if (pd > kMaxKroneckerSize) {
    throw InputError("grad_a_kronecker: p*d too large to materialize");
  }
  const Eigen::Map<const Vector> vec_a(a.data(), pd);
  const Matrix centered = m.centered_means();
  Vector grad = Vector::Zero(pd);
  for (Index y = 0; y < m.h(); ++y) {
    const Matrix block =
        Eigen::kroneckerProduct(c.col(y).transpose(), m.sigma).eval();
    grad += m.f(y) * (block.transpose() * (block * vec_a) -
                      block.transpose() * centered.col(y));
  }
  return 2.0 * grad + 2.0 * tau * vec_a;
}

bool IdentityResidual::holds(double rel_tol) const {
  return residual <=
         rel_tol * (1.0 + std::abs(lhs) + std::abs(rhs_c) + std::abs(penalty));
}

IdentityResidual key_identity_residual(const SlicedMoments& m, const Basis& a,
                                       const Loadings& c, double tau) {
  const GradientPair g = grad_G_tau(m, a, c, tau);
  IdentityResidual r;
  r.lhs = a.cwiseProduct(g.grad_a).sum();
  r.rhs_c = c.cwiseProduct(g.grad_c).sum();
  r.penalty = 2.0 * tau * a.squaredNorm();
  r.residual = std::abs(r.lhs - r.rhs_c - r.penalty);
  return r;
}

double vec_kron_check(const SlicedMoments& m, const Basis& a,
                      const Loadings& c) {
  check_shapes(m, a, c);
  if (a.size() > kMaxKroneckerSize) {
    throw InputError("vec_kron_check: p*d too large to materialize");
  }
  const Eigen::Map<const Vector> vec_a(a.data(), a.size());
  double worst = 0.0;
  for (Index y = 0; y < m.h(); ++y) {
    const Vector direct = m.sigma * (a * c.col(y));
    const Matrix block =
        Eigen::kroneckerProduct(c.col(y).transpose(), m.sigma).eval();
    worst = std::max(worst, (direct - block * vec_a).norm());
  }
  return worst;
}

}  // namespace sirreg
