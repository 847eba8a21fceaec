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

#include "sirreg/common.hpp"

#include <cmath>
#include <limits>

namespace sirreg {

double condition_number(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  const double lo = ev.minCoeff();
  if (hi == 0.0 || lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Index numerical_rank(const Matrix& symmetric, double rel_tol) {
  if (symmetric.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  if (hi == 0.0) return 0;
  return (ev.array() > rel_tol * hi).count();
}

}  // namespace sirreg
