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

#ifndef SIRREG_COMMON_HPP_
#define SIRREG_COMMON_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sirreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// p x d matrix whose span is the (candidate) central subspace.
using Basis = Matrix;
// d x h matrix, column y is C_y.
using Loadings = Matrix;

// Failure classes map one-to-one onto CLI exit codes 1, 2 and 3.

/// Malformed or inconsistent input (shapes, ranges, files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition failed (singular or ill-conditioned system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well-formed but mathematically impossible for this data.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Condition number above which a covariance is treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Spectral condition number of a symmetric PSD matrix; +inf when singular.
double condition_number(const Matrix& symmetric);

/// Number of eigenvalues above rel_tol * largest |eigenvalue|.
Index numerical_rank(const Matrix& symmetric, double rel_tol = 1e-10);

}  // namespace sirreg

#endif  // SIRREG_COMMON_HPP_
