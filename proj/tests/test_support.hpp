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

// Fixtures and independent oracles shared by the unit and acceptance tests.
// Nothing here calls into the code paths it is used to check.

#ifndef SIRREG_TESTS_TEST_SUPPORT_HPP_
#define SIRREG_TESTS_TEST_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>
#include <random>

#include "sirreg/evalsim.hpp"
#include "sirreg/moments.hpp"
#include "sirreg/rsir.hpp"

namespace sirreg::testing {

// Four points: {(0,0),(2,0)} in slice 0 and {(0,2),(2,2)} in slice 1.
// Sigma = I, Gamma = diag(0, 1), centered slice means (0,-1) and (0,1).
inline Dataset toy_dataset() {
  Matrix x(4, 2);
  x << 0, 0, 2, 0, 0, 2, 2, 2;
  Vector y(4);
  y << 1, 2, 3, 4;
  return Dataset(x, y);
}

inline SlicedMoments toy_moments() { return compute_sliced_moments(toy_dataset(), 2); }

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Random correlated data with a response that depends on the first
// coordinate, so slice means are informative.
inline Dataset random_dataset(Index n, Index p, std::mt19937_64& rng) {
  Matrix x = random_matrix(n, p, rng) * (Matrix::Identity(p, p) + 0.3 * random_matrix(p, p, rng));
  std::normal_distribution<double> normal;
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = x(i, 0) + 0.5 * x.row(i).sum() + 0.3 * normal(rng);
  return Dataset(x, y);
}

inline SlicedMoments random_moments(Index p, int h, std::mt19937_64& rng) {
  const Index n = std::max<Index>(3 * p + 2 * h, 4 * h);
  return compute_sliced_moments(random_dataset(n, p, rng), h);
}

// Gamma from its defining sum, accumulated term by term.
inline Matrix gamma_by_definition(const SlicedMoments& m) {
  Matrix g = Matrix::Zero(m.p(), m.p());
  for (Index y = 0; y < m.h(); ++y) {
    const Vector c = m.slice_means.col(y) - m.xbar;
    for (Index i = 0; i < m.p(); ++i)
      for (Index j = 0; j < m.p(); ++j) g(i, j) += m.f(y) * c(i) * c(j);
  }
  return g;
}

// Central finite-difference gradient of f at x.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f,
                          const Matrix& x, double step = 1e-6) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (Index k = 0; k < x.size(); ++k) {
    const double orig = probe.data()[k];
    probe.data()[k] = orig + step;
    const double up = f(probe);
    probe.data()[k] = orig - step;
    const double down = f(probe);
    probe.data()[k] = orig;
    grad.data()[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

// Random regular d x d matrix with singular values bounded away from 0.
inline Matrix random_regular(Index d, std::mt19937_64& rng) {
  while (true) {
    Matrix m = random_matrix(d, d, rng);
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector s = svd.singularValues();
    if (s(d - 1) > 0.2 && s(0) / s(d - 1) < 50.0) return m;
  }
}

// Single-index benchmark: cubic link on (e1 + e2) / sqrt(2), mild AR(1)
// correlation and small noise.
inline SimSpec single_index_spec(Index n, Index p, std::uint64_t seed) {
  SimSpec spec;
  spec.n = n;
  spec.p = p;
  spec.true_basis = leading_direction(p, 2);
  spec.link = Link::kCubic;
  spec.noise_sd = 0.1;
  spec.predictor_correlation = 0.3;
  spec.rng_seed = seed;
  return spec;
}

inline Dataset collinear_dataset(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix z = random_matrix(n, 3, rng);
  Matrix x(n, 6);
  x << z, z;
  std::normal_distribution<double> normal;
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = z(i, 0) + 0.5 * z(i, 1) + 0.1 * normal(rng);
  return Dataset(x, y);
}

// Brute-force minimizer of profile_H over unit directions (d = 1):
// 720 angles on the half circle for p = 2, a 5000-point Fibonacci sphere
// for p = 3.
inline Vector grid_minimizer(const SlicedMoments& m, double tau) {
  std::vector<Vector> candidates;
  if (m.p() == 2) {
    for (int k = 0; k < 720; ++k) {
      const double t = std::numbers::pi * k / 720.0;
      candidates.push_back((Vector(2) << std::cos(t), std::sin(t)).finished());
    }
  } else {
    const int count = 5000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      candidates.push_back((Vector(3) << r * std::cos(golden * k), r * std::sin(golden * k), z).finished());
    }
  }
  Vector best = candidates.front();
  double best_value = std::numeric_limits<double>::infinity();
  for (const Vector& v : candidates) {
    const double value = profile_H(m, v, tau);
    if (value < best_value) {
      best_value = value;
      best = v;
    }
  }
  return best;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace sirreg::testing

#endif  // SIRREG_TESTS_TEST_SUPPORT_HPP_
