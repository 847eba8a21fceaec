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

#include "sirreg/evalsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sirreg {
namespace {

double apply_link(Link link, double t) {
  switch (link) {
    case Link::kLinear:
      return t;
    case Link::kCubic:
      return t * t * t;
    case Link::kSinh:
      return std::sinh(t);
    case Link::kQuadratic:
      return t * t;
  }
  return t;
}

Matrix orthonormal_basis(const Basis& a) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) {
    throw NumericalError("subspace_distance: basis is rank-deficient");
  }
  const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  return q;
}

}  // namespace

std::string to_string(Link link) {
  switch (link) {
    case Link::kLinear:
      return "linear";
    case Link::kCubic:
      return "cubic";
    case Link::kSinh:
      return "sinh";
    case Link::kQuadratic:
      return "quadratic";
  }
  return "linear";
}

Link parse_link(const std::string& name) {
  if (name == "linear") return Link::kLinear;
  if (name == "cubic") return Link::kCubic;
  if (name == "sinh") return Link::kSinh;
  if (name == "quadratic") return Link::kQuadratic;
  throw InputError("unknown link '" + name + "'");
}

void SimSpec::validate() const {
  if (n < 2) throw InputError("simulate: n must be at least 2");
  if (p < 1) throw InputError("simulate: p must be positive");
  if (true_basis.rows() != p || true_basis.cols() < 1 || true_basis.cols() > p) {
    throw InputError("simulate: true basis must be p x d with 1 <= d <= p");
  }
  const Index d = true_basis.cols();
  const Matrix gram = true_basis.transpose() * true_basis;
  if ((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("simulate: true basis columns must be orthonormal");
  }
  if (!(noise_sd >= 0.0)) throw InputError("simulate: noise_sd must be >= 0");
  if (!(predictor_correlation >= 0.0 && predictor_correlation < 1.0)) {
    throw InputError("simulate: predictor correlation must lie in [0, 1)");
  }
}

Basis leading_direction(Index p, Index k) {
  k = std::clamp<Index>(k, 1, p);
  Basis a = Basis::Zero(p, 1);
  a.topRows(k).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  return a;
}

Dataset simulate(const SimSpec& spec) {
  spec.validate();
  const Index n = spec.n;
  const Index p = spec.p;

  Matrix corr(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      corr(i, j) = std::pow(spec.predictor_correlation,
                            static_cast<double>(std::abs(i - j)));
    }
  }
  const Matrix lower = corr.llt().matrixL();

  std::mt19937_64 rng(spec.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
  }
  Matrix x = z * lower.transpose();

  const Matrix index = x * spec.true_basis;
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    double value = 0.0;
    for (Index j = 0; j < index.cols(); ++j) value += apply_link(spec.link, index(i, j));
    y(i) = value + spec.noise_sd * normal(rng);
  }
  return Dataset(std::move(x), std::move(y));
}

double subspace_distance(const Basis& a, const Basis& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() < 1) {
    throw InputError("subspace_distance: bases must share shape p x d");
  }
  const Matrix qa = orthonormal_basis(a);
  const Matrix qb = orthonormal_basis(b);
  const Matrix diff = qa * qa.transpose() - qb * qb.transpose();
  const double d = static_cast<double>(a.cols());
  return std::clamp(diff.norm() / std::sqrt(2.0 * d), 0.0, 1.0);
}

}  // namespace sirreg
