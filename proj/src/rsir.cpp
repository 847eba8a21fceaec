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

#include "sirreg/rsir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace sirreg {
namespace {

void check_dimension(const SlicedMoments& m, int d) {
  if (d < 1 || d > m.p()) {
    throw InputError("dimension d = " + std::to_string(d) +
                     " must lie in [1, p = " + std::to_string(m.p()) + "]");
  }
}

// Flip each column so its largest-magnitude entry (first one on ties) is
// positive.
void canonical_signs(Basis& basis) {
  for (Index j = 0; j < basis.cols(); ++j) {
    Index arg = 0;
    basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, j) < 0.0) basis.col(j) = -basis.col(j);
  }
}

// Score of one held-out fold against a training fit.
double holdout_score(const Dataset& data, const std::vector<Index>& rows,
                     const std::vector<int>& labels, int h,
                     const Matrix& fitted_means) {
  const Index p = data.p();
  Matrix sums = Matrix::Zero(p, h);
  Vector total = Vector::Zero(p);
  std::vector<Index> counts(static_cast<std::size_t>(h), 0);
  for (Index r : rows) {
    const int y = labels[static_cast<std::size_t>(r)];
    sums.col(y) += data.x().row(r).transpose();
    total += data.x().row(r).transpose();
    ++counts[static_cast<std::size_t>(y)];
  }
  const double n_val = static_cast<double>(rows.size());
  const Vector xbar = total / n_val;
  double score = 0.0;
  for (int y = 0; y < h; ++y) {
    const Index ny = counts[static_cast<std::size_t>(y)];
    if (ny == 0) continue;
    const Vector centered = sums.col(y) / static_cast<double>(ny) - xbar;
    score += (static_cast<double>(ny) / n_val) *
             (centered - fitted_means.col(y)).squaredNorm();
  }
  return score;
}

}  // namespace

std::string to_string(FitMethod method) {
  return method == FitMethod::kSir ? "sir" : "rsir";
}

FitResult generalized_eigen_fit(const SlicedMoments& m, int d, double shift) {
  check_dimension(m, d);
  const Index p = m.p();
  Matrix whitening = m.sigma;
  whitening.diagonal().array() += shift;

  Eigen::LLT<Matrix> llt(whitening);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("whitening matrix Sigma_x + tau I is not positive definite");
  }
  const auto lower = llt.matrixL();
  // L^{-1} Gamma L^{-T}
  const Matrix half = lower.solve(m.gamma);
  Matrix whitened = lower.solve(half.transpose()).transpose();
  whitened = 0.5 * (whitened + whitened.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  const Vector& ev = eig.eigenvalues();  // ascending

  FitResult fit;
  fit.tau = shift;
  fit.eigenvalues.resize(d);
  Matrix leading(p, d);
  for (int j = 0; j < d; ++j) {
    fit.eigenvalues(j) = ev(p - 1 - j);
    leading.col(j) = eig.eigenvectors().col(p - 1 - j);
  }
  fit.basis = llt.matrixU().solve(leading);
  fit.basis.colwise().normalize();
  canonical_signs(fit.basis);

  const double top = ev(p - 1);
  fit.diagnostics.condition_number = condition_number(whitening);
  fit.diagnostics.numerical_rank = numerical_rank(m.sigma);
  fit.diagnostics.uninformative =
      whitened.norm() == 0.0 || top <= 1e-12 * whitened.norm() || top <= 1e-12;
  if (d < p) {
    const double gap = ev(p - d) - ev(p - d - 1);
    fit.diagnostics.eigenvalue_tie =
        gap <= 1e-10 * std::max(std::abs(top), std::numeric_limits<double>::min());
  }
  return fit;
}

FitResult fit_sir(const SlicedMoments& m, int d) {
  check_dimension(m, d);
  const double cond = condition_number(m.sigma);
  if (!(cond < kMaxConditionNumber)) {
    throw NumericalError(
        "SIR needs an invertible Sigma_x (condition number " +
        std::to_string(cond) +
        "); use the regularized estimator (fit_rsir, --method rsir) instead");
  }
  FitResult fit = generalized_eigen_fit(m, d, 0.0);
  fit.method = FitMethod::kSir;
  return fit;
}

FitResult fit_rsir(const SlicedMoments& m, int d, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InputError("fit_rsir: tau must be a finite positive number");
  }
  FitResult fit = generalized_eigen_fit(m, d, tau);
  fit.method = FitMethod::kRsir;
  return fit;
}

Loadings profile_loadings(const SlicedMoments& m, const Basis& a, double tau) {
  if (a.rows() != m.p() || a.cols() < 1) {
    throw InputError("profile: basis must be p x d");
  }
  if (!(tau >= 0.0)) throw InputError("profile: tau must be >= 0");
  Matrix shifted_a = m.sigma * a;
  shifted_a += tau * a;
  const Matrix gram = a.transpose() * shifted_a;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gram + gram.transpose()));
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  if (!(hi > 0.0) || ev.minCoeff() <= 1e-12 * hi) {
    throw NumericalError(
        "profile: A^T (Sigma_x + tau I) A is singular; A must have full column "
        "rank");
  }
  const Matrix& v = eig.eigenvectors();
  return v * ev.cwiseInverse().asDiagonal() *
         (v.transpose() * (a.transpose() * m.centered_means()));
}

double profile_H(const SlicedMoments& m, const Basis& a, double tau) {
  const Loadings c = profile_loadings(m, a, tau);
  const Matrix fitted = a * c;
  const Matrix centered = m.centered_means();
  double value = 0.0;
  for (Index y = 0; y < m.h(); ++y) {
    value -= m.f(y) * centered.col(y).dot(fitted.col(y));
  }
  return value;
}

std::vector<int> stratified_folds(const SliceAssignment& slices, int folds,
                                  std::uint64_t rng_seed) {
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(slices.h));
  for (std::size_t i = 0; i < slices.labels.size(); ++i) {
    members[static_cast<std::size_t>(slices.labels[i])].push_back(
        static_cast<Index>(i));
  }
  std::vector<int> fold_of(slices.labels.size(), 0);
  std::size_t offset = 0;
  for (int y = 0; y < slices.h; ++y) {
    auto& rows = members[static_cast<std::size_t>(y)];
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed),
                      static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(y)};
    std::mt19937_64 rng(seq);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      fold_of[static_cast<std::size_t>(rows[j])] =
          static_cast<int>((offset + j) % static_cast<std::size_t>(folds));
    }
    offset += rows.size();
  }
  return fold_of;
}

TauSelection select_tau_cv(const Dataset& data, int h, int d,
                           const std::vector<double>& grid, int folds,
                           std::uint64_t rng_seed) {
  if (grid.empty()) throw InputError("tau grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw InputError("tau grid entries must be finite and >= 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InputError("tau grid must be strictly increasing");
    }
  }
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  if (d < 1 || d > data.p()) throw InputError("dimension d must lie in [1, p]");

  const SliceAssignment slices = slice_by_response(data, h);
  const std::vector<int> fold_of = stratified_folds(slices, folds, rng_seed);

  struct Fold {
    SlicedMoments train;
    std::vector<Index> holdout;
  };
  std::vector<Fold> prepared;
  for (int k = 0; k < folds; ++k) {
    std::vector<Index> train_rows;
    std::vector<Index> holdout;
    std::vector<int> train_labels;
    for (Index i = 0; i < data.n(); ++i) {
      if (fold_of[static_cast<std::size_t>(i)] == k) {
        holdout.push_back(i);
      } else {
        train_rows.push_back(i);
        train_labels.push_back(slices.labels[static_cast<std::size_t>(i)]);
      }
    }
    if (holdout.empty()) {
      throw InputError("cross-validation fold " + std::to_string(k) +
                       " is empty; use fewer folds");
    }
    if (static_cast<Index>(train_rows.size()) < h) {
      throw InputError("training fold has fewer than h observations");
    }
    const Dataset train = data.subset(train_rows);
    prepared.push_back(
        {compute_sliced_moments(
             train, SliceAssignment::from_labels(std::move(train_labels), h)),
         std::move(holdout)});
  }

  TauSelection out;
  out.grid = grid;
  out.folds = folds;
  out.rng_seed = rng_seed;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (double tau : grid) {
    double total = 0.0;
    for (const Fold& fold : prepared) {
      try {
        const FitResult fit =
            tau == 0.0 ? fit_sir(fold.train, d) : fit_rsir(fold.train, d, tau);
        const Loadings c = profile_loadings(fold.train, fit.basis, tau);
        const Matrix fitted = fold.train.sigma * fit.basis * c;
        total += holdout_score(data, fold.holdout, slices.labels, h, fitted);
      } catch (const NumericalError&) {
        total = kInf;
        break;
      }
    }
    out.scores.push_back(total == kInf ? kInf : total / folds);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] < out.scores[best]) best = i;
  }
  out.chosen = grid[best];
  return out;
}

}  // namespace sirreg
