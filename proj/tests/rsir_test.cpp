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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "sirreg/evalsim.hpp"
#include "sirreg/rsir.hpp"
#include "test_support.hpp"

namespace sirreg {
namespace {

TEST(FitSirTest, ToyFixture) {
  const auto fit = fit_sir(testing::toy_moments(), 1);
  EXPECT_EQ(fit.method, FitMethod::kSir);
  EXPECT_NEAR(fit.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(fit.basis(0, 0), 0.0, 1e-14);
  EXPECT_NEAR(fit.basis(1, 0), 1.0, 1e-14);
}

TEST(FitSirTest, SingleSliceIsUninformative) {
  const auto m = compute_sliced_moments(testing::toy_dataset(), 1);
  const auto fit = fit_sir(m, 2);
  EXPECT_EQ(fit.eigenvalues, Vector::Zero(2));
  EXPECT_TRUE(fit.diagnostics.uninformative);
  EXPECT_LT((fit.basis.transpose() * fit.basis - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(FitSirTest, SingularCovarianceRejected) {
  std::mt19937_64 rng(5);
  const auto wide = compute_sliced_moments(testing::random_dataset(30, 50, rng), 3);
  EXPECT_THROW(fit_sir(wide, 1), NumericalError);
  EXPECT_THROW(fit_sir(compute_sliced_moments(testing::collinear_dataset(60, 1), 5), 1), NumericalError);
  EXPECT_THROW(fit_sir(testing::toy_moments(), 3), InputError);
}

TEST(FitRsirTest, ToyFixture) {
  const auto fit = fit_rsir(testing::toy_moments(), 1, 1.0);
  EXPECT_EQ(fit.method, FitMethod::kRsir);
  EXPECT_NEAR(fit.eigenvalues(0), 0.5, 1e-14);
  EXPECT_NEAR(fit.basis(1, 0), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(fit.tau, 1.0);
  EXPECT_THROW(fit_rsir(testing::toy_moments(), 1, 0.0), InputError);
}

TEST(FitRsirTest, VanishingTauRecoversSir) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = testing::random_moments(5, 6, rng);
    const int d = 1 + trial % 3;
    EXPECT_LT(subspace_distance(fit_rsir(m, d, 1e-12).basis, fit_sir(m, d).basis), 1e-6);
  }
}

TEST(FitRsirTest, WorksWhenPExceedsN) {
  const auto data = simulate(testing::single_index_spec(30, 50, 11));
  const auto m = compute_sliced_moments(data, 5);
  EXPECT_THROW(fit_sir(m, 1), NumericalError);
  const auto fit = fit_rsir(m, 1, 0.1);
  EXPECT_TRUE(fit.eigenvalues.allFinite());
  EXPECT_NEAR(fit.basis.col(0).norm(), 1.0, 1e-12);
}

TEST(FitRsirTest, EigenpairsSortedNormalizedAndSigned) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_moments(6, 5, rng);
    const double tau = 0.01 * (trial + 1);
    const auto fit = fit_rsir(m, 4, tau);
    Matrix shifted = m.sigma;
    shifted.diagonal().array() += tau;
    for (Index j = 0; j < 4; ++j) {
      const Vector v = fit.basis.col(j);
      EXPECT_NEAR(v.norm(), 1.0, 1e-12);
      EXPECT_LE((m.gamma * v - fit.eigenvalues(j) * shifted * v).norm(), 1e-8 * m.gamma.norm());
      Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(v(arg), 0.0);
      if (j > 0) EXPECT_LE(fit.eigenvalues(j), fit.eigenvalues(j - 1));
      EXPECT_GE(fit.eigenvalues(j), -1e-10 * fit.eigenvalues(0));
    }
  }
}

TEST(FitRsirTest, RotationEquivariance) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = testing::random_dataset(80, 4, rng);
    const Matrix q = Eigen::HouseholderQR<Matrix>(testing::random_matrix(4, 4, rng)).householderQ();
    const Dataset rotated(data.x() * q.transpose(), data.y());
    const auto m = compute_sliced_moments(data, 5);
    const auto mr = compute_sliced_moments(rotated, 5);
    EXPECT_LT(subspace_distance(q * fit_sir(m, 2).basis, fit_sir(mr, 2).basis), 1e-8);
    EXPECT_LT(subspace_distance(q * fit_rsir(m, 2, 0.3).basis, fit_rsir(mr, 2, 0.3).basis), 1e-8);
  }
}

TEST(ProfileTest, ToyValues) {
  const auto m = testing::toy_moments();
  const Basis e2 = (Basis(2, 1) << 0, 1).finished();
  const Basis e1 = (Basis(2, 1) << 1, 0).finished();
  EXPECT_NEAR(profile_H(m, e2, 1.0), -0.5, 1e-15);
  EXPECT_EQ(profile_H(m, e1, 1.0), 0.0);
  EXPECT_THROW(profile_H(m, Basis::Zero(2, 1), 1.0), NumericalError);
}

TEST(ProfileTest, GridOracleOnToyPlane) {
  const auto m = testing::toy_moments();
  const Vector best = testing::grid_minimizer(m, 1.0);
  const Vector lead = fit_rsir(m, 1, 1.0).basis.col(0);
  EXPECT_GT(std::abs(best.dot(lead)), 0.9999);
}

TEST(ProfileTest, GridOracleMatchesEigenDirection) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Index p = 2 + trial % 2;
    const auto m = testing::random_moments(p, 4, rng);
    const double tau = 0.05 + 0.1 * trial;
    const Vector best = testing::grid_minimizer(m, tau);
    const Vector lead = fit_rsir(m, 1, tau).basis.col(0);
    EXPECT_GT(std::abs(best.dot(lead)), 0.999) << "trial " << trial;
  }
}

TEST(ProfileTest, DependsOnSpanOnly) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = testing::random_moments(6, 5, rng);
    const Index d = 1 + trial % 3;
    const Basis a = testing::random_matrix(6, d, rng);
    const Matrix mm = testing::random_regular(d, rng);
    const double base = profile_H(m, a, 0.2);
    EXPECT_LE(base, 0.0);
    EXPECT_LE(std::abs(profile_H(m, a * mm, 0.2) - base), 1e-10 * std::abs(base));
  }
}

TEST(ProfileTest, FittedSpanIsLocalMinimum) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = testing::random_moments(5, 5, rng);
    const int d = 1 + trial % 3;
    const double tau = 0.4;
    const Basis best = fit_rsir(m, d, tau).basis;
    const double value = profile_H(m, best, tau);
    for (int k = 0; k < 100; ++k) {
      Matrix e = testing::random_matrix(5, d, rng);
      e /= e.norm();
      EXPECT_GE(profile_H(m, best + 1e-3 * e, tau), value - 1e-12);
    }
  }
}

TEST(FoldsTest, StratifiedAndDeterministic) {
  std::mt19937_64 rng(31);
  const Dataset data = testing::random_dataset(53, 3, rng);
  const auto slices = slice_by_response(data, 4);
  const auto folds = stratified_folds(slices, 5, 77);
  EXPECT_EQ(folds, stratified_folds(slices, 5, 77));
  EXPECT_NE(folds, stratified_folds(slices, 5, 78));
  std::vector<int> sizes(5, 0);
  for (int f : folds) ++sizes[f];
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_LE(*hi - *lo, 1);
  // Every slice spreads over the folds as evenly as possible.
  for (int y = 0; y < 4; ++y) {
    std::vector<int> per(5, 0);
    for (std::size_t i = 0; i < folds.size(); ++i)
      if (slices.labels[i] == y) ++per[folds[i]];
    const auto [plo, phi] = std::minmax_element(per.begin(), per.end());
    EXPECT_LE(*phi - *plo, 1);
  }
}

TEST(CrossValidationTest, SingletonGrid) {
  std::mt19937_64 rng(37);
  const Dataset data = testing::random_dataset(50, 3, rng);
  const auto sel = select_tau_cv(data, 4, 1, {0.01}, 5, 1);
  EXPECT_EQ(sel.chosen, 0.01);
  ASSERT_EQ(sel.scores.size(), 1u);
  EXPECT_TRUE(std::isfinite(sel.scores[0]));
}

TEST(CrossValidationTest, SingularTrainingCovarianceScoresInfinity) {
  const auto sel = select_tau_cv(testing::collinear_dataset(60, 3), 5, 1, {0.0, 0.1}, 5, 2);
  EXPECT_EQ(sel.chosen, 0.1);
  EXPECT_TRUE(std::isinf(sel.scores[0]));
  EXPECT_TRUE(std::isfinite(sel.scores[1]));
}

TEST(CrossValidationTest, GoldenSelection) {
  const Dataset data = simulate(testing::single_index_spec(300, 5, 7));
  const auto sel = select_tau_cv(data, 5, 1, {1e-4, 1e-2, 1.0, 100.0}, 5, 7);
  // Frozen from the first run of this configuration.
  EXPECT_EQ(sel.chosen, 1e-4);
  const double scores[] = {0.26244250882875164, 0.26253520768360661,
                           0.4608399816768956, 1.3406691434326081};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(sel.scores[k], scores[k], 1e-9 * scores[k]);
  EXPECT_EQ(sel, select_tau_cv(data, 5, 1, {1e-4, 1e-2, 1.0, 100.0}, 5, 7));
}

TEST(CrossValidationTest, Validation) {
  std::mt19937_64 rng(41);
  const Dataset data = testing::random_dataset(40, 3, rng);
  EXPECT_THROW(select_tau_cv(data, 4, 1, {}, 5, 1), InputError);
  EXPECT_THROW(select_tau_cv(data, 4, 1, {0.1, 0.1}, 5, 1), InputError);
  EXPECT_THROW(select_tau_cv(data, 4, 1, {-0.1}, 5, 1), InputError);
  EXPECT_THROW(select_tau_cv(data, 4, 1, {0.1}, 1, 1), InputError);
  EXPECT_THROW(select_tau_cv(data, 4, 1, {0.1}, 41, 1), InputError);
}

}  // namespace
}  // namespace sirreg
