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

#include "sirreg/ridge_als.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>

#include "sirreg/criteria.hpp"

namespace sirreg {
namespace {

// Relative eigenvalue floor below which A^T Sigma^2 A counts as singular.
constexpr double kSingularGramTol = 1e-13;

void require_positive_tau(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InputError("ridge SIR requires tau > 0");
  }
}

Basis random_basis(Index p, int d, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Basis a(p, d);
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) a(i, j) = scale * normal(rng);
  }
  return a;
}

double max_product_norm(const SlicedMoments& m, const Basis& a,
                        const Loadings& c) {
  const Matrix product = m.sigma * a * c;
  return product.colwise().norm().maxCoeff();
}

}  // namespace

Loadings als_update_loadings(const SlicedMoments& m, const Basis& a) {
  if (a.rows() != m.p() || a.cols() < 1) {
    throw InputError("als_update_loadings: basis must be p x d");
  }
  const Matrix sigma_a = m.sigma * a;
  const Matrix gram = sigma_a.transpose() * sigma_a;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.maxCoeff();
  if (!(hi > 0.0) || !std::isfinite(hi) || ev.minCoeff() <= kSingularGramTol * hi) {
    throw SingularUpdateError(
        "C-update singular: A has collapsed or Sigma_x A rank-deficient");
  }
  const Matrix& v = eig.eigenvectors();
  const Matrix rhs = sigma_a.transpose() * m.centered_means();
  return v * ev.cwiseInverse().asDiagonal() * (v.transpose() * rhs);
}

Basis als_update_basis(const SlicedMoments& m, const Loadings& c, double tau,
                       AUpdateSolver solver) {
  require_positive_tau(tau);
  const Index p = m.p();
  const Index d = c.rows();
  if (d < 1 || c.cols() != m.h()) {
    throw InputError("als_update_basis: loadings must be d x h");
  }
  const Matrix weighted_c = c * m.f.asDiagonal();
  const Matrix k = c * weighted_c.transpose();                        // d x d
  const Matrix rhs = m.sigma * (m.centered_means() * weighted_c.transpose());  // p x d

  if (solver == AUpdateSolver::kAuto) {
    solver = p * d <= kMaxKroneckerSize ? AUpdateSolver::kKronecker
                                        : AUpdateSolver::kStructured;
  }

  if (solver == AUpdateSolver::kKronecker) {
    const Matrix sigma_sq = m.sigma * m.sigma;
    Matrix op = Eigen::kroneckerProduct(k, sigma_sq).eval();
    op.diagonal().array() += tau;
    const Eigen::Map<const Vector> vec_rhs(rhs.data(), rhs.size());
    const Vector vec_a = op.llt().solve(vec_rhs);
    return Eigen::Map<const Matrix>(vec_a.data(), p, d);
  }

  // Sigma^2 A K + tau A = R, diagonalized on both sides.
  Eigen::SelfAdjointEigenSolver<Matrix> sigma_eig(m.sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> k_eig(k);
  const Matrix& q = sigma_eig.eigenvectors();
  const Matrix& v = k_eig.eigenvectors();
  const Vector lambda_sq = sigma_eig.eigenvalues().array().square();
  const Vector& mu = k_eig.eigenvalues();
  Matrix rotated = q.transpose() * rhs * v;
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < p; ++i) rotated(i, j) /= lambda_sq(i) * mu(j) + tau;
  }
  return q * rotated * v.transpose();
}

std::pair<Loadings, Basis> als_step(const SlicedMoments& m, const Basis& a,
                                    double tau) {
  require_positive_tau(tau);
  Loadings c = als_update_loadings(m, a);
  Basis next = als_update_basis(m, c, tau);
  return {std::move(c), std::move(next)};
}

void AlsConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("AlsConfig: tau must be > 0");
  if (d < 1) throw InputError("AlsConfig: d must be positive");
  if (max_iters < 1) throw InputError("AlsConfig: max_iters must be >= 1");
  if (!(a_norm_tolerance > 0.0)) {
    throw InputError("AlsConfig: a_norm_tolerance must be > 0");
  }
  if (!(step_tolerance >= 0.0)) {
    throw InputError("AlsConfig: step_tolerance must be >= 0");
  }
}

std::string to_string(AlsStopReason reason) {
  switch (reason) {
    case AlsStopReason::kMaxIterations:
      return "max_iterations";
    case AlsStopReason::kANormBelowTolerance:
      return "a_norm_below_tolerance";
    case AlsStopReason::kSingularCUpdate:
      return "singular_c_update";
    case AlsStopReason::kConverged:
      return "converged";
  }
  return "unknown";
}

double AlsTrace::max_objective_increase() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < records.size(); ++k) {
    worst = std::max(worst, records[k].objective - records[k - 1].objective);
  }
  return worst;
}

AlsTrace run_als(const SlicedMoments& m, const AlsConfig& config) {
  config.validate();
  if (config.d > m.p()) throw InputError("run_als: d must not exceed p");

  AlsTrace trace;
  trace.rank_warning = config.d > numerical_rank(m.sigma);
  if (config.initial_basis) {
    if (config.initial_basis->rows() != m.p() ||
        config.initial_basis->cols() != config.d) {
      throw InputError("run_als: initial basis must be p x d");
    }
    trace.initial_basis = *config.initial_basis;
  } else {
    trace.initial_basis =
        random_basis(m.p(), config.d, config.rng_seed, config.init_scale);
  }

  Basis a = trace.initial_basis;
  for (int k = 0;; ++k) {
    const double a_norm = a.norm();
    if (a_norm < config.a_norm_tolerance) {
      trace.stop_reason = AlsStopReason::kANormBelowTolerance;
      break;
    }
    Loadings c;
    try {
      c = als_update_loadings(m, a);
    } catch (const SingularUpdateError&) {
      trace.stop_reason = AlsStopReason::kSingularCUpdate;
      break;
    }
    trace.records.push_back({k, eval_G_tau(m, a, c, config.tau), a_norm,
                             c.norm(), max_product_norm(m, a, c)});
    if (k >= config.max_iters) {
      trace.stop_reason = AlsStopReason::kMaxIterations;
      break;
    }
    Basis next = als_update_basis(m, c, config.tau);
    ++trace.iterations;
    const double step = (next - a).norm();
    a = std::move(next);
    if (step < config.step_tolerance) {
      trace.stop_reason = AlsStopReason::kConverged;
      break;
    }
  }
  trace.final_basis = a;
  trace.final_a_norm = a.norm();
  return trace;
}

double default_existence_threshold(const SlicedMoments& m) {
  const double sigma_norm =
      m.sigma.size() == 0
          ? 0.0
          : Eigen::SelfAdjointEigenSolver<Matrix>(m.sigma, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .cwiseAbs()
                .maxCoeff();
  const double mean_norm = m.centered_means().colwise().norm().maxCoeff();
  return 1e-10 * sigma_norm * mean_norm;
}

ExistenceReport check_existence(const SlicedMoments& m,
                                std::optional<double> threshold) {
  ExistenceReport report;
  report.threshold = threshold ? *threshold : default_existence_threshold(m);
  if (threshold && !(*threshold > 0.0)) {
    throw InputError("check_existence: threshold must be > 0");
  }
  const Matrix centered = m.centered_means();
  const Matrix projected = m.sigma * centered;
  for (Index y = 0; y < m.h(); ++y) {
    const double norm = projected.col(y).norm();
    report.witness_norms.push_back(norm);
    if (norm > report.threshold) report.witnesses.push_back(static_cast<int>(y));
  }
  report.exists = report.witnesses.empty();
  report.minimum = (centered.colwise().squaredNorm().transpose().array() *
                    m.f.array())
                       .sum();
  return report;
}

Counterexample construct_counterexample(const SlicedMoments& m, double tau,
                                        int d, double epsilon_fraction) {
  require_positive_tau(tau);
  if (d < 1 || d > m.p()) throw InputError("counterexample: need 1 <= d <= p");
  if (!(epsilon_fraction > 0.0 && epsilon_fraction < 1.0)) {
    throw InputError("counterexample: epsilon_fraction must lie in (0, 1)");
  }

  const ExistenceReport existence = check_existence(m);
  if (existence.exists) {
    throw InfeasibleError("minimizer exists; no counterexample");
  }
  const auto best = std::max_element(existence.witness_norms.begin(),
                                     existence.witness_norms.end());
  const int y0 = static_cast<int>(best - existence.witness_norms.begin());
  const Vector centered = m.slice_means.col(y0) - m.xbar;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.sigma);
  const Vector& lambda = eig.eigenvalues();
  const Matrix& q = eig.eigenvectors();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  std::vector<Index> positive;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > 1e-12 * lambda_max) positive.push_back(i);
  }
  if (static_cast<Index>(positive.size()) < d) {
    throw InfeasibleError("insufficient covariance rank: rank(Sigma_x) < d");
  }

  // q* first, then the remaining positive directions by decreasing overlap.
  const Vector overlap = (q.transpose() * centered).cwiseAbs();
  std::stable_sort(positive.begin(), positive.end(), [&](Index i, Index j) {
    return overlap(i) > overlap(j);
  });
  positive.resize(static_cast<std::size_t>(d));

  const double f0 = m.f(y0);
  const double lead = overlap(positive.front());
  Counterexample out;
  out.slice = y0;
  out.leading_eigenvalue = lambda(positive.front());
  out.epsilon = epsilon_fraction * std::sqrt(f0 / (tau * d)) * lead;

  Matrix directions(m.p(), d);
  Matrix scaled(m.p(), d);  // columns q_j / lambda_j
  double captured = 0.0;
  for (int j = 0; j < d; ++j) {
    const Index i = positive[static_cast<std::size_t>(j)];
    directions.col(j) = q.col(i);
    scaled.col(j) = q.col(i) / lambda(i);
    captured += overlap(i) * overlap(i);
  }
  out.a = out.epsilon * directions;
  out.c = Loadings::Zero(d, m.h());
  out.c.col(y0) = (scaled.transpose() * centered) / out.epsilon;
  out.gap = -f0 * captured + tau * d * out.epsilon * out.epsilon;
  return out;
}

}  // namespace sirreg
