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

#include "sirreg/moments.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sirreg {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) {
    throw InputError("dataset: X has " + std::to_string(x_.rows()) +
                     " rows but Y has " + std::to_string(y_.size()) +
                     " entries");
  }
  if (x_.cols() < 1) throw InputError("dataset: X must have at least one column");
  if (x_.rows() < 2) throw InputError("dataset: need at least 2 observations");
  if (!x_.allFinite() || !y_.allFinite()) {
    throw InputError("dataset: non-finite entries are not allowed");
  }
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Matrix xs(static_cast<Index>(rows.size()), p());
  Vector ys(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= n()) throw InputError("dataset: row index out of range");
    xs.row(static_cast<Index>(i)) = x_.row(r);
    ys(static_cast<Index>(i)) = y_(r);
  }
  return Dataset(std::move(xs), std::move(ys));
}

SliceAssignment SliceAssignment::from_labels(std::vector<int> labels, int h) {
  if (h < 1) throw InputError("slice assignment: h must be positive");
  SliceAssignment out;
  out.h = h;
  out.counts.assign(static_cast<std::size_t>(h), 0);
  for (int label : labels) {
    if (label < 0 || label >= h) {
      throw InputError("slice assignment: label out of range");
    }
    ++out.counts[static_cast<std::size_t>(label)];
  }
  for (int y = 0; y < h; ++y) {
    if (out.counts[static_cast<std::size_t>(y)] == 0) {
      throw InputError("invalid assignment: slice " + std::to_string(y) +
                       " is empty");
    }
  }
  out.labels = std::move(labels);
  return out;
}

SliceAssignment slice_by_response(const Dataset& data, int h,
                                  SlicingScheme scheme) {
  if (h < 1) throw InputError("slice_by_response: h must be at least 1");
  const Index n = data.n();
  if (h > n) {
    throw InputError("too many slices: h = " + std::to_string(h) +
                     " exceeds n = " + std::to_string(n));
  }
  switch (scheme) {
    case SlicingScheme::kEqualFrequency:
      break;
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& y = data.y();
  std::sort(order.begin(), order.end(), [&y](Index a, Index b) {
    return y(a) < y(b) || (y(a) == y(b) && a < b);
  });

  // Sorted position i goes to slice floor(i * h / n).
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
        static_cast<int>((i * h) / n);
  }
  return SliceAssignment::from_labels(std::move(labels), h);
}

Matrix SlicedMoments::centered_means() const {
  return slice_means.colwise() - xbar;
}

SlicedMoments SlicedMoments::from_statistics(Vector f, Vector xbar,
                                             Matrix slice_means, Matrix sigma,
                                             Index n) {
  const Index p = xbar.size();
  const Index h = f.size();
  if (slice_means.rows() != p || slice_means.cols() != h ||
      sigma.rows() != p || sigma.cols() != p) {
    throw InputError("sliced moments: inconsistent shapes");
  }
  if ((f.array() <= 0.0).any()) {
    throw InputError("sliced moments: slice frequencies must be positive");
  }
  SlicedMoments m;
  m.f = std::move(f);
  m.xbar = std::move(xbar);
  m.slice_means = std::move(slice_means);
  m.sigma = std::move(sigma);
  m.n = n;
  const Matrix centered = m.centered_means();
  m.gamma = centered * m.f.asDiagonal() * centered.transpose();
  // Exact symmetry; the product above can differ in the last bit.
  m.gamma = 0.5 * (m.gamma + m.gamma.transpose()).eval();
  return m;
}

SlicedMoments compute_sliced_moments(const Dataset& data,
                                     const SliceAssignment& assignment) {
  const Index n = data.n();
  const Index p = data.p();
  const int h = assignment.h;
  if (static_cast<Index>(assignment.labels.size()) != n ||
      static_cast<int>(assignment.counts.size()) != h) {
    throw InputError("invalid assignment: size does not match the dataset");
  }

  // Row accumulation order is shared by the overall and slice sums so that a
  // single slice reproduces the overall mean bit for bit.
  Matrix sums = Matrix::Zero(p, h);
  Vector total = Vector::Zero(p);
  std::vector<Index> counts(static_cast<std::size_t>(h), 0);
  for (Index i = 0; i < n; ++i) {
    total += data.x().row(i).transpose();
    const int y = assignment.labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= h) throw InputError("invalid assignment: bad label");
    sums.col(y) += data.x().row(i).transpose();
    ++counts[static_cast<std::size_t>(y)];
  }

  Vector f(h);
  Matrix means(p, h);
  for (int y = 0; y < h; ++y) {
    const Index ny = counts[static_cast<std::size_t>(y)];
    if (ny == 0) {
      throw InputError("invalid assignment: slice " + std::to_string(y) +
                       " is empty");
    }
    f(y) = static_cast<double>(ny) / static_cast<double>(n);
    means.col(y) = sums.col(y) / static_cast<double>(ny);
  }

  const Vector xbar = total / static_cast<double>(n);
  const Matrix centered = data.x().rowwise() - xbar.transpose();
  Matrix sigma = (centered.transpose() * centered) / static_cast<double>(n);
  sigma = 0.5 * (sigma + sigma.transpose()).eval();

  return SlicedMoments::from_statistics(std::move(f), xbar, std::move(means),
                                        std::move(sigma), n);
}

SlicedMoments compute_sliced_moments(const Dataset& data, int h) {
  return compute_sliced_moments(data, slice_by_response(data, h));
}

}  // namespace sirreg
