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

#ifndef SIRREG_MOMENTS_HPP_
#define SIRREG_MOMENTS_HPP_

#include <vector>

#include "sirreg/common.hpp"

namespace sirreg {

/// Predictor matrix (rows are observations) and scalar response.
class Dataset {
 public:
  /// Validates shapes, n >= 2 and finiteness; throws InputError.
  Dataset(Matrix x, Vector y);

  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }

  /// Rows selected by index, in the given order.
  Dataset subset(const std::vector<Index>& rows) const;

 private:
  Matrix x_;
  Vector y_;
};

enum class SlicingScheme { kEqualFrequency };

/// Slice membership of every observation. Labels are 0-based.
struct SliceAssignment {
  std::vector<int> labels;
  int h = 0;
  std::vector<Index> counts;

  /// Builds counts from labels and checks every slice is non-empty.
  static SliceAssignment from_labels(std::vector<int> labels, int h);
};

/// Partitions observations into h slices of the sorted response.
///
/// Equal-frequency slices: sizes differ by at most one, and ties in Y are
/// ordered by original row index, so the result is deterministic.
SliceAssignment slice_by_response(
    const Dataset& data, int h,
    SlicingScheme scheme = SlicingScheme::kEqualFrequency);

/// Sufficient statistics shared by every criterion and estimator.
///
/// Covariances use divisor n, consistent with f_y = n_y / n.
struct SlicedMoments {
  Vector f;             // h slice frequencies
  Vector xbar;          // overall mean, length p
  Matrix slice_means;   // p x h, column y is the mean of slice y
  Matrix sigma;         // p x p sample covariance
  Matrix gamma;         // p x p, sum_y f_y (xbar_y - xbar)(xbar_y - xbar)^T
  Index n = 0;

  Index p() const { return xbar.size(); }
  Index h() const { return f.size(); }

  /// p x h matrix whose column y is xbar_y - xbar.
  Matrix centered_means() const;

  /// Assembles moments from already-computed statistics; gamma is derived.
  static SlicedMoments from_statistics(Vector f, Vector xbar,
                                       Matrix slice_means, Matrix sigma,
                                       Index n);
};

SlicedMoments compute_sliced_moments(const Dataset& data,
                                     const SliceAssignment& assignment);

/// Convenience: slice_by_response followed by compute_sliced_moments.
SlicedMoments compute_sliced_moments(const Dataset& data, int h);

}  // namespace sirreg

#endif  // SIRREG_MOMENTS_HPP_
