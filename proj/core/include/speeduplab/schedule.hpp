#pragma once

#include <cstddef>
#include <vector>

namespace speeduplab {

/// Processor counts at which a p -> infinity limit is probed.
struct Schedule {
  std::vector<double> p_values;
  double tol = 1e-6;
  /// Consecutive extrapolated deltas under `tol` required for convergence.
  std::size_t min_consecutive = 3;

  /// p = 2^min_exp, ..., 2^max_exp.
  static Schedule geometric(int min_exp = 4, int max_exp = 40);

  /// Throws DomainError unless there are at least 6 strictly increasing
  /// points, all >= 2, with tol > 0 and min_consecutive >= 1.
  void validate() const;
};

}  // namespace speeduplab
