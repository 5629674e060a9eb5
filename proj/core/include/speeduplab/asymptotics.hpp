#pragma once

// Numeric p -> infinity limits along a processor schedule.

#include <functional>
#include <string_view>
#include <vector>

#include "speeduplab/model.hpp"
#include "speeduplab/schedule.hpp"

namespace speeduplab {

enum class LimitKind { Finite, PlusInfinity, MinusInfinity, NotApplicable };

std::string_view to_string(LimitKind kind) noexcept;

struct LimitSample {
  double p;
  double value;
};

struct LimitEstimate {
  LimitKind kind = LimitKind::NotApplicable;
  /// The limit for Finite; +-inf for the infinite kinds; NaN otherwise.
  double value = 0.0;
  /// Only ever true for Finite, and then residual <= tol.
  bool converged = false;
  double residual = 0.0;
  /// Raw sequence values in schedule order.
  std::vector<LimitSample> samples;
  /// Aitken-accelerated values, index-aligned with `samples`. The first two
  /// entries, and any point where acceleration does not apply, repeat the
  /// raw value.
  std::vector<double> extrapolated;
  /// Processor counts skipped because the quantity was undefined there
  /// (for exponents: points violating the minimal condition).
  std::vector<double> skipped;
  /// True when overflow cut the schedule short.
  bool truncated = false;
};

/// Evaluates `seq` along the schedule and extrapolates the tail with
/// Aitken's delta-squared process. Throws LimitError when `seq` fails at a
/// scheduled point for any reason other than overflow; an overflow truncates
/// the schedule instead.
LimitEstimate estimate_limit(const std::function<double(double)>& seq, const Schedule& schedule);

/// Limit of T_par(p, g(p)) / T_ser(g(p)). Throws ModelError if `g` is not
/// admissible for the model's growth constraint.
LimitEstimate ratio_limit(const CostModel& model, const GrowthFunction& g,
                          const Schedule& schedule);

/// Limit of the quadratic-approximation exponent -1 + sqrt(1 - 2 r) along g.
/// The extrapolated ratio limit is mapped through the exponent relation, so
/// a ratio approaching 1/2 from above still yields F -> -1. NotApplicable
/// when the ratio limit exceeds 1/2 (beyond schedule tolerance) or diverges.
LimitEstimate exponent_limit(const CostModel& model, const GrowthFunction& g,
                             const Schedule& schedule);

enum class GrowthKind { FiniteRatio, InfiniteRatio, Rejected };

std::string_view to_string(GrowthKind kind) noexcept;

struct GrowthRatio {
  GrowthKind kind;
  LimitEstimate limit;
};

/// Limit of g(p) / p. Ratios tending to zero, or that fail to settle, are
/// Rejected.
GrowthRatio growth_ratio_limit(const GrowthFunction& g, const Schedule& schedule);

}  // namespace speeduplab
