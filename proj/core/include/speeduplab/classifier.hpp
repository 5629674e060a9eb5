#pragma once

// Strongly / weakly / Amdahl-like parallel classification of a cost model
// relative to a family of problem-growth functions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speeduplab/asymptotics.hpp"
#include "speeduplab/model.hpp"

namespace speeduplab {

enum class Verdict { Strong, Weak, AmdahlLike, Inconclusive };

std::string_view to_string(Verdict verdict) noexcept;

struct GrowthEvidence {
  GrowthFunction growth;
  GrowthKind growth_kind = GrowthKind::Rejected;
  bool admissible = false;
  std::optional<LimitEstimate> growth_ratio{};
  /// Present only for admissible, non-rejected growths.
  std::optional<LimitEstimate> ratio_limit{};
  std::optional<LimitEstimate> exponent_limit{};
  /// Why the growth was skipped or its limit is missing.
  std::string note{};
};

struct ClassificationResult {
  Verdict verdict = Verdict::Inconclusive;
  /// One entry per family member, in family order.
  std::vector<GrowthEvidence> evidence;
  double zero_tolerance = 1e-3;
  /// Index into `evidence` of the first growth that decided Strong or Weak.
  std::optional<std::size_t> witness;
  /// Every growth that qualifies for the decided verdict, in family order.
  std::vector<std::size_t> witnesses;
};

/// Verdicts are relative to `family`: Strong needs an admissible growth with
/// g(p)/p -> inf and F -> 0; Weak needs such a growth with finite g(p)/p;
/// AmdahlLike needs every surviving growth to have a converged F limit below
/// -zero_tolerance. Evaluation failures become Inconclusive evidence.
ClassificationResult classify(const CostModel& model, std::span<const GrowthFunction> family,
                              const Schedule& schedule = Schedule::geometric(),
                              double zero_tolerance = 1e-3);

struct MonotonicityViolation {
  double p;
  double slope;
  double speedup;
};

struct MonotonicityReport {
  bool pass = true;
  std::vector<MonotonicityViolation> violations;
  /// (p, S(p)) on the geometric grid.
  std::vector<LimitSample> curve;
};

/// Checks dS/dp >= 0 for S(p) = model_speedup(model, p, g(p)) by central
/// differences on a geometric grid over [p_min, p_max]. Requires
/// 2 <= p_min < p_max <= 2^40 and step_count >= 10.
MonotonicityReport monotonicity_check(const CostModel& model, const GrowthFunction& g,
                                      double p_min, double p_max, std::size_t step_count);

struct ExponentPoint {
  double p;
  double n;
  double ratio;
  /// Empty where the minimal condition of parallelism fails.
  std::optional<double> exponent;
};

std::vector<ExponentPoint> exponent_curve(const CostModel& model, const GrowthFunction& g,
                                          const Schedule& schedule);

}  // namespace speeduplab
