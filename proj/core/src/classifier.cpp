#include "speeduplab/classifier.hpp"

#include <cmath>
#include <utility>

#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

bool tends_to_zero(const std::optional<LimitEstimate>& f, double zero_tolerance) {
  return f && f->kind == LimitKind::Finite && f->converged && std::fabs(f->value) <= zero_tolerance;
}

bool tends_below_zero(const std::optional<LimitEstimate>& f, double zero_tolerance) {
  return f && f->kind == LimitKind::Finite && f->converged && f->value < -zero_tolerance;
}

GrowthEvidence gather(const CostModel& model, const GrowthFunction& g, const Schedule& schedule) {
  GrowthEvidence ev{g};
  try {
    GrowthRatio gr = growth_ratio_limit(g, schedule);
    ev.growth_kind = gr.kind;
    ev.growth_ratio = std::move(gr.limit);
    ev.admissible = admissible(model.constraint(), g, schedule);
  } catch (const Error& e) {
    ev.note = e.what();
    return ev;
  }
  if (!ev.admissible) {
    ev.note = "not admissible for the model's growth constraint";
    return ev;
  }
  if (ev.growth_kind == GrowthKind::Rejected) {
    ev.note = "n/p does not tend to a positive limit or infinity";
    return ev;
  }
  try {
    ev.ratio_limit = ratio_limit(model, g, schedule);
    ev.exponent_limit = exponent_limit(model, g, schedule);
    if (ev.exponent_limit->kind == LimitKind::NotApplicable) {
      ev.note = "time ratio does not settle at or below 1/2";
    } else if (!ev.exponent_limit->converged) {
      ev.note = "exponent limit did not converge";
    }
  } catch (const Error& e) {
    ev.note = e.what();
  }
  return ev;
}

double speedup_at(const CostModel& model, const GrowthFunction& g, double p) {
  return model_speedup(model, p, g(p)).value();
}

}  // namespace

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::Strong:
      return "strong";
    case Verdict::Weak:
      return "weak";
    case Verdict::AmdahlLike:
      return "amdahl_like";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ClassificationResult classify(const CostModel& model, std::span<const GrowthFunction> family,
                              const Schedule& schedule, double zero_tolerance) {
  if (family.empty()) throw DomainError("classification needs a non-empty growth family");
  if (!(zero_tolerance > 0.0)) throw DomainError("zero tolerance must be positive");
  schedule.validate();

  ClassificationResult result;
  result.zero_tolerance = zero_tolerance;
  result.evidence.reserve(family.size());
  for (const auto& g : family) result.evidence.push_back(gather(model, g, schedule));

  auto survives = [](const GrowthEvidence& ev) {
    return ev.admissible && ev.growth_kind != GrowthKind::Rejected;
  };

  for (const auto& [kind, verdict] : {std::pair{GrowthKind::InfiniteRatio, Verdict::Strong},
                                     std::pair{GrowthKind::FiniteRatio, Verdict::Weak}}) {
    for (std::size_t i = 0; i < result.evidence.size(); ++i) {
      const auto& ev = result.evidence[i];
      if (survives(ev) && ev.growth_kind == kind &&
          tends_to_zero(ev.exponent_limit, zero_tolerance)) {
        result.witnesses.push_back(i);
      }
    }
    if (!result.witnesses.empty()) {
      result.verdict = verdict;
      result.witness = result.witnesses.front();
      return result;
    }
  }

  std::size_t survivors = 0;
  bool all_below = true;
  for (const auto& ev : result.evidence) {
    if (!survives(ev)) continue;
    ++survivors;
    all_below = all_below && tends_below_zero(ev.exponent_limit, zero_tolerance);
  }
  result.verdict = survivors > 0 && all_below ? Verdict::AmdahlLike : Verdict::Inconclusive;
  return result;
}

MonotonicityReport monotonicity_check(const CostModel& model, const GrowthFunction& g,
                                      double p_min, double p_max, std::size_t step_count) {
  if (!(p_min >= 2.0) || !(p_max > p_min) || !(p_max <= std::ldexp(1.0, 40))) {
    throw DomainError("monotonicity range must satisfy 2 <= p_min < p_max <= 2^40");
  }
  if (step_count < 10) throw DomainError("monotonicity check needs at least 10 steps");

  MonotonicityReport report;
  const double lo = std::log2(p_min);
  const double span = std::log2(p_max) - lo;
  for (std::size_t i = 0; i < step_count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(step_count - 1);
    const double p = i + 1 == step_count ? p_max : std::exp2(lo + span * t);
    const double h = 1e-4 * p;
    const double s = speedup_at(model, g, p);
    const double slope = (speedup_at(model, g, p + h) - speedup_at(model, g, p - h)) / (2.0 * h);
    report.curve.push_back({p, s});
    if (slope < -1e-9 * std::fabs(s)) {
      report.violations.push_back({p, slope, s});
      report.pass = false;
    }
  }
  return report;
}

std::vector<ExponentPoint> exponent_curve(const CostModel& model, const GrowthFunction& g,
                                          const Schedule& schedule) {
  std::vector<ExponentPoint> out;
  out.reserve(schedule.p_values.size());
  for (double p : schedule.p_values) {
    const double n = g(p);
    const double r = time_ratio(model, p, n);
    ExponentPoint point{p, n, r, std::nullopt};
    if (r <= 0.5) point.exponent = exponent_from_time_ratio(r).value();
    out.push_back(point);
  }
  return out;
}

}  // namespace speeduplab
