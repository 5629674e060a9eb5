#include "speeduplab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Points inspected by the divergence test.
constexpr std::size_t kDivergenceWindow = 5;

// Aitken delta-squared step on x0, x1, x2. Applied only while the sequence
// contracts (|dx1| < |dx0|); a growing or constant-step sequence is left as
// is, since the formula would otherwise extrapolate a divergent geometric
// sequence back to a spurious finite fixed point.
double aitken(double x0, double x1, double x2) {
  const double d0 = x1 - x0;
  const double d1 = x2 - x1;
  const double den = d1 - d0;
  if (den == 0.0 || !(std::fabs(d1) < std::fabs(d0))) return x2;
  const double accelerated = x2 - d1 * d1 / den;
  return std::isfinite(accelerated) ? accelerated : x2;
}

bool monotone_divergence(const std::vector<LimitSample>& samples, double tol, double sign) {
  if (samples.size() < kDivergenceWindow) return false;
  const std::size_t first = samples.size() - kDivergenceWindow;
  double previous_step = 0.0;
  bool steps_grow = true;
  for (std::size_t i = first + 1; i < samples.size(); ++i) {
    const double step = sign * (samples[i].value - samples[i - 1].value);
    if (!(step > 0.0)) return false;
    if (i > first + 1 && step < previous_step * (1.0 - 1e-6)) steps_grow = false;
    previous_step = step;
  }
  return steps_grow || sign * samples.back().value > 1.0 / tol;
}

double exponent_of_ratio(double r) {
  // -1 + sqrt(1 - 2r) on [0, 1/2]
  const double x = 2.0 * std::clamp(r, 0.0, 0.5);
  return -x / (1.0 + std::sqrt(1.0 - x));
}

void require_admissible(const CostModel& model, const GrowthFunction& g,
                        const Schedule& schedule) {
  if (!admissible(model.constraint(), g, schedule)) {
    throw ModelError("growth function '" + g.name() + "' is not admissible for model '" +
                     model.name() + "'");
  }
}

}  // namespace

std::string_view to_string(LimitKind kind) noexcept {
  switch (kind) {
    case LimitKind::Finite:
      return "finite";
    case LimitKind::PlusInfinity:
      return "plus_infinity";
    case LimitKind::MinusInfinity:
      return "minus_infinity";
    case LimitKind::NotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

std::string_view to_string(GrowthKind kind) noexcept {
  switch (kind) {
    case GrowthKind::FiniteRatio:
      return "finite_ratio";
    case GrowthKind::InfiniteRatio:
      return "infinite_ratio";
    case GrowthKind::Rejected:
      return "rejected";
  }
  return "unknown";
}

LimitEstimate estimate_limit(const std::function<double(double)>& seq, const Schedule& schedule) {
  schedule.validate();
  LimitEstimate est;
  double overflow_p = 0.0;
  for (double p : schedule.p_values) {
    double value = 0.0;
    try {
      value = seq(p);
    } catch (const EvalError& e) {
      if (e.kind() != EvalError::Kind::NonFinite) throw LimitError(p, e.what());
      est.truncated = true;
    } catch (const Error& e) {
      throw LimitError(p, e.what());
    }
    if (!est.truncated && !std::isfinite(value)) est.truncated = true;
    if (est.truncated) {
      overflow_p = p;
      break;
    }
    est.samples.push_back({p, value});
  }
  if (est.samples.size() < 3) {
    throw LimitError(overflow_p, "overflow before three schedule points were evaluated");
  }

  const auto& xs = est.samples;
  est.extrapolated.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    est.extrapolated.push_back(
        i < 2 ? xs[i].value : aitken(xs[i - 2].value, xs[i - 1].value, xs[i].value));
  }

  // deltas between successive accelerated values, from the third point on
  std::vector<double> deltas;
  for (std::size_t i = 3; i < est.extrapolated.size(); ++i) {
    deltas.push_back(std::fabs(est.extrapolated[i] - est.extrapolated[i - 1]));
  }
  est.residual = deltas.empty() ? kInf : deltas.back();

  const std::size_t need = schedule.min_consecutive;
  const bool converged =
      deltas.size() >= need &&
      std::all_of(deltas.end() - static_cast<std::ptrdiff_t>(need), deltas.end(),
                  [&](double d) { return d <= schedule.tol; });

  if (converged) {
    est.kind = LimitKind::Finite;
    est.value = est.extrapolated.back();
    est.converged = true;
  } else if (monotone_divergence(xs, schedule.tol, 1.0)) {
    est.kind = LimitKind::PlusInfinity;
    est.value = kInf;
  } else if (monotone_divergence(xs, schedule.tol, -1.0)) {
    est.kind = LimitKind::MinusInfinity;
    est.value = -kInf;
  } else {
    est.kind = LimitKind::Finite;
    est.value = est.extrapolated.back();
  }
  return est;
}

LimitEstimate ratio_limit(const CostModel& model, const GrowthFunction& g,
                          const Schedule& schedule) {
  require_admissible(model, g, schedule);
  return estimate_limit([&](double p) { return time_ratio(model, p, g(p)); }, schedule);
}

LimitEstimate exponent_limit(const CostModel& model, const GrowthFunction& g,
                             const Schedule& schedule) {
  const LimitEstimate ratio = ratio_limit(model, g, schedule);

  LimitEstimate est;
  est.truncated = ratio.truncated;
  for (const auto& s : ratio.samples) {
    if (s.value <= 0.5) {
      est.samples.push_back({s.p, exponent_of_ratio(s.value)});
    } else {
      est.skipped.push_back(s.p);
    }
  }
  for (const auto& s : est.samples) est.extrapolated.push_back(s.value);

  if (ratio.kind != LimitKind::Finite || ratio.value > 0.5 + schedule.tol) {
    est.kind = LimitKind::NotApplicable;
    est.value = kNaN;
    est.residual = kInf;
    return est;
  }

  const double r = ratio.value;
  const double f = exponent_of_ratio(r);
  const double spread = std::isfinite(ratio.residual) ? ratio.residual : kInf;
  est.kind = LimitKind::Finite;
  est.value = f;
  est.residual = std::isfinite(spread)
                     ? std::max(std::fabs(f - exponent_of_ratio(r - spread)),
                                std::fabs(f - exponent_of_ratio(r + spread)))
                     : kInf;
  est.converged = ratio.converged && est.residual <= schedule.tol;
  return est;
}

GrowthRatio growth_ratio_limit(const GrowthFunction& g, const Schedule& schedule) {
  LimitEstimate est = estimate_limit([&](double p) { return g(p) / p; }, schedule);
  GrowthKind kind = GrowthKind::Rejected;
  if (est.kind == LimitKind::PlusInfinity) {
    kind = GrowthKind::InfiniteRatio;
  } else if (est.kind == LimitKind::Finite && est.converged && est.value > schedule.tol) {
    kind = GrowthKind::FiniteRatio;
  }
  return {kind, std::move(est)};
}

}  // namespace speeduplab
