#include "speeduplab/superlinear.hpp"

#include <cmath>
#include <string>

#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

void require_processors(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("processor count must exceed 1, got " + std::to_string(p));
  }
}

double speedup_form(double x) { return 1.0 / (2.0 * x * x) + 1.0 / x; }

void require_fft_inputs(double c, double n) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("C must be positive and finite");
  if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("n must be >= 1");
}

}  // namespace

double superlinear_threshold_exact(double processors) {
  require_processors(processors);
  return log_one_minus_reciprocal(processors);
}

double superlinear_threshold_approx(double processors) {
  require_processors(processors);
  return -1.0 / (2.0 * processors * processors) - 1.0 / processors;
}

bool superlinear_exact(Exponent f, double processors) {
  return f.value() > superlinear_threshold_exact(processors);
}

bool superlinear_approx(Exponent f, double processors) {
  return f.value() > superlinear_threshold_approx(processors);
}

bool superlinear_speedup_condition(Speedup s, double processors) {
  require_processors(processors);
  return speedup_form(s.value()) < speedup_form(processors);
}

SuperlinearReport superlinear_report(Speedup s, double processors) {
  SuperlinearReport r;
  r.threshold_exact = superlinear_threshold_exact(processors);
  r.threshold_approx = superlinear_threshold_approx(processors);
  if (s.value() > 1.0) r.exact_holds = exponent_exact(s).value() > r.threshold_exact;
  if (s.value() >= 2.0) r.approx_holds = exponent_approx(s).value() > r.threshold_approx;
  r.speedup_form_holds = superlinear_speedup_condition(s, processors);
  return r;
}

double fft_superlinear_pmax(double c, double n) {
  require_fft_inputs(c, n);
  return (n + std::sqrt(n * n + 2.0 * c * n)) / (2.0 * c);
}

std::uint64_t fft_superlinear_scan(double c, double n) {
  require_fft_inputs(c, n);
  const double lhs = c / n;
  auto holds = [lhs](std::uint64_t p) { return lhs < speedup_form(static_cast<double>(p)); };
  if (!holds(1)) return 0;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (holds(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) return lo;
    hi *= 2;
  }
  // holds(lo) && !holds(hi)
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace speeduplab
