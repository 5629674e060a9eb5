#include "speeduplab/amdahl.hpp"

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

}  // namespace

Speedup::Speedup(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("speedup must be positive and finite, got " + std::to_string(value));
  }
}

Fraction::Fraction(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("fraction must be positive and finite, got " + std::to_string(value));
  }
}

bool Fraction::is_superlinear(double processors) const noexcept {
  return value_ > processors / (processors - 1.0);
}

Exponent::Exponent(double value) : value_(value) {
  if (std::isnan(value) || value == HUGE_VAL) {
    throw DomainError("exponent of parallelism must be a number below +inf");
  }
}

bool Exponent::is_ordinary(double processors) const noexcept {
  return value_ <= log_one_minus_reciprocal(processors);
}

double log_one_minus_reciprocal(double x) {
  // (x - 1) is exact for x in [1, 2]
  if (x < 2.0) return std::log((x - 1.0) / x);
  return std::log1p(-1.0 / x);
}

Speedup speedup_from_fraction(Fraction f, double processors) {
  require_processors(processors);
  const double denominator = f.value() * (1.0 - processors) + processors;
  if (!(denominator > 0.0)) {
    throw DomainError("f >= p/(p-1): Amdahl denominator is not positive");
  }
  return Speedup(processors / denominator);
}

std::optional<Speedup> amdahl_limit(Fraction f) {
  if (f.value() > 1.0) throw DomainError("Amdahl limit requires f <= 1");
  if (f.value() == 1.0) return std::nullopt;
  return Speedup(1.0 / (1.0 - f.value()));
}

Fraction fraction_from_speedup(Speedup s, double processors) {
  require_processors(processors);
  return Fraction(processors / (processors - 1.0) * (1.0 - 1.0 / s.value()));
}

Exponent exponent_exact(Speedup s) {
  if (!(s.value() > 1.0)) {
    throw DomainError("exact exponent requires S > 1, got " + std::to_string(s.value()));
  }
  return Exponent(log_one_minus_reciprocal(s.value()));
}

std::optional<Speedup> speedup_from_exponent(Exponent f) {
  if (f.value() >= 0.0) return std::nullopt;
  return Speedup(-1.0 / std::expm1(f.value()));
}

Exponent exponent_from_time_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw DomainError("time ratio must be positive and finite, got " + std::to_string(ratio));
  }
  if (ratio > 0.5) throw MinimalConditionViolated(ratio);
  const double x = 2.0 * ratio;
  // -1 + sqrt(1 - x) without cancellation
  return Exponent(-x / (1.0 + std::sqrt(1.0 - x)));
}

Exponent exponent_approx(Speedup s) {
  if (s.value() < 2.0) throw MinimalConditionViolated(1.0 / s.value());
  const double x = 2.0 / s.value();
  return Exponent(-x / (1.0 + std::sqrt(1.0 - x)));
}

Fraction fraction_approx_from_exponent(Exponent f, double processors) {
  require_processors(processors);
  const double e = f.value();
  return Fraction(processors / (processors - 1.0) * (1.0 + e + e * e / 2.0));
}

Speedup speedup_from_exponent_approx(Exponent f) {
  const double e = f.value();
  if (!(e > -2.0 && e < 0.0)) {
    throw DomainError("approximate speedup requires -2 < F < 0, got " + std::to_string(e));
  }
  return Speedup(-1.0 / (e * (1.0 + e / 2.0)));
}

bool minimal_condition(double t_par_p, double t_par_1) {
  if (!(t_par_p > 0.0) || !(t_par_1 > 0.0)) {
    throw DomainError("execution times must be positive");
  }
  return t_par_p <= t_par_1 / 2.0;
}

}  // namespace speeduplab
