#pragma once

// Conversions among speedup S, parallelizable fraction f and the exponent of
// parallelism F, where f = (p / (p - 1)) * exp(F).

#include <optional>

namespace speeduplab {

/// T_ser / T_par. Always positive and finite.
class Speedup {
 public:
  explicit Speedup(double value);

  double value() const noexcept { return value_; }
  bool is_gain() const noexcept { return value_ > 1.0; }
  bool is_superlinear(double processors) const noexcept { return value_ > processors; }

 private:
  double value_;
};

/// Parallelizable fraction. Values above 1 are representable; they only
/// arise in the superlinear regime.
class Fraction {
 public:
  explicit Fraction(double value);

  double value() const noexcept { return value_; }
  bool is_ordinary() const noexcept { return value_ <= 1.0; }
  bool is_superlinear(double processors) const noexcept;

 private:
  double value_;
};

/// Exponent of parallelism. In the ordinary regime F <= log((p - 1) / p) < 0.
class Exponent {
 public:
  explicit Exponent(double value);

  double value() const noexcept { return value_; }
  bool is_ordinary(double processors) const noexcept;

 private:
  double value_;
};

/// Amdahl's law: p / (f (1 - p) + p). Throws DomainError when p <= 1 or the
/// denominator is not positive (f >= p / (p - 1)).
Speedup speedup_from_fraction(Fraction f, double processors);

/// p -> infinity limit 1 / (1 - f). Returns nullopt when f == 1 (unbounded);
/// throws DomainError for f > 1.
std::optional<Speedup> amdahl_limit(Fraction f);

/// Exact inverse of speedup_from_fraction: (p / (p - 1)) (1 - 1/S).
Fraction fraction_from_speedup(Speedup s, double processors);

/// log(1 - 1/S), independent of p. Throws DomainError for S <= 1.
Exponent exponent_exact(Speedup s);

/// 1 / (1 - exp(F)). Returns nullopt for F >= 0, where the relation gives no
/// finite positive speedup.
std::optional<Speedup> speedup_from_exponent(Exponent f);

/// Quadratic approximation -1 + sqrt(1 - 2/S). Throws
/// MinimalConditionViolated for S < 2.
Exponent exponent_approx(Speedup s);

/// -1 + sqrt(1 - 2 r) for a time ratio r = T_par(p,n) / T_par(1,n).
/// Throws MinimalConditionViolated for r > 1/2 and DomainError for r <= 0.
Exponent exponent_from_time_ratio(double ratio);

/// (p / (p - 1)) (1 + F + F^2 / 2). The truncation overshoots 1 near F = 0.
Fraction fraction_approx_from_exponent(Exponent f, double processors);

/// -1 / (F + F^2 / 2), the inverse of exponent_approx. Requires -2 < F < 0.
Speedup speedup_from_exponent_approx(Exponent f);

/// T_par(p,n) <= T_par(1,n) / 2.
bool minimal_condition(double t_par_p, double t_par_1);

/// log(1 - 1/x) for x > 1, accurate both near 1 and for large x.
double log_one_minus_reciprocal(double x);

}  // namespace speeduplab
