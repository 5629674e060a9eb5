#pragma once

// Parametric cost models T_par(p, n) and problem-growth functions n = g(p).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speeduplab/amdahl.hpp"
#include "speeduplab/expr.hpp"
#include "speeduplab/schedule.hpp"

namespace speeduplab {

/// Restriction on how the problem dimension may grow with p.
struct GrowthConstraint {
  enum class Kind { Free, LinearInP };

  Kind kind = Kind::Free;
  /// Elements per processor; meaningful for LinearInP only.
  double k = 0.0;

  static GrowthConstraint free() { return {}; }
  static GrowthConstraint linear_in_p(double k);

  friend bool operator==(const GrowthConstraint&, const GrowthConstraint&) = default;
};

/// n = g(p), an expression in `p` and the growth's own constants.
class GrowthFunction {
 public:
  /// Throws ModelError if `g` references `n` or an unbound constant.
  GrowthFunction(std::string name, Expr g, Constants constants = {});

  /// Parses `text`; the name defaults to the source text.
  static GrowthFunction parse(std::string_view text, Constants constants = {});

  static GrowthFunction linear();                   // p
  static GrowthFunction p_log_p();                  // p*log(p)
  static GrowthFunction quadratic();                // p^2
  static GrowthFunction proportional(double k);     // k*p
  static GrowthFunction power(double alpha);        // p^alpha
  static GrowthFunction constant(double n);         // fixed dimension

  const std::string& name() const noexcept { return name_; }
  const Expr& expr() const noexcept { return g_; }
  const Constants& constants() const noexcept { return constants_; }

  double operator()(double p) const;

  /// Human-readable problems along the given processor counts: g not
  /// increasing, or g(p) < p.
  std::vector<std::string> warnings(const std::vector<double>& p_values) const;
  bool is_increasing(const std::vector<double>& p_values) const;

 private:
  std::string name_;
  Expr g_;
  Constants constants_;
};

/// Free growth plus p, p*log(p), p^2, 100*p and p^3.
std::vector<GrowthFunction> default_family();

/// A named cost model. T_ser is T_par(1, n) unless an explicit serial
/// expression in `n` is given.
class CostModel {
 public:
  /// Throws ModelError when an expression references an identifier that is
  /// neither a variable nor a constant, or `t_ser` references `p`.
  CostModel(std::string name, Expr t_par, std::optional<Expr> t_ser, Constants constants,
            GrowthConstraint constraint = GrowthConstraint::free());

  const std::string& name() const noexcept { return name_; }
  const Expr& t_par() const noexcept { return t_par_; }
  const std::optional<Expr>& t_ser() const noexcept { return t_ser_; }
  const Constants& constants() const noexcept { return constants_; }
  const GrowthConstraint& constraint() const noexcept { return constraint_; }

  double parallel_time(double p, double n) const;
  double serial_time(double n) const;

  /// Same model with every constant multiplied by `factor`.
  CostModel scaled(double factor) const;
  CostModel with_constants(Constants constants) const;
  CostModel with_constraint(GrowthConstraint constraint) const;

 private:
  std::string name_;
  Expr t_par_;
  std::optional<Expr> t_ser_;
  Constants constants_;
  GrowthConstraint constraint_;
};

/// a*n/p + b*log(p)
CostModel trapezoid_model(double a = 1.0, double b = 1.0);
/// a*(2*n^2 - n)/p + b*(n^2 + n)
CostModel matvec_model(double a = 1.0, double b = 2.0);
/// T_par = A*log2(n), T_ser = B*n*log2(n), n = k p
CostModel fft_model(double a = 1.0, double b = 1.0, double k = 100.0);

std::vector<std::string> bundled_model_names();
/// Throws ModelError for unknown names.
CostModel bundled_model(std::string_view name);

/// JSON model file (name, t_par, t_ser, constants, constraint). Unknown
/// fields are rejected with ModelError.
CostModel model_from_json(std::string_view text);
std::string model_to_json(const CostModel& model);
CostModel load_model_file(const std::string& path);

/// T_par(p, n) / T_ser(n).
double time_ratio(const CostModel& model, double p, double n);

/// T_ser(n) / T_par(p, n). Requires p > 1 and n >= 1.
Speedup model_speedup(const CostModel& model, double p, double n);

/// Quadratic-approximation exponent from the time ratio. Throws
/// MinimalConditionViolated when the ratio exceeds 1/2.
Exponent model_exponent(const CostModel& model, double p, double n);

/// Whether `g` is compatible with the constraint along `schedule`: Free needs
/// an increasing g, LinearInP additionally needs g(p)/p to converge to a
/// finite positive limit.
bool admissible(const GrowthConstraint& constraint, const GrowthFunction& g,
                const Schedule& schedule = Schedule::geometric());

}  // namespace speeduplab
