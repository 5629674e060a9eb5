#pragma once

// Least-squares calibration of coefficient-linear cost models and the
// empirical exponent of parallelism from measured timings.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "speeduplab/classifier.hpp"
#include "speeduplab/expr.hpp"
#include "speeduplab/model.hpp"

namespace speeduplab {

struct TimingSample {
  std::int64_t p;
  std::int64_t n;
  double time;
};

/// time ~ sum_i c_i * basis_i(p, n). When `serial_basis` is non-empty the
/// p = 1 samples are fitted against it instead, giving the model an explicit
/// serial-time expression in n. Without p = 1 samples the serial constants
/// are left out of the fit.
struct ModelTemplate {
  std::string name;
  std::vector<Expr> basis;
  std::vector<std::string> constant_names;
  std::vector<Expr> serial_basis;
  std::vector<std::string> serial_constant_names;
  GrowthConstraint constraint;

  /// Throws ModelError on mismatched lengths or basis terms that reference
  /// anything other than p and n (serial terms: n only).
  void validate() const;
  /// The model sum_i c_i * basis_i with the given constants.
  CostModel instantiate(const Constants& constants) const;
};

ModelTemplate trapezoid_template();  // a*(n/p) + b*log(p)
ModelTemplate matvec_template();     // a*((2*n^2 - n)/p) + b*(n^2 + n)
ModelTemplate fft_template();        // A*log2(n); serial B*(n*log2(n)); n = 100 p
std::vector<std::string> bundled_template_names();
/// Throws ModelError for unknown names.
ModelTemplate bundled_template(std::string_view name);

struct FitResult {
  Constants constants;
  /// 2-norm of the residual over all samples, in seconds.
  double residual_norm = 0.0;
  double r_squared = 1.0;
  /// Column-equilibrated design matrix condition number exceeds 1e8.
  bool condition_warning = false;
  /// Constants that came out negative.
  std::vector<std::string> negative_constants;
};

/// Throws FitError when there are fewer samples than coefficients or the
/// design matrix is rank deficient; DataError for invalid samples.
FitResult fit(const ModelTemplate& tmpl, std::span<const TimingSample> samples);

struct EmpiricalPoint {
  std::int64_t p;
  std::int64_t n;
  double ratio;
  /// Empty where the minimal condition of parallelism fails.
  std::optional<double> exponent;
};

/// Exponent per p > 1 sample against the p = 1 baseline of the same n (the
/// mean, if several). Throws DataError naming every n without a baseline.
std::vector<EmpiricalPoint> empirical_exponent(std::span<const TimingSample> samples);

struct FitClassification {
  FitResult fit;
  CostModel model;
  ClassificationResult classification;
};

FitClassification fit_then_classify(const ModelTemplate& tmpl,
                                    std::span<const TimingSample> samples,
                                    std::span<const GrowthFunction> family,
                                    const Schedule& schedule = Schedule::geometric(),
                                    double zero_tolerance = 1e-3);

/// Measurement CSV with header `p,n,time_seconds`. Throws DataError listing
/// every offending line number.
std::vector<TimingSample> read_measurements(std::istream& in);
std::vector<TimingSample> parse_measurements(std::string_view text);
void write_measurements(std::ostream& out, std::span<const TimingSample> samples);

}  // namespace speeduplab
