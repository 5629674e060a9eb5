#pragma once

// Conditions under which S > p is compatible with an ordinary
// parallelizable fraction f <= 1.

#include <cstdint>

#include "speeduplab/amdahl.hpp"

namespace speeduplab {

/// log(1 - 1/p).
double superlinear_threshold_exact(double processors);

/// -1/(2 p^2) - 1/p, the second-order expansion of the exact threshold.
double superlinear_threshold_approx(double processors);

/// F > log(1 - 1/p). With an exact exponent this is S > p.
bool superlinear_exact(Exponent f, double processors);

/// F > -1/(2 p^2) - 1/p.
bool superlinear_approx(Exponent f, double processors);

/// 1/(2 S^2) + 1/S < 1/(2 p^2) + 1/p.
bool superlinear_speedup_condition(Speedup s, double processors);

struct SuperlinearReport {
  bool exact_holds = false;
  bool approx_holds = false;
  bool speedup_form_holds = false;
  double threshold_exact = 0.0;
  double threshold_approx = 0.0;
};

/// All three conditions for a speedup S on p processors. The exact test uses
/// exponent_exact(S), the approximate test exponent_approx(S); each is false
/// where its exponent is undefined (S <= 1, resp. S < 2).
SuperlinearReport superlinear_report(Speedup s, double processors);

/// (n + sqrt(n^2 + 2 C n)) / (2 C): processor counts below this bound admit
/// superlinear speedup for the FFT model with C = A/B, once the 1/(2 S^2)
/// term is dropped.
double fft_superlinear_pmax(double c, double n);

/// Largest integer p >= 1 with C/n < 1/(2 p^2) + 1/p, found by exponential
/// and binary search over the inequality itself; 0 if none.
std::uint64_t fft_superlinear_scan(double c, double n);

}  // namespace speeduplab
