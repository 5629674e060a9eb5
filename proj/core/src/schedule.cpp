#include "speeduplab/schedule.hpp"

#include <cmath>
#include <string>

#include "speeduplab/error.hpp"

namespace speeduplab {

Schedule Schedule::geometric(int min_exp, int max_exp) {
  if (max_exp < min_exp) throw DomainError("schedule exponent range is empty");
  Schedule s;
  s.p_values.reserve(static_cast<std::size_t>(max_exp - min_exp + 1));
  for (int e = min_exp; e <= max_exp; ++e) s.p_values.push_back(std::ldexp(1.0, e));
  return s;
}

void Schedule::validate() const {
  if (p_values.size() < 6) {
    throw DomainError("schedule needs at least 6 points, got " + std::to_string(p_values.size()));
  }
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (!(p_values[i] >= 2.0) || !std::isfinite(p_values[i])) {
      throw DomainError("schedule points must be finite and >= 2");
    }
    if (i > 0 && !(p_values[i] > p_values[i - 1])) {
      throw DomainError("schedule points must be strictly increasing");
    }
  }
  if (!(tol > 0.0)) throw DomainError("schedule tolerance must be positive");
  if (min_consecutive == 0) throw DomainError("min_consecutive must be at least 1");
}

}  // namespace speeduplab
