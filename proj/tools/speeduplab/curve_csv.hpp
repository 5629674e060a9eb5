#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace speeduplab::cli {

struct CurvePoint {
  double x;
  double y;
};

/// One emitted curve: header `p,<label>`, x strictly increasing.
struct CurveSeries {
  std::string label;
  std::vector<CurvePoint> points;
};

/// Shortest round-trip decimal form.
std::string format_number(double value);

void write_curve(std::ostream& out, const CurveSeries& series);

/// Throws speeduplab::DataError on a malformed header, row, or a
/// non-increasing x column.
CurveSeries read_curve(std::istream& in);

}  // namespace speeduplab::cli
