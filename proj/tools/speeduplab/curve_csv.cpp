#include "speeduplab/curve_csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "speeduplab/error.hpp"

namespace speeduplab::cli {

namespace {

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_curve(std::ostream& out, const CurveSeries& series) {
  out << "p," << series.label << '\n';
  for (const auto& pt : series.points) {
    out << format_number(pt.x) << ',' << format_number(pt.y) << '\n';
  }
}

CurveSeries read_curve(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("p,", 0) != 0 || line.size() < 3 ||
      line.find(',', 2) != std::string::npos) {
    throw DataError("curve header must be p,<quantity>", {1});
  }
  CurveSeries series{line.substr(2), {}};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    CurvePoint pt{};
    if (comma == std::string::npos ||
        !parse_double(std::string_view(line).substr(0, comma), pt.x) ||
        !parse_double(std::string_view(line).substr(comma + 1), pt.y)) {
      throw DataError("malformed curve row at line " + std::to_string(line_no), {line_no});
    }
    if (!series.points.empty() && !(pt.x > series.points.back().x)) {
      throw DataError("curve x values must increase strictly (line " + std::to_string(line_no) +
                          ")",
                      {line_no});
    }
    series.points.push_back(pt);
  }
  return series;
}

}  // namespace speeduplab::cli
