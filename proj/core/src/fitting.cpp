#include "speeduplab/fitting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

constexpr double kConditionLimit = 1e8;

struct SubFit {
  Eigen::VectorXd coefficients;
  double residual_sq = 0.0;
  double total_sq = 0.0;
  bool ill_conditioned = false;
};

SubFit solve(const std::vector<Expr>& basis, std::span<const TimingSample* const> rows,
             std::string_view what) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(basis.size());
  if (m < k) {
    throw FitError(std::string(what) + ": " + std::to_string(m) + " samples for " +
                   std::to_string(k) + " coefficients");
  }
  Eigen::MatrixXd design(m, k);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& s = *rows[static_cast<std::size_t>(i)];
    const Bindings b{static_cast<double>(s.p), static_cast<double>(s.n), nullptr};
    for (Eigen::Index j = 0; j < k; ++j) {
      design(i, j) = evaluate(basis[static_cast<std::size_t>(j)], b);
    }
    y(i) = s.time;
  }

  // equilibrate columns so rank and conditioning are scale-free
  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (scale(j) == 0.0) {
      throw FitError(std::string(what) + ": basis term " + std::to_string(j + 1) +
                     " vanishes on every sample");
    }
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) {
    throw FitError(std::string(what) + ": design matrix is rank deficient (rank " +
                   std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
  }

  SubFit out;
  out.coefficients = qr.solve(y).cwiseQuotient(scale);
  out.residual_sq = (design * out.coefficients - y).squaredNorm();
  out.total_sq = (y.array() - y.mean()).square().sum();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  out.ill_conditioned = sv(k - 1) == 0.0 || sv(0) / sv(k - 1) > kConditionLimit;
  return out;
}

void check_samples(std::span<const TimingSample> samples) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.p < 1 || s.n < 1 || !(s.time > 0.0) || !std::isfinite(s.time)) bad.push_back(i + 1);
  }
  if (!bad.empty()) throw DataError("samples need p >= 1, n >= 1 and a positive time", bad);
}

Expr weighted_sum(const std::vector<Expr>& basis, const std::vector<std::string>& names) {
  std::optional<Expr> sum;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Expr term = Expr::binary(BinaryOp::Mul, Expr::ident(names[i]), basis[i]);
    sum = sum ? Expr::binary(BinaryOp::Add, *sum, term) : term;
  }
  return *sum;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
bool parse_field(const std::string& text, T& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

void ModelTemplate::validate() const {
  if (basis.empty()) throw ModelError("template '" + name + "' has no basis terms");
  if (basis.size() != constant_names.size() ||
      serial_basis.size() != serial_constant_names.size()) {
    throw ModelError("template '" + name + "': basis and constant names differ in length");
  }
  for (const auto& b : basis) {
    for (const auto& id : identifiers(b)) {
      if (id != "p" && id != "n") {
        throw ModelError("template basis may only reference p and n, found '" + id + "'");
      }
    }
  }
  for (const auto& b : serial_basis) {
    for (const auto& id : identifiers(b)) {
      if (id != "n") throw ModelError("serial basis may only reference n, found '" + id + "'");
    }
  }
}

CostModel ModelTemplate::instantiate(const Constants& constants) const {
  validate();
  std::optional<Expr> t_ser;
  if (!serial_basis.empty()) t_ser = weighted_sum(serial_basis, serial_constant_names);
  return CostModel(name, weighted_sum(basis, constant_names), std::move(t_ser), constants,
                   constraint);
}

ModelTemplate trapezoid_template() {
  return {"trapezoid", {parse("n/p"), parse("log(p)")}, {"a", "b"}, {}, {}, {}};
}

ModelTemplate matvec_template() {
  return {"matvec", {parse("(2*n^2 - n)/p"), parse("n^2 + n")}, {"a", "b"}, {}, {}, {}};
}

ModelTemplate fft_template() {
  return {"fft",
          {parse("log2(n)")},
          {"A"},
          {parse("n*log2(n)")},
          {"B"},
          GrowthConstraint::linear_in_p(100.0)};
}

std::vector<std::string> bundled_template_names() { return {"trapezoid", "matvec", "fft"}; }

ModelTemplate bundled_template(std::string_view name) {
  if (name == "trapezoid") return trapezoid_template();
  if (name == "matvec") return matvec_template();
  if (name == "fft") return fft_template();
  throw ModelError("unknown model template '" + std::string(name) + "'");
}

FitResult fit(const ModelTemplate& tmpl, std::span<const TimingSample> samples) {
  tmpl.validate();
  check_samples(samples);

  const bool split = !tmpl.serial_basis.empty();
  std::vector<const TimingSample*> parallel_rows;
  std::vector<const TimingSample*> serial_rows;
  for (const auto& s : samples) (split && s.p == 1 ? serial_rows : parallel_rows).push_back(&s);

  FitResult result;
  double residual_sq = 0.0;
  double total_sq = 0.0;
  auto absorb = [&](const SubFit& sub, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      const double c = sub.coefficients(static_cast<Eigen::Index>(i));
      result.constants[names[i]] = c;
      if (c < 0.0) result.negative_constants.push_back(names[i]);
    }
    residual_sq += sub.residual_sq;
    total_sq += sub.total_sq;
    result.condition_warning = result.condition_warning || sub.ill_conditioned;
  };

  absorb(solve(tmpl.basis, parallel_rows, split ? "parallel fit" : "fit"), tmpl.constant_names);
  if (split && !serial_rows.empty()) {
    absorb(solve(tmpl.serial_basis, serial_rows, "serial fit"), tmpl.serial_constant_names);
  }

  result.residual_norm = std::sqrt(residual_sq);
  if (total_sq > 0.0) {
    result.r_squared = std::clamp(1.0 - residual_sq / total_sq, 0.0, 1.0);
  } else {
    result.r_squared = residual_sq == 0.0 ? 1.0 : 0.0;
  }
  return result;
}

std::vector<EmpiricalPoint> empirical_exponent(std::span<const TimingSample> samples) {
  check_samples(samples);
  std::map<std::int64_t, std::pair<double, int>> baselines;
  for (const auto& s : samples) {
    if (s.p != 1) continue;
    auto& [sum, count] = baselines[s.n];
    sum += s.time;
    ++count;
  }

  std::vector<std::int64_t> missing;
  for (const auto& s : samples) {
    if (s.p > 1 && !baselines.contains(s.n) &&
        std::find(missing.begin(), missing.end(), s.n) == missing.end()) {
      missing.push_back(s.n);
    }
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "no p=1 baseline for n =";
    for (auto n : missing) msg << ' ' << n;
    throw DataError(msg.str());
  }

  std::vector<EmpiricalPoint> out;
  for (const auto& s : samples) {
    if (s.p == 1) continue;
    const auto& [sum, count] = baselines.at(s.n);
    const double ratio = s.time / (sum / count);
    EmpiricalPoint point{s.p, s.n, ratio, std::nullopt};
    if (ratio <= 0.5) point.exponent = exponent_from_time_ratio(ratio).value();
    out.push_back(point);
  }
  return out;
}

FitClassification fit_then_classify(const ModelTemplate& tmpl,
                                    std::span<const TimingSample> samples,
                                    std::span<const GrowthFunction> family,
                                    const Schedule& schedule, double zero_tolerance) {
  FitResult result = fit(tmpl, samples);
  CostModel model = tmpl.instantiate(result.constants);
  ClassificationResult verdict = classify(model, family, schedule, zero_tolerance);
  return {std::move(result), std::move(model), std::move(verdict)};
}

std::vector<TimingSample> read_measurements(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("measurement file is empty; expected header p,n,time_seconds");
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "p,n,time_seconds") {
    throw DataError("bad header '" + line + "'; expected exactly p,n,time_seconds", {1});
  }

  std::vector<TimingSample> samples;
  std::vector<std::size_t> bad;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    TimingSample s{};
    if (fields.size() != 3 || !parse_field(fields[0], s.p) || !parse_field(fields[1], s.n) ||
        !parse_field(fields[2], s.time) || s.p < 1 || s.n < 1 || !(s.time > 0.0) ||
        !std::isfinite(s.time)) {
      bad.push_back(line_no);
      continue;
    }
    samples.push_back(s);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid measurement rows (need positive integer p, n and positive time) at line";
    msg << (bad.size() > 1 ? "s" : "");
    for (auto r : bad) msg << ' ' << r;
    throw DataError(msg.str(), bad);
  }
  return samples;
}

std::vector<TimingSample> parse_measurements(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_measurements(in);
}

void write_measurements(std::ostream& out, std::span<const TimingSample> samples) {
  out << "p,n,time_seconds\n";
  for (const auto& s : samples) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, s.time);
    out << s.p << ',' << s.n << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf))
        << '\n';
  }
}

}  // namespace speeduplab
