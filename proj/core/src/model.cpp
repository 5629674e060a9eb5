#include "speeduplab/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "speeduplab/asymptotics.hpp"
#include "speeduplab/error.hpp"

namespace speeduplab {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_identifiers(const Expr& e, const Constants& constants, bool allow_p, bool allow_n,
                       std::string_view what) {
  for (const auto& id : identifiers(e)) {
    if (id == "p") {
      if (!allow_p) throw ModelError(std::string(what) + " must not depend on p");
      continue;
    }
    if (id == "n") {
      if (!allow_n) throw ModelError(std::string(what) + " must not depend on n");
      continue;
    }
    if (!constants.contains(id)) {
      throw ModelError(std::string(what) + " references unknown constant '" + id + "'");
    }
  }
}

double positive_time(double t, std::string_view what) {
  if (!(t > 0.0)) throw ModelError(std::string(what) + " is not positive");
  return t;
}

Expr parse_model_expr(const std::string& text, std::string_view field) {
  try {
    return parse(text);
  } catch (const SyntaxError& e) {
    throw ModelError("field '" + std::string(field) + "': " + e.what());
  }
}

}  // namespace

GrowthConstraint GrowthConstraint::linear_in_p(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ModelError("linear_in_p constraint needs a positive k");
  }
  return {Kind::LinearInP, k};
}

GrowthFunction::GrowthFunction(std::string name, Expr g, Constants constants)
    : name_(std::move(name)), g_(std::move(g)), constants_(std::move(constants)) {
  check_identifiers(g_, constants_, true, false, "growth function '" + name_ + "'");
}

GrowthFunction GrowthFunction::parse(std::string_view text, Constants constants) {
  return GrowthFunction(std::string(text), speeduplab::parse(text), std::move(constants));
}

GrowthFunction GrowthFunction::linear() { return parse("p"); }
GrowthFunction GrowthFunction::p_log_p() { return parse("p*log(p)"); }
GrowthFunction GrowthFunction::quadratic() { return parse("p^2"); }

GrowthFunction GrowthFunction::proportional(double k) {
  GrowthFunction g("k*p", speeduplab::parse("k*p"), Constants{{"k", k}});
  std::ostringstream name;
  name << k << "*p";
  g.name_ = name.str();
  return g;
}

GrowthFunction GrowthFunction::power(double alpha) {
  GrowthFunction g("p^alpha", speeduplab::parse("p^alpha"), Constants{{"alpha", alpha}});
  std::ostringstream name;
  name << "p^" << alpha;
  g.name_ = name.str();
  return g;
}

GrowthFunction GrowthFunction::constant(double n) {
  std::ostringstream name;
  name << n;
  return GrowthFunction(name.str(), Expr::number(n));
}

double GrowthFunction::operator()(double p) const {
  return evaluate(g_, Bindings{p, 1.0, &constants_});
}

bool GrowthFunction::is_increasing(const std::vector<double>& p_values) const {
  std::optional<double> previous;
  for (double p : p_values) {
    double current = 0.0;
    try {
      current = (*this)(p);
    } catch (const EvalError& e) {
      // overflow past the tail of the schedule only shortens the check
      if (e.kind() == EvalError::Kind::NonFinite && previous) break;
      throw;
    }
    if (previous && !(current > *previous)) return false;
    previous = current;
  }
  return true;
}

std::vector<std::string> GrowthFunction::warnings(const std::vector<double>& p_values) const {
  std::vector<std::string> out;
  if (!is_increasing(p_values)) out.push_back(name_ + " is not increasing in p");
  for (double p : p_values) {
    if ((*this)(p) < p) {
      std::ostringstream msg;
      msg << name_ << " gives n < p at p=" << p;
      out.push_back(msg.str());
      break;
    }
  }
  return out;
}

std::vector<GrowthFunction> default_family() {
  return {GrowthFunction::linear(), GrowthFunction::p_log_p(), GrowthFunction::quadratic(),
          GrowthFunction::parse("100*p"), GrowthFunction::parse("p^3")};
}

CostModel::CostModel(std::string name, Expr t_par, std::optional<Expr> t_ser, Constants constants,
                     GrowthConstraint constraint)
    : name_(std::move(name)),
      t_par_(std::move(t_par)),
      t_ser_(std::move(t_ser)),
      constants_(std::move(constants)),
      constraint_(constraint) {
  for (const auto& [id, value] : constants_) {
    if (id == "p" || id == "n") throw ModelError("'" + id + "' cannot be a constant");
    if (!std::isfinite(value)) throw ModelError("constant '" + id + "' is not finite");
  }
  check_identifiers(t_par_, constants_, true, true, "t_par");
  if (t_ser_) check_identifiers(*t_ser_, constants_, false, true, "t_ser");
}

double CostModel::parallel_time(double p, double n) const {
  return evaluate(t_par_, Bindings{p, n, &constants_});
}

double CostModel::serial_time(double n) const {
  if (t_ser_) return evaluate(*t_ser_, Bindings{1.0, n, &constants_});
  return parallel_time(1.0, n);
}

CostModel CostModel::scaled(double factor) const {
  Constants c = constants_;
  for (auto& [id, value] : c) value *= factor;
  return with_constants(std::move(c));
}

CostModel CostModel::with_constants(Constants constants) const {
  return CostModel(name_, t_par_, t_ser_, std::move(constants), constraint_);
}

CostModel CostModel::with_constraint(GrowthConstraint constraint) const {
  return CostModel(name_, t_par_, t_ser_, constants_, constraint);
}

CostModel trapezoid_model(double a, double b) {
  return CostModel("trapezoid", parse("a*n/p + b*log(p)"), std::nullopt, {{"a", a}, {"b", b}});
}

CostModel matvec_model(double a, double b) {
  return CostModel("matvec", parse("a*(2*n^2 - n)/p + b*(n^2 + n)"), std::nullopt,
                   {{"a", a}, {"b", b}});
}

CostModel fft_model(double a, double b, double k) {
  return CostModel("fft", parse("A*log2(n)"), parse("B*n*log2(n)"), {{"A", a}, {"B", b}},
                   GrowthConstraint::linear_in_p(k));
}

std::vector<std::string> bundled_model_names() { return {"trapezoid", "matvec", "fft"}; }

CostModel bundled_model(std::string_view name) {
  if (name == "trapezoid") return trapezoid_model();
  if (name == "matvec") return matvec_model();
  if (name == "fft") return fft_model();
  throw ModelError("unknown bundled model '" + std::string(name) + "'");
}

CostModel model_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("model file must contain a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "t_par" && key != "t_ser" && key != "constants" &&
        key != "constraint") {
      throw ModelError("unknown field '" + key + "' in model file");
    }
  }
  if (!doc.contains("name") || !doc["name"].is_string()) {
    throw ModelError("model file needs a string 'name'");
  }
  if (!doc.contains("t_par") || !doc["t_par"].is_string()) {
    throw ModelError("model file needs a string 't_par'");
  }

  std::optional<Expr> t_ser;
  if (doc.contains("t_ser") && !doc["t_ser"].is_null()) {
    if (!doc["t_ser"].is_string()) throw ModelError("'t_ser' must be a string or null");
    t_ser = parse_model_expr(doc["t_ser"].get<std::string>(), "t_ser");
  }

  Constants constants;
  if (doc.contains("constants")) {
    if (!doc["constants"].is_object()) throw ModelError("'constants' must be an object");
    for (const auto& [key, value] : doc["constants"].items()) {
      if (!value.is_number()) throw ModelError("constant '" + key + "' must be a number");
      constants.emplace(key, value.get<double>());
    }
  }

  GrowthConstraint constraint;
  if (doc.contains("constraint")) {
    const auto& c = doc["constraint"];
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) {
      throw ModelError("'constraint' must be an object with a string 'kind'");
    }
    const auto kind = c["kind"].get<std::string>();
    if (kind == "free") {
      for (const auto& [key, value] : c.items()) {
        if (key != "kind") throw ModelError("unknown field '" + key + "' in constraint");
      }
    } else if (kind == "linear_in_p") {
      for (const auto& [key, value] : c.items()) {
        if (key != "kind" && key != "k") {
          throw ModelError("unknown field '" + key + "' in constraint");
        }
      }
      if (!c.contains("k") || !c["k"].is_number()) {
        throw ModelError("linear_in_p constraint needs a numeric 'k'");
      }
      constraint = GrowthConstraint::linear_in_p(c["k"].get<double>());
    } else {
      throw ModelError("unknown constraint kind '" + kind + "'");
    }
  }

  return CostModel(doc["name"].get<std::string>(),
                   parse_model_expr(doc["t_par"].get<std::string>(), "t_par"), std::move(t_ser),
                   std::move(constants), constraint);
}

std::string model_to_json(const CostModel& model) {
  ordered_json doc;
  doc["name"] = model.name();
  doc["t_par"] = unparse(model.t_par());
  doc["t_ser"] = model.t_ser() ? ordered_json(unparse(*model.t_ser())) : ordered_json(nullptr);
  doc["constants"] = ordered_json::object();
  for (const auto& [id, value] : model.constants()) doc["constants"][id] = value;
  if (model.constraint().kind == GrowthConstraint::Kind::Free) {
    doc["constraint"] = {{"kind", "free"}};
  } else {
    doc["constraint"] = {{"kind", "linear_in_p"}, {"k", model.constraint().k}};
  }
  return doc.dump(2);
}

CostModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

double time_ratio(const CostModel& model, double p, double n) {
  const double t_ser = positive_time(model.serial_time(n), "serial time");
  const double t_par = positive_time(model.parallel_time(p, n), "parallel time");
  return t_par / t_ser;
}

Speedup model_speedup(const CostModel& model, double p, double n) {
  if (!(p > 1.0)) throw DomainError("model speedup requires p > 1");
  const double t_ser = positive_time(model.serial_time(n), "serial time");
  const double t_par = positive_time(model.parallel_time(p, n), "parallel time");
  return Speedup(t_ser / t_par);
}

Exponent model_exponent(const CostModel& model, double p, double n) {
  return exponent_from_time_ratio(time_ratio(model, p, n));
}

bool admissible(const GrowthConstraint& constraint, const GrowthFunction& g,
                const Schedule& schedule) {
  try {
    if (!g.is_increasing(schedule.p_values)) return false;
  } catch (const EvalError&) {
    return false;
  }
  if (constraint.kind == GrowthConstraint::Kind::Free) return true;
  const GrowthRatio ratio = growth_ratio_limit(g, schedule);
  return ratio.kind == GrowthKind::FiniteRatio;
}

}  // namespace speeduplab
