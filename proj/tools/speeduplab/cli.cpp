#include "speeduplab/cli.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "speeduplab/classifier.hpp"
#include "speeduplab/curve_csv.hpp"
#include "speeduplab/error.hpp"
#include "speeduplab/fitting.hpp"
#include "speeduplab/superlinear.hpp"

namespace speeduplab::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kScheduleEnv = "SPEEDUPLAB_SCHEDULE_MAX_EXP";
constexpr int kScheduleMinExp = 4;

/// Bad command-line input that CLI11 itself does not catch.
class UsageError : public Error {
 public:
  using Error::Error;
};

Schedule schedule_from_env() {
  const char* raw = std::getenv(kScheduleEnv);
  if (raw == nullptr || *raw == '\0') return Schedule::geometric(kScheduleMinExp, 40);
  int max_exp = 0;
  const std::string_view text(raw);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), max_exp);
  if (ec != std::errc() || ptr != text.data() + text.size() || max_exp < kScheduleMinExp + 5 ||
      max_exp > 1000) {
    throw UsageError(std::string(kScheduleEnv) + " must be an integer in [" +
                     std::to_string(kScheduleMinExp + 5) + ", 1000]");
  }
  return Schedule::geometric(kScheduleMinExp, max_exp);
}

CostModel resolve_model(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) return load_model_file(spec);
  for (const auto& name : bundled_model_names()) {
    if (name == spec) return bundled_model(spec);
  }
  throw ModelError("'" + spec + "' is neither a model file nor a bundled model");
}

GrowthFunction parse_growth(const std::string& text) {
  try {
    return GrowthFunction::parse(text);
  } catch (const SyntaxError& e) {
    throw UsageError("growth expression '" + text + "': " + e.what());
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
}

std::vector<GrowthFunction> parse_family(const std::string& list) {
  if (list.empty()) return default_family();
  std::vector<GrowthFunction> family;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto item = list.substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start);
    if (item.find_first_not_of(" \t") == std::string::npos) {
      throw UsageError("empty entry in growth family '" + list + "'");
    }
    family.push_back(parse_growth(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return family;
}

std::vector<double> geometric_grid(double p_min, double p_max, int points) {
  if (!(p_min > 1.0) || !std::isfinite(p_min)) throw UsageError("--p-min must exceed 1");
  if (!(p_max > p_min) || !std::isfinite(p_max)) throw UsageError("--p-max must exceed --p-min");
  if (points < 2) throw UsageError("--points must be at least 2");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double lo = std::log2(p_min);
  const double span = std::log2(p_max) - lo;
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    grid.push_back(i + 1 == points ? p_max : std::exp2(lo + span * t));
  }
  return grid;
}

ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json limit_json(const LimitEstimate& est) {
  ordered_json j;
  j["kind"] = std::string(to_string(est.kind));
  j["value"] = number_or_null(est.value);
  j["converged"] = est.converged;
  j["residual"] = number_or_null(est.residual);
  j["points"] = est.samples.size();
  j["skipped"] = est.skipped.size();
  j["truncated"] = est.truncated;
  return j;
}

ordered_json optional_limit_json(const std::optional<LimitEstimate>& est) {
  return est ? limit_json(*est) : ordered_json(nullptr);
}

ordered_json classification_json(const CostModel& model, const ClassificationResult& result,
                                 const Schedule& schedule) {
  ordered_json j;
  j["model"] = model.name();
  j["verdict"] = std::string(to_string(result.verdict));
  j["zero_tolerance"] = result.zero_tolerance;
  j["witness"] = result.witness ? ordered_json(result.evidence[*result.witness].growth.name())
                                : ordered_json(nullptr);
  j["witnesses"] = ordered_json::array();
  for (auto i : result.witnesses) j["witnesses"].push_back(result.evidence[i].growth.name());
  j["schedule"] = {{"p_min", schedule.p_values.front()},
                   {"p_max", schedule.p_values.back()},
                   {"points", schedule.p_values.size()},
                   {"tol", schedule.tol}};
  j["evidence"] = ordered_json::array();
  for (const auto& ev : result.evidence) {
    ordered_json e;
    e["growth"] = ev.growth.name();
    e["kind"] = std::string(to_string(ev.growth_kind));
    e["admissible"] = ev.admissible;
    e["growth_ratio_limit"] = optional_limit_json(ev.growth_ratio);
    e["ratio_limit"] = optional_limit_json(ev.ratio_limit);
    e["exponent_limit"] = optional_limit_json(ev.exponent_limit);
    e["note"] = ev.note;
    j["evidence"].push_back(std::move(e));
  }
  return j;
}

int cmd_speedup(const std::optional<std::string>& model_spec, const std::optional<double>& fraction,
                const std::optional<std::string>& growth, const std::optional<double>& fixed_n,
                double p_min, double p_max, int points, std::ostream& out) {
  const auto grid = geometric_grid(p_min, p_max, points);
  CurveSeries series{"speedup", {}};
  if (fraction) {
    if (model_spec || growth || fixed_n) {
      throw UsageError("--fraction replaces the model; drop MODEL, --g and --n");
    }
    const Fraction f(*fraction);
    if (!f.is_ordinary()) throw UsageError("--fraction must lie in (0, 1]");
    for (double p : grid) series.points.push_back({p, speedup_from_fraction(f, p).value()});
  } else {
    if (!model_spec) throw UsageError("speedup needs MODEL or --fraction");
    if (growth.has_value() == fixed_n.has_value()) {
      throw UsageError("give exactly one of --g and --n");
    }
    if (fixed_n && !(*fixed_n >= 1.0)) throw UsageError("--n must be >= 1");
    const GrowthFunction g = growth ? parse_growth(*growth) : GrowthFunction::constant(*fixed_n);
    const CostModel model = resolve_model(*model_spec);
    for (double p : grid) series.points.push_back({p, model_speedup(model, p, g(p)).value()});
  }
  write_curve(out, series);
  return kSuccess;
}

int cmd_classify(const std::string& model_spec, const std::string& family_list, double tol,
                 std::ostream& out) {
  if (!(tol > 0.0)) throw UsageError("--tol must be positive");
  const auto family = parse_family(family_list);
  const Schedule schedule = schedule_from_env();
  const CostModel model = resolve_model(model_spec);
  const auto result = classify(model, family, schedule, tol);
  out << classification_json(model, result, schedule).dump(2) << '\n';
  return kSuccess;
}

int cmd_superlinear(const std::optional<double>& p, const std::optional<double>& c,
                    const std::optional<double>& n, std::ostream& out) {
  ordered_json j;
  if (p) {
    if (c || n) throw UsageError("use either --p or --C with --n");
    if (!(*p > 1.0)) throw UsageError("--p must exceed 1");
    j["p"] = *p;
    j["threshold_exact"] = superlinear_threshold_exact(*p);
    j["threshold_approx"] = superlinear_threshold_approx(*p);
  } else {
    if (!c || !n) throw UsageError("superlinear needs --p, or both --C and --n");
    if (!(*c > 0.0)) throw UsageError("--C must be positive");
    if (!(*n >= 1.0)) throw UsageError("--n must be >= 1");
    j["C"] = *c;
    j["n"] = *n;
    j["p_bound"] = fft_superlinear_pmax(*c, *n);
    j["oracle_max_p"] = fft_superlinear_scan(*c, *n);
  }
  out << j.dump(2) << '\n';
  return kSuccess;
}

int cmd_fit(const std::string& template_name, const std::string& csv_path, bool with_classify,
            const std::string& family_list, double tol, std::ostream& out) {
  if (!(tol > 0.0)) throw UsageError("--tol must be positive");
  const auto family = parse_family(family_list);
  const Schedule schedule = schedule_from_env();
  const ModelTemplate tmpl = [&] {
    try {
      return bundled_template(template_name);
    } catch (const ModelError& e) {
      throw UsageError(e.what());
    }
  }();

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open measurement file '" + csv_path + "'");
  const auto samples = read_measurements(in);

  ordered_json j;
  j["template"] = tmpl.name;
  j["samples"] = samples.size();
  auto emit_fit = [&j](const FitResult& fr) {
    j["constants"] = ordered_json::object();
    for (const auto& [name, value] : fr.constants) j["constants"][name] = value;
    j["residual_norm"] = fr.residual_norm;
    j["r_squared"] = fr.r_squared;
    j["condition_warning"] = fr.condition_warning;
    j["negative_constants"] = fr.negative_constants;
  };
  if (with_classify) {
    const auto result = fit_then_classify(tmpl, samples, family, schedule, tol);
    emit_fit(result.fit);
    j["classification"] = classification_json(result.model, result.classification, schedule);
  } else {
    emit_fit(fit(tmpl, samples));
  }
  out << j.dump(2) << '\n';
  return kSuccess;
}

int cmd_fig4(double p_min, double p_max, int points, std::ostream& out) {
  if (!(p_min >= 2.0)) throw UsageError("--p-min must be >= 2");
  CurveSeries series{"threshold", {}};
  for (double p : geometric_grid(p_min, p_max, points)) {
    series.points.push_back({p, superlinear_threshold_approx(p)});
  }
  write_curve(out, series);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speedup, exponent of parallelism and scalability classes for parallel cost models",
               "speeduplab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::optional<std::string> model_spec;
  std::optional<double> fraction;
  std::optional<std::string> growth;
  std::optional<double> fixed_n;
  double p_min = 2.0;
  double p_max = 1024.0;
  int points = 32;
  auto* speedup = app.add_subcommand("speedup", "Emit a p,speedup curve");
  speedup->add_option("model", model_spec, "Model JSON file or bundled model name");
  speedup->add_option("--fraction", fraction, "Classical Amdahl model with parallel fraction f");
  speedup->add_option("--g", growth, "Growth function n = g(p)");
  speedup->add_option("--n", fixed_n, "Fixed problem dimension");
  speedup->add_option("--p-min", p_min, "Smallest processor count")->capture_default_str();
  speedup->add_option("--p-max", p_max, "Largest processor count")->capture_default_str();
  speedup->add_option("--points", points, "Number of grid points")->capture_default_str();

  std::string classify_model;
  std::string family_list;
  double tol = 1e-3;
  auto* classify_cmd = app.add_subcommand("classify", "Classify a model as strong/weak/Amdahl-like");
  classify_cmd->add_option("model", classify_model, "Model JSON file or bundled model name")
      ->required();
  classify_cmd->add_option("--family", family_list,
                           "Comma-separated growth functions (default: p,p*log(p),p^2,100*p,p^3)");
  classify_cmd->add_option("--tol", tol, "Tolerance for 'tends to zero'")->capture_default_str();

  std::optional<double> sl_p;
  std::optional<double> sl_c;
  std::optional<double> sl_n;
  auto* superlinear = app.add_subcommand("superlinear", "Superlinear-speedup thresholds");
  superlinear->add_option("--p", sl_p, "Processor count: print exponent thresholds");
  superlinear->add_option("--C", sl_c, "FFT constant C = A/B");
  superlinear->add_option("--n", sl_n, "FFT problem dimension");

  std::string template_name;
  std::string csv_path;
  bool with_classify = false;
  std::string fit_family;
  double fit_tol = 1e-3;
  std::string fit_templates;
  for (const auto& name : bundled_template_names()) {
    fit_templates += (fit_templates.empty() ? "" : ", ") + name;
  }
  auto* fit_cmd = app.add_subcommand("fit", "Fit model constants to measured timings");
  fit_cmd->add_option("template", template_name, "Model template: " + fit_templates)->required();
  fit_cmd->add_option("measurements", csv_path, "CSV with header p,n,time_seconds")->required();
  fit_cmd->add_flag("--classify", with_classify, "Classify the fitted model");
  fit_cmd->add_option("--family", fit_family, "Comma-separated growth functions");
  fit_cmd->add_option("--tol", fit_tol, "Tolerance for 'tends to zero'")->capture_default_str();

  double f4_min = 2.0;
  double f4_max = 1000.0;
  int f4_points = 50;
  auto* fig4 = app.add_subcommand("fig4", "Emit the superlinear exponent threshold curve");
  fig4->add_option("--p-min", f4_min, "Smallest processor count")->capture_default_str();
  fig4->add_option("--p-max", f4_max, "Largest processor count")->capture_default_str();
  fig4->add_option("--points", f4_points, "Number of grid points")->capture_default_str();

  std::vector<std::string> argv_storage{"speeduplab"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*speedup) {
      return cmd_speedup(model_spec, fraction, growth, fixed_n, p_min, p_max, points, out);
    }
    if (*classify_cmd) return cmd_classify(classify_model, family_list, tol, out);
    if (*superlinear) return cmd_superlinear(sl_p, sl_c, sl_n, out);
    if (*fit_cmd) {
      return cmd_fit(template_name, csv_path, with_classify, fit_family, fit_tol, out);
    }
    if (*fig4) return cmd_fig4(f4_min, f4_max, f4_points, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kModelError;
  }
  err << "error: no subcommand\n";
  return kUsage;
}

}  // namespace speeduplab::cli
