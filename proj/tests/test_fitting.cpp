#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "speeduplab/error.hpp"
#include "speeduplab/fitting.hpp"

using namespace speeduplab;
using doctest::Approx;

namespace {

const std::vector<std::int64_t> kProcs{1, 2, 4, 8, 16};

std::vector<TimingSample> synthesize(const CostModel& m, const std::vector<std::int64_t>& procs,
                                     const std::vector<std::int64_t>& dims) {
  std::vector<TimingSample> out;
  for (auto p : procs) {
    for (auto n : dims) {
      const double t = p == 1 ? m.serial_time(static_cast<double>(n))
                              : m.parallel_time(static_cast<double>(p), static_cast<double>(n));
      out.push_back({p, n, t});
    }
  }
  return out;
}

std::vector<TimingSample> with_noise(std::vector<TimingSample> samples, double sigma,
                                     std::uint64_t seed) {
  auto rng = oracles::rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& s : samples) s.time *= 1.0 + noise(rng);
  return samples;
}

double residual_with(const ModelTemplate& tmpl, const Constants& c,
                     const std::vector<TimingSample>& samples) {
  const CostModel m = tmpl.instantiate(c);
  double sq = 0.0;
  for (const auto& s : samples) {
    const double pred = s.p == 1 ? m.serial_time(static_cast<double>(s.n))
                                 : m.parallel_time(static_cast<double>(s.p), static_cast<double>(s.n));
    sq += (pred - s.time) * (pred - s.time);
  }
  return std::sqrt(sq);
}

void check_recovers(const ModelTemplate& tmpl, const CostModel& truth,
                    const std::vector<std::int64_t>& dims) {
  const auto samples = synthesize(truth, kProcs, dims);
  const FitResult r = fit(tmpl, samples);
  INFO(tmpl.name);
  CHECK(r.residual_norm < 1e-9);
  CHECK(r.r_squared == Approx(1.0));
  CHECK_FALSE(r.condition_warning);
  CHECK(r.negative_constants.empty());
  REQUIRE(r.constants.size() == truth.constants().size());
  for (const auto& [name, value] : truth.constants()) {
    INFO(name);
    CHECK(std::fabs(r.constants.at(name) - value) <= 1e-9 * std::fabs(value));
  }
}

}  // namespace

TEST_CASE("trapezoid constants are recovered from a 5x5 grid") {
  const auto samples = synthesize(trapezoid_model(2.0, 3.0), kProcs, {100, 200, 400, 800, 1600});
  REQUIRE(samples.size() == 25);
  const FitResult r = fit(trapezoid_template(), samples);
  CHECK(r.constants.at("a") == Approx(2.0).epsilon(1e-12));
  CHECK(r.constants.at("b") == Approx(3.0).epsilon(1e-12));
  CHECK(r.residual_norm < 1e-9);
}

TEST_CASE("FFT parallel constant from parallel rows alone") {
  std::vector<TimingSample> samples;
  for (std::int64_t p : {2, 4, 8}) {
    for (std::int64_t n : {256, 1024, 4096}) samples.push_back({p, n, 4.0 * std::log2(double(n))});
  }
  const FitResult r = fit(fft_template(), samples);
  CHECK(r.constants.size() == 1);
  CHECK(r.constants.at("A") == Approx(4.0).epsilon(1e-12));
  CHECK(r.residual_norm < 1e-9);
  CHECK_THROWS_AS(fft_template().instantiate(r.constants), ModelError);
}

TEST_CASE("property: noise-free fits are idempotent for every bundled template") {
  check_recovers(trapezoid_template(), trapezoid_model(2.0, 3.0), {100, 300, 1000, 3000});
  check_recovers(trapezoid_template(), trapezoid_model(1e-6, 5e-5), {100, 300, 1000, 3000});
  check_recovers(matvec_template(), matvec_model(1.0, 2.0), {10, 20, 50, 100});
  check_recovers(matvec_template(), matvec_model(3e-9, 4e-8), {10, 20, 50, 100});
  check_recovers(fft_template(), fft_model(1.0, 1.0), {64, 256, 1024, 4096});
  check_recovers(fft_template(), fft_model(4.0, 0.25), {64, 256, 1024, 4096});
}

TEST_CASE("underdetermined and rank-deficient fits") {
  const std::vector<TimingSample> one{{2, 100, 1.0}};
  CHECK_THROWS_AS(fit(trapezoid_template(), one), FitError);

  // a single n on one p makes n/p and log(p) proportional
  const std::vector<TimingSample> same_p{{4, 100, 1.0}, {4, 100, 1.1}, {4, 100, 0.9}};
  CHECK_THROWS_AS(fit(trapezoid_template(), same_p), FitError);

  // log(p) vanishes on every p = 1 row
  const std::vector<TimingSample> serial_only{{1, 100, 1.0}, {1, 200, 2.0}};
  CHECK_THROWS_AS(fit(trapezoid_template(), serial_only), FitError);

  // the serial FFT fit needs one row
  const std::vector<TimingSample> fft_rows{{2, 64, 6.0}, {4, 64, 6.0}, {1, 64, 384.0}};
  const FitResult r = fit(fft_template(), fft_rows);
  CHECK(r.constants.at("B") == Approx(1.0));
}

TEST_CASE("invalid samples") {
  const std::vector<TimingSample> bad{{2, 100, 1.0}, {0, 100, 1.0}, {2, 100, -1.0}};
  try {
    fit(trapezoid_template(), bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.rows() == std::vector<std::size_t>{2, 3});
  }
}

TEST_CASE("negative constants are flagged") {
  std::vector<TimingSample> samples;
  for (std::int64_t p : {2, 4, 8}) {
    for (std::int64_t n : {100, 1000}) {
      samples.push_back({p, n, double(n) / double(p) - 0.5 * std::log(double(p))});
    }
  }
  const FitResult r = fit(trapezoid_template(), samples);
  CHECK(r.constants.at("b") == Approx(-0.5));
  CHECK(r.negative_constants == std::vector<std::string>{"b"});
}

TEST_CASE("ill-conditioned design raises the condition warning") {
  std::vector<TimingSample> samples;
  for (std::int64_t n : {1000, 1001, 1002}) {
    samples.push_back({1000000, n, 1.0});
    samples.push_back({1000001, n, 1.0});
  }
  const ModelTemplate near_dup{"near", {parse("n"), parse("n + 1e-9*n^2")}, {"u", "v"}, {}, {}, {}};
  bool warned = false;
  try {
    warned = fit(near_dup, samples).condition_warning;
  } catch (const FitError&) {
    warned = true;
  }
  CHECK(warned);
}

TEST_CASE("property: fitted constants are a local optimum of the residual") {
  const auto noisy = with_noise(synthesize(trapezoid_model(2.0, 3.0), kProcs, {100, 200, 400, 800}), 0.01, 41);
  const auto tmpl = trapezoid_template();
  const FitResult r = fit(tmpl, noisy);
  const double base = residual_with(tmpl, r.constants, noisy);
  CHECK(base == Approx(r.residual_norm).epsilon(1e-9));
  for (const auto& [name, value] : r.constants) {
    for (double sign : {-1.0, 1.0}) {
      Constants moved = r.constants;
      moved[name] = value * (1.0 + sign * 1e-3);
      INFO(name << " " << sign);
      CHECK(residual_with(tmpl, moved, noisy) > base);
    }
  }
}

TEST_CASE("template validation") {
  ModelTemplate t = trapezoid_template();
  t.constant_names.pop_back();
  CHECK_THROWS_AS(t.validate(), ModelError);
  const ModelTemplate uses_const{"x", {parse("a*n")}, {"a"}, {}, {}, {}};
  CHECK_THROWS_AS(uses_const.validate(), ModelError);
  const ModelTemplate serial_p{"x", {parse("n/p")}, {"a"}, {parse("p")}, {"b"}, {}};
  CHECK_THROWS_AS(serial_p.validate(), ModelError);
  CHECK_THROWS_AS(bundled_template("nbody"), ModelError);
  for (const auto& name : bundled_template_names()) CHECK(bundled_template(name).name == name);
}

TEST_CASE("empirical exponent") {
  const std::vector<TimingSample> s{{1, 50, 100.0}, {4, 50, 10.0}, {8, 50, 60.0}};
  const auto pts = empirical_exponent(s);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].ratio == Approx(0.1));
  REQUIRE(pts[0].exponent.has_value());
  CHECK(*pts[0].exponent == Approx(-0.10557).epsilon(1e-4));
  CHECK(pts[1].ratio == Approx(0.6));
  CHECK_FALSE(pts[1].exponent.has_value());

  const std::vector<TimingSample> two_baselines{{1, 50, 90.0}, {1, 50, 110.0}, {4, 50, 10.0}};
  CHECK(empirical_exponent(two_baselines)[0].ratio == Approx(0.1));
}

TEST_CASE("empirical exponent names every n without a baseline") {
  const std::vector<TimingSample> s{{1, 50, 100.0}, {4, 60, 10.0}, {4, 70, 10.0}, {2, 60, 1.0}};
  try {
    empirical_exponent(s);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("60") != std::string::npos);
    CHECK(what.find("70") != std::string::npos);
  }
}

TEST_CASE("property: empirical exponent matches the model exponent on synthetic data") {
  const CostModel m = trapezoid_model();
  const auto samples = synthesize(m, {1, 2, 8, 32, 256}, {256, 1024, 4096, 65536});
  int compared = 0;
  for (const auto& pt : empirical_exponent(samples)) {
    const double p = static_cast<double>(pt.p);
    const double n = static_cast<double>(pt.n);
    CHECK(pt.ratio == Approx(time_ratio(m, p, n)).epsilon(1e-15));
    if (!pt.exponent) {
      CHECK_THROWS_AS(model_exponent(m, p, n), MinimalConditionViolated);
      continue;
    }
    CHECK(std::fabs(*pt.exponent - model_exponent(m, p, n).value()) <= 1e-12);
    if (pt.p == 32 && pt.n == 1024) ++compared;
  }
  CHECK(compared == 1);
}

TEST_CASE("fit then classify reproduces the bundled verdicts") {
  const auto fam = default_family();
  const auto trap = fit_then_classify(trapezoid_template(),
                                      synthesize(trapezoid_model(), kProcs, {100, 300, 1000, 3000}), fam);
  CHECK(trap.classification.verdict == Verdict::Strong);

  const auto mv = fit_then_classify(matvec_template(),
                                    synthesize(matvec_model(), kProcs, {10, 20, 50, 100}), fam);
  CHECK(mv.classification.verdict == Verdict::AmdahlLike);

  const auto fft = fit_then_classify(fft_template(),
                                     synthesize(fft_model(), kProcs, {64, 256, 1024, 4096}), fam);
  CHECK(fft.classification.verdict == Verdict::Weak);
  CHECK(fft.model.constraint() == GrowthConstraint::linear_in_p(100.0));
}

TEST_CASE("fit then classify with 1% multiplicative noise") {
  const auto fam = default_family();
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto noisy = with_noise(synthesize(trapezoid_model(), kProcs, {100, 300, 1000, 3000}), 0.01, seed);
    const auto r = fit_then_classify(trapezoid_template(), noisy, fam);
    INFO("seed " << seed);
    CHECK(r.classification.verdict == Verdict::Strong);
  }

  // the matvec exponent sits on the minimal-condition boundary, so noise
  // decides which side of 1/2 the fitted ratio limit b/(2a+b) lands on
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto noisy = with_noise(synthesize(matvec_model(), kProcs, {10, 20, 50, 100}), 0.01, seed);
    const auto r = fit_then_classify(matvec_template(), noisy, fam);
    const double a = r.fit.constants.at("a");
    const double b = r.fit.constants.at("b");
    const double ratio = b / (2.0 * a + b);
    INFO("seed " << seed << " ratio " << ratio);
    CHECK(std::fabs(ratio - 0.5) < 0.05);
    const Verdict expected = ratio <= 0.5 + 1e-6 ? Verdict::AmdahlLike : Verdict::Inconclusive;
    CHECK(r.classification.verdict == expected);
  }
}

TEST_CASE("measurement CSV") {
  const auto s = parse_measurements("\xEF\xBB\xBFp,n,time_seconds\r\n1,100,2.5\r\n\n4, 100 ,0.75\n");
  REQUIRE(s.size() == 2);
  CHECK(s[1].p == 4);
  CHECK(s[1].n == 100);
  CHECK(s[1].time == 0.75);

  std::ostringstream out;
  write_measurements(out, s);
  const auto back = parse_measurements(out.str());
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].p == s[i].p);
    CHECK(back[i].time == s[i].time);
  }

  CHECK_THROWS_AS(parse_measurements(""), DataError);
  CHECK_THROWS_AS(parse_measurements("p,n,time\n1,2,3\n"), DataError);
  try {
    parse_measurements("p,n,time_seconds\n1,100,2\n0,100,1\n2,100,-1\n2,x,1\n2,100\n2.5,100,1\n");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.rows() == std::vector<std::size_t>{3, 4, 5, 6, 7});
  }
}
