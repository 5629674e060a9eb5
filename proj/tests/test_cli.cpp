#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "speeduplab/cli.hpp"
#include "speeduplab/curve_csv.hpp"
#include "speeduplab/error.hpp"
#include "speeduplab/fitting.hpp"

using namespace speeduplab;
using doctest::Approx;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

cli::CurveSeries curve_of(const Outcome& o) {
  std::istringstream in(o.out);
  return cli::read_curve(in);
}

constexpr std::uint64_t kNoisyMatvecSeed = 1;

std::string models_dir() { return SPEEDUPLAB_MODELS_DIR; }

// Temporary file removed on scope exit.
class TempFile {
 public:
  TempFile(const std::string& stem, const std::string& contents) {
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(std::random_device{}()) + ".tmp");
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

std::string measurements_csv(const CostModel& m, double sigma, std::uint64_t seed) {
  auto rng = oracles::rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<TimingSample> samples;
  for (std::int64_t p : {1, 2, 4, 8, 16}) {
    for (std::int64_t n : {10, 20, 50, 100}) {
      const double t = m.parallel_time(double(p), double(n));
      samples.push_back({p, n, t * (1.0 + (sigma > 0.0 ? noise(rng) : 0.0))});
    }
  }
  std::ostringstream out;
  write_measurements(out, samples);
  return out.str();
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST_CASE("help and usage") {
  CHECK(run_cli({"--help"}).code == cli::kSuccess);
  CHECK(run_cli({"--help"}).out.find("classify") != std::string::npos);
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"bogus"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "--frobnicate"}).code == cli::kUsage);
}

TEST_CASE("Amdahl fraction curve approaches its limit") {
  const auto o = run_cli({"speedup", "--fraction", "0.8", "--p-min", "2", "--p-max", "1e6", "--points", "40"});
  REQUIRE(o.code == cli::kSuccess);
  CHECK(o.out.rfind("p,speedup\n", 0) == 0);
  const auto c = curve_of(o);
  REQUIRE(c.points.size() == 40);
  CHECK(c.points.front().x == 2.0);
  CHECK(c.points.back().x == 1e6);
  CHECK(std::fabs(c.points.back().y - 5.0) < 1e-2);
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].y > c.points[i - 1].y);
}

TEST_CASE("speedup argument errors") {
  CHECK(run_cli({"speedup", "trapezoid"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "trapezoid", "--g", "p", "--n", "5"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "--fraction", "1.5"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "--fraction", "0.5", "--g", "p"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "trapezoid", "--g", "p^"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "trapezoid", "--g", "p", "--p-min", "1"}).code == cli::kUsage);
  CHECK(run_cli({"speedup", "trapezoid", "--g", "p", "--points", "1"}).code == cli::kUsage);
  const auto missing = run_cli({"speedup", "/no/such/model.json", "--g", "p"});
  CHECK(missing.code == cli::kModelError);
  CHECK_FALSE(missing.err.empty());
  CHECK(missing.out.empty());
}

TEST_CASE("model files and bundled names resolve alike") {
  const auto by_name = run_cli({"speedup", "matvec", "--g", "p"});
  const auto by_file = run_cli({"speedup", models_dir() + "/matvec.json", "--g", "p"});
  REQUIRE(by_name.code == cli::kSuccess);
  CHECK(by_name.out == by_file.out);

  const TempFile broken("model", R"json({"name":"x","t_par":"n/p","extra":true})json");
  CHECK(run_cli({"speedup", broken.path(), "--g", "p"}).code == cli::kModelError);
  const TempFile neg("model", R"json({"name":"x","t_par":"n/p - 100"})json");
  CHECK(run_cli({"speedup", neg.path(), "--g", "p"}).code == cli::kModelError);
}

TEST_CASE("trapezoid curves: faster growth dominates") {
  auto series = [](const std::string& g) {
    const auto o = run_cli({"speedup", "trapezoid", "--g", g, "--p-min", "8", "--p-max", "4096", "--points", "40"});
    REQUIRE(o.code == cli::kSuccess);
    return curve_of(o);
  };
  const auto sq = series("p^2");
  const auto plogp = series("p*log(p)");
  const auto lin = series("p");
  for (std::size_t i = 0; i < sq.points.size(); ++i) {
    INFO("p=" << sq.points[i].x);
    CHECK(sq.points[i].y > plogp.points[i].y);
    CHECK(plogp.points[i].y > lin.points[i].y);
  }
}

TEST_CASE("matvec curves barely depend on the growth") {
  std::vector<cli::CurveSeries> all;
  for (const std::string g : {"p^2", "p*log(p)", "p"}) {
    const auto o = run_cli({"speedup", "matvec", "--g", g, "--p-min", "100", "--p-max", "1e6", "--points", "30"});
    REQUIRE(o.code == cli::kSuccess);
    all.push_back(curve_of(o));
  }
  for (std::size_t i = 0; i < all[0].points.size(); ++i) {
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = a + 1; b < 3; ++b) {
        const double ya = all[a].points[i].y;
        const double yb = all[b].points[i].y;
        CHECK(std::fabs(ya - yb) / std::min(ya, yb) < 0.05);
      }
    }
  }
}

TEST_CASE("fixed dimension curve") {
  const auto o = run_cli({"speedup", "trapezoid", "--n", "1000", "--p-min", "2", "--p-max", "1e5"});
  REQUIRE(o.code == cli::kSuccess);
  const auto c = curve_of(o);
  CHECK(c.points.back().y < c.points[c.points.size() / 2].y);
}

TEST_CASE("classify reports") {
  const auto trap = run_cli({"classify", "trapezoid"});
  REQUIRE(trap.code == cli::kSuccess);
  const json t = json::parse(trap.out);
  CHECK(t["verdict"] == "strong");
  CHECK(t["model"] == "trapezoid");
  CHECK(t["zero_tolerance"] == 1e-3);
  CHECK(t["evidence"].size() == 5);
  CHECK(t["evidence"][2]["growth"] == "p^2");
  CHECK(t["evidence"][2]["exponent_limit"]["converged"] == true);
  bool sq_witness = false;
  for (const auto& w : t["witnesses"]) sq_witness = sq_witness || w == "p^2";
  CHECK(sq_witness);

  CHECK(json::parse(run_cli({"classify", "fft"}).out)["verdict"] == "weak");
  CHECK(json::parse(run_cli({"classify", "matvec"}).out)["verdict"] == "amdahl_like");
  const auto weak = run_cli({"classify", "trapezoid", "--family", "p"});
  CHECK(json::parse(weak.out)["verdict"] == "weak");

  const TempFile heavy("model", R"json({"name":"heavy","t_par":"a*(2*n^2 - n)/p + b*(n^2 + n)",
                                    "constants":{"a":1,"b":3}})json");
  const auto inc = run_cli({"classify", heavy.path()});
  CHECK(inc.code == cli::kSuccess);
  CHECK(json::parse(inc.out)["verdict"] == "inconclusive");

  CHECK(run_cli({"classify", "trapezoid", "--family", "p,,p^2"}).code == cli::kUsage);
  CHECK(run_cli({"classify", "trapezoid", "--family", "n"}).code == cli::kUsage);
  CHECK(run_cli({"classify", "trapezoid", "--tol", "0"}).code == cli::kUsage);
  CHECK(run_cli({"classify", "nbody"}).code == cli::kModelError);
}

TEST_CASE("schedule environment variable") {
  {
    ScopedEnv env("SPEEDUPLAB_SCHEDULE_MAX_EXP", "20");
    const auto o = run_cli({"classify", "trapezoid"});
    REQUIRE(o.code == cli::kSuccess);
    const json j = json::parse(o.out);
    CHECK(j["schedule"]["p_max"] == std::ldexp(1.0, 20));
    CHECK(j["schedule"]["points"] == 17);
  }
  {
    ScopedEnv env("SPEEDUPLAB_SCHEDULE_MAX_EXP", "lots");
    CHECK(run_cli({"classify", "trapezoid"}).code == cli::kUsage);
  }
  {
    ScopedEnv env("SPEEDUPLAB_SCHEDULE_MAX_EXP", "5");
    CHECK(run_cli({"classify", "trapezoid"}).code == cli::kUsage);
  }
  const json j = json::parse(run_cli({"classify", "trapezoid"}).out);
  CHECK(j["schedule"]["p_max"] == std::ldexp(1.0, 40));
}

TEST_CASE("superlinear command") {
  const auto o = run_cli({"superlinear", "--p", "10"});
  REQUIRE(o.code == cli::kSuccess);
  const json j = json::parse(o.out);
  CHECK(j["threshold_approx"].get<double>() == Approx(-0.105));
  CHECK(j["threshold_exact"].get<double>() == Approx(std::log(0.9)));

  const json fft = json::parse(run_cli({"superlinear", "--C", "1", "--n", "100"}).out);
  CHECK(fft["p_bound"].get<double>() == Approx(100.4975).epsilon(1e-6));
  CHECK(fft["oracle_max_p"] == 100);

  CHECK(run_cli({"superlinear", "--p", "1"}).code == cli::kUsage);
  CHECK(run_cli({"superlinear"}).code == cli::kUsage);
  CHECK(run_cli({"superlinear", "--C", "1"}).code == cli::kUsage);
  CHECK(run_cli({"superlinear", "--p", "3", "--C", "1", "--n", "4"}).code == cli::kUsage);
  CHECK(run_cli({"superlinear", "--C", "0", "--n", "4"}).code == cli::kUsage);
}

TEST_CASE("fig4 command") {
  const auto o = run_cli({"fig4", "--p-min", "2", "--p-max", "10", "--points", "2"});
  REQUIRE(o.code == cli::kSuccess);
  const auto two = curve_of(o);
  REQUIRE(two.points.size() == 2);
  CHECK(two.points[0].x == 2.0);
  CHECK(two.points[0].y == -0.625);
  CHECK(two.points[1].x == 10.0);
  CHECK(two.points[1].y == Approx(-0.105).epsilon(1e-15));
  const auto c = curve_of(run_cli({"fig4"}));
  CHECK(c.points.size() == 50);
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].y > c.points[i - 1].y);
  CHECK(c.points.back().y < 0.0);
  CHECK(run_cli({"fig4", "--p-min", "1.5"}).code == cli::kUsage);
  CHECK(run_cli({"fig4", "--p-min", "20", "--p-max", "10"}).code == cli::kUsage);
}

TEST_CASE("fit command") {
  std::ostringstream csv;
  std::vector<TimingSample> samples;
  for (std::int64_t p : {1, 2, 4, 8, 16}) {
    for (std::int64_t n : {100, 200, 400, 800, 1600}) {
      samples.push_back({p, n, oracles::trapezoid_time(2.0, 3.0, double(p), double(n))});
    }
  }
  write_measurements(csv, samples);
  const TempFile data("timings", csv.str());

  const auto o = run_cli({"fit", "trapezoid", data.path()});
  REQUIRE(o.code == cli::kSuccess);
  const json j = json::parse(o.out);
  CHECK(j["samples"] == 25);
  CHECK(j["constants"]["a"].get<double>() == Approx(2.0).epsilon(1e-12));
  CHECK(j["constants"]["b"].get<double>() == Approx(3.0).epsilon(1e-12));
  CHECK(j["residual_norm"].get<double>() < 1e-9);
  CHECK_FALSE(j.contains("classification"));

  const json cls = json::parse(run_cli({"fit", "trapezoid", data.path(), "--classify"}).out);
  CHECK(cls["classification"]["verdict"] == "strong");

  CHECK(run_cli({"fit", "nbody", data.path()}).code == cli::kUsage);
  CHECK(run_cli({"fit", "trapezoid", "/no/such.csv"}).code == cli::kDataError);
}

TEST_CASE("fit command data errors") {
  const TempFile header("timings", "p,n,time\n1,2,3\n");
  const auto h = run_cli({"fit", "trapezoid", header.path()});
  CHECK(h.code == cli::kDataError);
  CHECK(h.err.find("p,n,time_seconds") != std::string::npos);

  const TempFile rows("timings", "p,n,time_seconds\n1,100,1\n-1,100,1\n2,100,0\n");
  const auto r = run_cli({"fit", "trapezoid", rows.path()});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("3 4") != std::string::npos);

  const TempFile rank("timings", "p,n,time_seconds\n4,100,1\n4,100,1.1\n4,100,0.9\n");
  CHECK(run_cli({"fit", "trapezoid", rank.path()}).code == cli::kDataError);
}

TEST_CASE("noisy matvec measurements classify as Amdahl-like") {
  const TempFile data("timings", measurements_csv(matvec_model(), 0.01, kNoisyMatvecSeed));
  const auto o = run_cli({"fit", "matvec", data.path(), "--classify"});
  REQUIRE(o.code == cli::kSuccess);
  const json j = json::parse(o.out);
  CHECK(j["classification"]["verdict"] == "amdahl_like");
}

TEST_CASE("determinism and CSV round trip") {
  const std::vector<std::vector<std::string>> invocations{
      {"speedup", "trapezoid", "--g", "p*log(p)"},
      {"speedup", "--fraction", "0.9", "--points", "7"},
      {"classify", "fft"},
      {"superlinear", "--C", "0.5", "--n", "1000"},
      {"fig4", "--points", "13"}};
  for (const auto& args : invocations) {
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    REQUIRE(first.code == cli::kSuccess);
    CHECK(first.out == second.out);
  }
  for (const auto& args : {invocations[0], invocations[1], invocations[4]}) {
    const auto o = run_cli(args);
    const auto c = curve_of(o);
    std::ostringstream again;
    cli::write_curve(again, c);
    CHECK(again.str() == o.out);
    CHECK(o.out.find('\r') == std::string::npos);
  }
}

TEST_CASE("curve reader rejects malformed input") {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return cli::read_curve(in);
  };
  CHECK_THROWS_AS(read(""), DataError);
  CHECK_THROWS_AS(read("x,y\n1,2\n"), DataError);
  CHECK_THROWS_AS(read("p,speedup\n1,2\n1,3\n"), DataError);
  CHECK_THROWS_AS(read("p,speedup\n1\n"), DataError);
  CHECK_THROWS_AS(read("p,speedup\n1,abc\n"), DataError);
  CHECK(read("p,speedup\n1,2\n2,3\n").points.size() == 2);
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(std::stod(cli::format_number(1e6)) == 1e6);
  CHECK(std::stod(cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
