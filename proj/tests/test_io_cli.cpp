#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "slpoly/io.hpp"

using namespace slpoly;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() /
                 ("slpoly-io-test-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  std::string command = std::string(SLPOLY_CLI_PATH) + " " + args + " > " +
                        stdout_file.string() + " 2> " +
                        (stdout_file.string() + ".err");
  int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string zero_model_text(int intervals) {
  std::ostringstream out;
  out << "{\n  \"sigma\": {\"kind\": \"expression\", \"name\": \"zero\", "
         "\"intervals\": "
      << intervals
      << "},\n  \"r1\": [[1.0, 0.0]],\n  \"r2\": [[0.0, 0.0]]\n}\n";
  return out.str();
}

}  // namespace

TEST_CASE("problem files survive a write-then-read cycle bit for bit") {
  Grid grid(32);
  std::vector<Complex> values(static_cast<size_t>(grid.point_count()));
  for (int j = 0; j < grid.point_count(); ++j)
    values[static_cast<size_t>(j)] =
        Complex(0.1 * std::sin(grid.point(j)), 0.03 * grid.point(j));
  BoundaryProblem problem{
      SampledFunction(grid, values),
      make_polynomial_pair({Complex(2.0, -1.0), Complex(1.0)},
                           {Complex(0.5), Complex(0.25, 0.125)})};

  fs::path path = scratch_dir() / "problem-cycle.json";
  write_problem(path.string(), problem);
  BoundaryProblem back = read_problem(path.string());
  REQUIRE(back.sigma.values().size() == values.size());
  for (size_t j = 0; j < values.size(); ++j)
    CHECK(back.sigma.values()[j] == values[j]);
  REQUIRE(back.boundary.r1.size() == problem.boundary.r1.size());
  for (size_t j = 0; j < problem.boundary.r1.size(); ++j)
    CHECK(back.boundary.r1[j] == problem.boundary.r1[j]);
  for (size_t j = 0; j < problem.boundary.r2.size(); ++j)
    CHECK(back.boundary.r2[j] == problem.boundary.r2[j]);
}

TEST_CASE("expression-backed sigma evaluates each named shape") {
  BoundaryProblem zero = parse_problem(zero_model_text(64));
  CHECK(zero.sigma.grid().intervals() == 64);
  for (Complex v : zero.sigma.values()) CHECK(v == Complex(0.0));

  std::string constant_text = R"({
    "sigma": {"kind": "expression", "name": "constant", "intervals": 32,
              "params": {"value": [0.7, -0.2]}},
    "r1": [[1.0, 0.0]], "r2": [[0.0, 0.0]]
  })";
  BoundaryProblem constant = parse_problem(constant_text);
  for (Complex v : constant.sigma.values()) CHECK(v == Complex(0.7, -0.2));

  std::string cosine_text = R"({
    "sigma": {"kind": "expression", "name": "cosine", "intervals": 64,
              "params": {"amplitude": [0.1, 0.0], "frequency": 2.0}},
    "r1": [[1.0, 0.0]], "r2": [[0.0, 0.0]]
  })";
  BoundaryProblem cosine = parse_problem(cosine_text);
  Grid grid(64);
  for (int j = 0; j < grid.point_count(); ++j) {
    Complex expected = 0.1 * std::cos(2.0 * grid.point(j));
    CHECK(std::abs(cosine.sigma.values()[static_cast<size_t>(j)] - expected) <
          1e-15);
  }

  std::string pw_text = R"({
    "sigma": {"kind": "expression", "name": "piecewise-linear",
              "intervals": 32,
              "params": {"values": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]}},
    "r1": [[1.0, 0.0]], "r2": [[0.0, 0.0]]
  })";
  BoundaryProblem pw = parse_problem(pw_text);
  // Tent over [0, pi] peaking at pi/2: at x = pi/4 the height is 1/2.
  CHECK(std::abs(pw.sigma.interpolate(kPi / 2) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(pw.sigma.interpolate(kPi / 4) - Complex(0.5)) < 1e-15);
}

TEST_CASE("a grid override resamples sigma onto the requested grid") {
  BoundaryProblem fine = parse_problem(zero_model_text(64), 256);
  CHECK(fine.sigma.grid().intervals() == 256);

  // Integer refinement of explicit samples is exact for the tent function.
  Grid coarse(16);
  std::vector<Complex> tent(static_cast<size_t>(coarse.point_count()));
  for (int j = 0; j < coarse.point_count(); ++j)
    tent[static_cast<size_t>(j)] =
        Complex(std::min(coarse.point(j), kPi - coarse.point(j)));
  BoundaryProblem problem{SampledFunction(coarse, tent),
                          make_polynomial_pair({Complex(1.0)}, {Complex(0.0)})};
  fs::path path = scratch_dir() / "tent.json";
  write_problem(path.string(), problem);
  BoundaryProblem refined = read_problem(path.string(), 64);
  CHECK(refined.sigma.grid().intervals() == 64);
  Grid dense(64);
  for (int j = 0; j < dense.point_count(); ++j) {
    Complex expected(std::min(dense.point(j), kPi - dense.point(j)));
    CHECK(std::abs(refined.sigma.values()[static_cast<size_t>(j)] - expected) <
          1e-14);
  }
}

TEST_CASE("malformed or incomplete problem files are rejected") {
  CHECK_THROWS_AS(parse_problem("{ not json"), Error);
  CHECK_THROWS_AS(parse_problem("[1, 2, 3]"), Error);
  CHECK_THROWS_AS(parse_problem(R"({"sigma": 5, "r1": [], "r2": []})"), Error);
  CHECK_THROWS_AS(
      parse_problem(R"({"sigma": {"kind": "expression", "name": "cubic",
                        "intervals": 32}, "r1": [[1,0]], "r2": [[0,0]]})"),
      Error);
  CHECK_THROWS_AS(
      parse_problem(R"({"sigma": {"kind": "samples", "intervals": 32,
                        "values": [[0,0]]}, "r1": [[1,0]], "r2": [[0,0]]})"),
      Error);
  // Non-monic r1 fails problem validation after parsing succeeds.
  CHECK_THROWS_AS(
      parse_problem(R"({"sigma": {"kind": "expression", "name": "zero",
                        "intervals": 32}, "r1": [[2,0]], "r2": [[0,0]]})"),
      Error);
}

TEST_CASE("spectral data files keep prefix and multiplicity groups intact") {
  SpectralData data;
  data.rho = {Complex(0.0), Complex(0.0), Complex(1.0), Complex(2.0)};
  data.alpha = {Complex(1.0 / kPi), Complex(0.0), Complex(2.0 / kPi),
                Complex(2.0 / kPi, 1e-17)};
  data.multiplicity = {2, 2, 1, 1};
  data.prefix = 2;

  fs::path path = scratch_dir() / "spectral-cycle.json";
  write_spectral(path.string(), data, 1, "unit test");
  SpectralData back = read_spectral(path.string());
  REQUIRE(back.count() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(back.rho[static_cast<size_t>(n)] ==
          data.rho[static_cast<size_t>(n)]);
    CHECK(back.alpha[static_cast<size_t>(n)] ==
          data.alpha[static_cast<size_t>(n)]);
    CHECK(back.multiplicity[static_cast<size_t>(n)] ==
          data.multiplicity[static_cast<size_t>(n)]);
  }
  CHECK(back.prefix == 2);

  nlohmann::json doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["meta"]["M1"] == 1);
  CHECK(doc["meta"]["source"] == "unit test");
}

TEST_CASE("spectral entries must be numbered contiguously from one") {
  std::string text = R"({"entries": [
    {"n": 1, "rho": [0.0, 0.0], "alpha": [0.3, 0.0]},
    {"n": 3, "rho": [1.0, 0.0], "alpha": [0.6, 0.0]}
  ]})";
  CHECK_THROWS_AS(parse_spectral(text), Error);
  CHECK_THROWS_AS(parse_spectral(R"({"entries": []})"), Error);
  CHECK_THROWS_AS(parse_spectral("nonsense"), Error);
}

TEST_CASE("characteristic samples land in the CSV with the documented columns") {
  BoundaryProblem problem = parse_problem(zero_model_text(64));
  fs::path path = scratch_dir() / "delta.csv";
  write_delta_csv(path.string(), problem, 0.2, 5.2, 11);

  std::istringstream in(slurp(path));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "lambda_re,lambda_im,delta_re,delta_im");
  int rows = 0;
  double first_re = 0.0, first_delta = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    double lre = std::stod(cell);
    std::getline(fields, cell, ',');
    std::getline(fields, cell, ',');
    double dre = std::stod(cell);
    if (rows == 0) {
      first_re = lre;
      first_delta = dre;
    }
    ++rows;
  }
  CHECK(rows == 11);
  CHECK(first_re == doctest::Approx(0.2).epsilon(1e-12));
  Complex expected = characteristic(problem, Complex(0.2, 0.0));
  CHECK(first_delta == doctest::Approx(expected.real()).epsilon(1e-12));
}

TEST_CASE("report serializers write numbers and spell missing slopes as null") {
  RoundTripReport report;
  report.delta = 1e-3;
  report.closure_error = 2e-8;
  nlohmann::json doc = nlohmann::json::parse(roundtrip_report_to_json(report));
  CHECK(doc["delta"] == 1e-3);
  CHECK(doc["closure_error"] == 2e-8);
  CHECK(doc["prefix_closure_error"].is_null());

  SweepReport sweep;
  sweep.deltas = {4e-3, 2e-3, 1e-3};
  sweep.sigma_errors = {4e-2, 2e-2, 1e-2};
  sweep.r1_errors = {0.0, 0.0, 0.0};
  sweep.r2_errors = {0.0, 0.0, 0.0};
  sweep.slopes[0] = 1.01;
  sweep.constants[0] = 9.7;
  nlohmann::json sdoc = nlohmann::json::parse(sweep_report_to_json(sweep));
  CHECK(sdoc["channels"]["sigma"]["slope"] == 1.01);
  CHECK(sdoc["channels"]["r1"]["slope"].is_null());
  CHECK(sdoc["deltas"].size() == 3);
}

TEST_CASE("the forward command emits the Neumann spectrum with exit zero") {
  fs::path model = scratch_dir() / "cli-zero.json";
  spit(model, zero_model_text(256));
  fs::path out = scratch_dir() / "cli-forward.json";
  int code = run_cli("forward " + model.string() + " --n-max 6 --out " +
                         out.string(),
                     scratch_dir() / "fw.log");
  CHECK(code == 0);
  SpectralData data = read_spectral(out.string());
  REQUIRE(data.count() == 6);
  CHECK(std::abs(data.alpha[0] - Complex(1.0 / kPi)) < 1e-9);
  CHECK(std::abs(data.alpha[1] - Complex(2.0 / kPi)) < 1e-9);
  CHECK(std::abs(data.rho[2] - Complex(2.0)) < 1e-9);
}

TEST_CASE("the forward command validates its input before doing any work") {
  fs::path bad = scratch_dir() / "cli-bad.json";
  spit(bad, "{ this is not json");
  CHECK(run_cli("forward " + bad.string(), scratch_dir() / "bad.log") == 2);

  fs::path model = scratch_dir() / "cli-zero2.json";
  spit(model, zero_model_text(64));
  CHECK(run_cli("forward " + model.string() + " --n-max 0",
                scratch_dir() / "nmax.log") == 2);
}

TEST_CASE("the inverse command reproduces the model from its own data") {
  fs::path model = scratch_dir() / "cli-inv-model.json";
  spit(model, zero_model_text(256));
  fs::path data = scratch_dir() / "cli-inv-data.json";
  REQUIRE(run_cli("forward " + model.string() + " --n-max 8 --out " +
                      data.string(),
                  scratch_dir() / "inv-fw.log") == 0);
  fs::path recon = scratch_dir() / "cli-inv-out.json";
  int code = run_cli("inverse " + model.string() + " " + data.string() +
                         " --K 8 --out " + recon.string(),
                     scratch_dir() / "inv.log");
  CHECK(code == 0);
  BoundaryProblem back = read_problem(recon.string());
  for (Complex v : back.sigma.values()) CHECK(std::abs(v) <= 1e-9);
  CHECK(back.boundary.r1.size() == 1);
  CHECK(std::abs(back.boundary.r1[0] - Complex(1.0)) <= 1e-9);
  CHECK(std::abs(back.boundary.r2[0]) <= 1e-9);
}

TEST_CASE("a perturbation outside the solvable ball exits with code four") {
  fs::path model = scratch_dir() / "cli-ball-model.json";
  spit(model, zero_model_text(512));
  fs::path data = scratch_dir() / "cli-ball-data.json";
  REQUIRE(run_cli("forward " + model.string() + " --n-max 12 --out " +
                      data.string(),
                  scratch_dir() / "ball-fw.log") == 0);

  nlohmann::json doc = nlohmann::json::parse(slurp(data));
  double re = doc["entries"][0]["rho"][0].get<double>();
  doc["entries"][0]["rho"][0] = re + 10.0;
  spit(data, doc.dump(2));

  int code = run_cli("inverse " + model.string() + " " + data.string() +
                         " --K 12",
                     scratch_dir() / "ball.log");
  CHECK(code == 4);
}

TEST_CASE("the roundtrip command prints PASS lines for a tame perturbation") {
  fs::path model = scratch_dir() / "cli-rt-model.json";
  spit(model, zero_model_text(256));
  fs::path log = scratch_dir() / "rt.log";
  int code = run_cli("roundtrip " + model.string() +
                         " --rho-shift 1:5e-3 --K 8 --tol 1e-5",
                     log);
  CHECK(code == 0);
  std::string output = slurp(log);
  CHECK(output.find("PASS closure") != std::string::npos);
  CHECK(output.find("FAIL") == std::string::npos);
}

TEST_CASE("sweep rejects deltas that fail to decrease") {
  fs::path model = scratch_dir() / "cli-sw-model.json";
  spit(model, zero_model_text(64));
  int code = run_cli("sweep " + model.string() +
                         " --alpha-shift 1:1 --deltas 1e-3 2e-3 4e-3 --K 4",
                     scratch_dir() / "sw.log");
  CHECK(code == 2);
  // Two scales are too few to fit anything.
  code = run_cli("sweep " + model.string() +
                     " --alpha-shift 1:1 --deltas 4e-3 2e-3 --K 4",
                 scratch_dir() / "sw2.log");
  CHECK(code == 2);
}
