#include "slpoly/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace slpoly {

namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& node, const char* what) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
      !node[1].is_number())
    fail(Err::BadValue,
         std::string(what) + " must be a [re, im] pair of numbers");
  return Complex(node[0].get<double>(), node[1].get<double>());
}

std::vector<Complex> complex_vector_from_json(const json& node,
                                              const char* what) {
  if (!node.is_array())
    fail(Err::BadValue, std::string(what) + " must be an array");
  std::vector<Complex> out;
  out.reserve(node.size());
  for (const auto& item : node) out.push_back(complex_from_json(item, what));
  return out;
}

json complex_vector_to_json(const std::vector<Complex>& values) {
  json out = json::array();
  for (Complex v : values) out.push_back(complex_to_json(v));
  return out;
}

int read_intervals(const json& sigma) {
  if (!sigma.contains("intervals") || !sigma["intervals"].is_number_integer())
    fail(Err::BadValue, "sigma needs an integer interval count");
  return sigma["intervals"].get<int>();
}

SampledFunction sigma_from_json(const json& sigma, int grid_override) {
  if (!sigma.is_object() || !sigma.contains("kind") ||
      !sigma["kind"].is_string())
    fail(Err::BadValue, "sigma must be an object with a kind");
  std::string kind = sigma["kind"].get<std::string>();

  if (kind == "samples") {
    if (!sigma.contains("values"))
      fail(Err::BadValue, "sampled sigma needs values");
    std::vector<Complex> values =
        complex_vector_from_json(sigma["values"], "sigma value");
    int declared = sigma.contains("intervals")
                       ? read_intervals(sigma)
                       : static_cast<int>(values.size()) - 1;
    if (static_cast<size_t>(declared) + 1 != values.size())
      fail(Err::BadValue, "sigma sample count does not match the grid");
    SampledFunction declared_sigma(Grid(declared), std::move(values));
    if (grid_override <= 0 || grid_override == declared) return declared_sigma;
    Grid grid(grid_override);
    std::vector<Complex> resampled(static_cast<size_t>(grid.point_count()));
    for (int j = 0; j < grid.point_count(); ++j)
      resampled[static_cast<size_t>(j)] =
          declared_sigma.interpolate(grid.point(j));
    return SampledFunction(grid, std::move(resampled));
  }

  if (kind != "expression")
    fail(Err::BadValue, "sigma kind must be samples or expression");
  if (!sigma.contains("name") || !sigma["name"].is_string())
    fail(Err::BadValue, "expression sigma needs a name");
  std::string name = sigma["name"].get<std::string>();
  int intervals = grid_override > 0 ? grid_override : read_intervals(sigma);
  Grid grid(intervals);
  json params =
      sigma.contains("params") ? sigma["params"] : json::object();

  if (name == "zero") return SampledFunction::zero(grid);

  if (name == "constant") {
    if (!params.contains("value"))
      fail(Err::BadValue, "constant sigma needs params.value");
    Complex value = complex_from_json(params["value"], "constant value");
    std::vector<Complex> values(static_cast<size_t>(grid.point_count()),
                                value);
    return SampledFunction(grid, std::move(values));
  }

  if (name == "cosine") {
    if (!params.contains("amplitude"))
      fail(Err::BadValue, "cosine sigma needs params.amplitude");
    Complex amplitude =
        complex_from_json(params["amplitude"], "cosine amplitude");
    double frequency = params.value("frequency", 1.0);
    double phase = params.value("phase", 0.0);
    std::vector<Complex> values(static_cast<size_t>(grid.point_count()));
    for (int j = 0; j < grid.point_count(); ++j)
      values[static_cast<size_t>(j)] =
          amplitude * std::cos(frequency * grid.point(j) + phase);
    return SampledFunction(grid, std::move(values));
  }

  if (name == "piecewise-linear") {
    if (!params.contains("values"))
      fail(Err::BadValue, "piecewise-linear sigma needs params.values");
    std::vector<Complex> knots =
        complex_vector_from_json(params["values"], "breakpoint value");
    if (knots.size() < 2)
      fail(Err::BadValue, "piecewise-linear sigma needs at least two values");
    for (Complex v : knots)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        fail(Err::BadValue, "piecewise-linear sigma values must be finite");
    // Breakpoints are evenly spaced over [0, pi]; resample linearly.
    double pi = std::acos(-1.0);
    std::vector<Complex> values(static_cast<size_t>(grid.point_count()));
    for (int j = 0; j < grid.point_count(); ++j) {
      double t = grid.point(j) / pi * (static_cast<double>(knots.size()) - 1);
      size_t cell = std::min(static_cast<size_t>(t), knots.size() - 2);
      double frac = t - static_cast<double>(cell);
      values[static_cast<size_t>(j)] =
          (1.0 - frac) * knots[cell] + frac * knots[cell + 1];
    }
    return SampledFunction(grid, std::move(values));
  }

  fail(Err::BadValue, "unknown sigma expression: " + name);
}

json parse_text(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded())
    fail(Err::BadValue, std::string(what) + " is not valid JSON");
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::BadValue, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::BadValue, "cannot write " + path);
  out << content;
  if (!out) fail(Err::BadValue, "write to " + path + " failed");
}

json optional_to_json(const std::optional<double>& value) {
  if (value) return *value;
  return nullptr;
}

}  // namespace

BoundaryProblem parse_problem(const std::string& text, int grid_override) {
  json doc = parse_text(text, "problem file");
  if (!doc.is_object() || !doc.contains("sigma") || !doc.contains("r1") ||
      !doc.contains("r2"))
    fail(Err::BadValue, "problem file needs sigma, r1, and r2");
  SampledFunction sigma = sigma_from_json(doc["sigma"], grid_override);
  std::vector<Complex> r1 = complex_vector_from_json(doc["r1"], "r1");
  std::vector<Complex> r2 = complex_vector_from_json(doc["r2"], "r2");
  return BoundaryProblem{std::move(sigma), make_polynomial_pair(r1, r2)};
}

BoundaryProblem read_problem(const std::string& path, int grid_override) {
  return parse_problem(read_file(path), grid_override);
}

std::string problem_to_json(const BoundaryProblem& problem) {
  json doc;
  doc["sigma"] = {
      {"kind", "samples"},
      {"intervals", problem.sigma.grid().intervals()},
      {"values", complex_vector_to_json(problem.sigma.values())}};
  doc["r1"] = complex_vector_to_json(problem.boundary.r1);
  doc["r2"] = complex_vector_to_json(problem.boundary.r2);
  return doc.dump(2) + "\n";
}

void write_problem(const std::string& path, const BoundaryProblem& problem) {
  write_file(path, problem_to_json(problem));
}

SpectralData parse_spectral(const std::string& text) {
  json doc = parse_text(text, "spectral data file");
  if (!doc.is_object() || !doc.contains("entries") ||
      !doc["entries"].is_array())
    fail(Err::BadValue, "spectral data file needs an entries array");

  SpectralData data;
  int expected = 1;
  for (const auto& entry : doc["entries"]) {
    if (!entry.is_object() || !entry.contains("n") || !entry.contains("rho") ||
        !entry.contains("alpha"))
      fail(Err::BadValue, "each entry needs n, rho, and alpha");
    if (!entry["n"].is_number_integer() || entry["n"].get<int>() != expected)
      fail(Err::BadValue, "entry indices must be contiguous from 1");
    ++expected;
    data.rho.push_back(complex_from_json(entry["rho"], "rho"));
    data.alpha.push_back(complex_from_json(entry["alpha"], "alpha"));
  }
  if (data.rho.empty()) fail(Err::BadValue, "spectral data file is empty");

  // Consecutive bitwise-equal rho values form one multiplicity group.
  size_t start = 0;
  while (start < data.rho.size()) {
    size_t stop = start + 1;
    while (stop < data.rho.size() && data.rho[stop] == data.rho[start]) ++stop;
    for (size_t j = start; j < stop; ++j)
      data.multiplicity.push_back(static_cast<int>(stop - start));
    start = stop;
  }

  if (doc.contains("meta") && doc["meta"].is_object()) {
    const json& meta = doc["meta"];
    if (meta.contains("N_prefix") && meta["N_prefix"].is_number_integer())
      data.prefix = meta["N_prefix"].get<int>();
  }
  validate_spectral_data(data);
  return data;
}

SpectralData read_spectral(const std::string& path) {
  return parse_spectral(read_file(path));
}

std::string spectral_to_json(const SpectralData& data, int degree,
                             const std::string& source) {
  json entries = json::array();
  for (int n = 0; n < data.count(); ++n) {
    entries.push_back(
        {{"n", n + 1},
         {"rho", complex_to_json(data.rho[static_cast<size_t>(n)])},
         {"alpha", complex_to_json(data.alpha[static_cast<size_t>(n)])}});
  }
  json doc;
  doc["entries"] = std::move(entries);
  doc["meta"] = {{"M1", degree}, {"N_prefix", data.prefix}, {"source", source}};
  return doc.dump(2) + "\n";
}

void write_spectral(const std::string& path, const SpectralData& data,
                    int degree, const std::string& source) {
  write_file(path, spectral_to_json(data, degree, source));
}

std::string roundtrip_report_to_json(const RoundTripReport& report) {
  json doc;
  doc["delta"] = report.delta;
  doc["condition"] = report.condition;
  doc["sigma_error"] = report.sigma_error;
  doc["r1_error"] = report.r1_error;
  doc["r2_error"] = report.r2_error;
  doc["r1_residual"] = report.r1_residual;
  doc["r2_residual"] = report.r2_residual;
  doc["closure_error"] = optional_to_json(report.closure_error);
  doc["prefix_closure_error"] = optional_to_json(report.prefix_closure_error);
  doc["K"] = report.K;
  doc["N_prefix"] = report.prefix;
  return doc.dump(2) + "\n";
}

std::string sweep_report_to_json(const SweepReport& report) {
  const char* names[3] = {"sigma", "r1", "r2"};
  const std::vector<double>* errors[3] = {
      &report.sigma_errors, &report.r1_errors, &report.r2_errors};
  json channels = json::object();
  for (int c = 0; c < 3; ++c) {
    channels[names[c]] = {
        {"errors", *errors[c]},
        {"slope", optional_to_json(report.slopes[static_cast<size_t>(c)])},
        {"constant",
         optional_to_json(report.constants[static_cast<size_t>(c)])}};
  }
  json doc;
  doc["deltas"] = report.deltas;
  doc["channels"] = std::move(channels);
  doc["K"] = report.K;
  return doc.dump(2) + "\n";
}

void write_delta_csv(const std::string& path, const BoundaryProblem& problem,
                     double lambda_min, double lambda_max, int samples) {
  if (samples < 2) fail(Err::BadValue, "need at least two samples");
  if (!(lambda_min < lambda_max))
    fail(Err::BadValue, "lambda range must be increasing");
  std::ostringstream out;
  out.precision(17);
  out << "lambda_re,lambda_im,delta_re,delta_im\n";
  for (int s = 0; s < samples; ++s) {
    double t = static_cast<double>(s) / (samples - 1);
    Complex lambda(lambda_min + t * (lambda_max - lambda_min), 0.0);
    Complex delta = characteristic(problem, lambda);
    out << lambda.real() << ',' << lambda.imag() << ',' << delta.real() << ','
        << delta.imag() << '\n';
  }
  write_file(path, out.str());
}

}  // namespace slpoly
