#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slpoly/io.hpp"
#include "slpoly/verify.hpp"

namespace {

using namespace slpoly;

// Exit-code contract: 0 ok, 2 validation, 3 forward-solver failure,
// 4 outside the solvable ball, 5 polynomial extraction failure.
int exit_code_for(Err code) {
  switch (code) {
    case Err::DeltaTooLarge:
    case Err::SingularSystem:
      return 4;
    case Err::ExtractionResidual:
      return 5;
    case Err::Overflow:
    case Err::MissedRoot:
    case Err::MultipleEigenvalue:
    case Err::VanishingR1:
    case Err::NearPole:
    case Err::NearbyEigenvalue:
      return 3;
    default:
      return 2;
  }
}

struct PerturbationFlags {
  std::vector<std::string> rho;
  std::vector<std::string> alpha;
};

// Each flag instance reads "index:re[,im]" with a 1-based index.
std::pair<int, Complex> parse_shift(const std::string& text) {
  size_t colon = text.find(':');
  if (colon == std::string::npos)
    fail(Err::BadValue, "shift must look like index:re[,im]");
  int index;
  double re, im = 0.0;
  try {
    index = std::stoi(text.substr(0, colon));
    std::string rest = text.substr(colon + 1);
    size_t comma = rest.find(',');
    re = std::stod(rest.substr(0, comma));
    if (comma != std::string::npos) im = std::stod(rest.substr(comma + 1));
  } catch (const std::exception&) {
    fail(Err::BadValue, "cannot parse shift: " + text);
  }
  if (index < 1) fail(Err::BadValue, "shift index must be at least 1");
  return {index - 1, Complex(re, im)};
}

Perturbation parse_perturbation(const PerturbationFlags& flags) {
  Perturbation out;
  for (const auto& text : flags.rho)
    out.rho_shifts.push_back(parse_shift(text));
  for (const auto& text : flags.alpha)
    out.alpha_shifts.push_back(parse_shift(text));
  return out;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fputs(content.c_str(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::BadValue, "cannot write " + path);
  out << content;
}

int run_forward(const std::string& problem_path, int n_max, int grid_m,
                const std::string& out_path, const std::string& deltas_path,
                bool allow_multiple) {
  BoundaryProblem problem = read_problem(problem_path, grid_m);
  EigenOptions options;
  options.allow_multiple = allow_multiple;
  SpectralData data = spectral_data(problem, n_max, options);
  emit(out_path,
       spectral_to_json(data, problem.degree(), "forward " + problem_path));
  if (!deltas_path.empty()) {
    double top = static_cast<double>(n_max) * n_max + 1.0;
    write_delta_csv(deltas_path, problem, -1.0, top, 64 * n_max);
  }
  return 0;
}

int run_inverse(const std::string& model_path, const std::string& data_path,
                int K, int grid_m, int skip_N, const std::string& out_path,
                const std::string& diagnostics_path) {
  BoundaryProblem model = read_problem(model_path, grid_m);
  SpectralData target = read_spectral(data_path);
  if (K <= 0) K = target.count();
  InverseOptions options;
  options.prefix = skip_N > 0 ? skip_N : target.prefix;
  ReconstructionResult result = inverse_solve(model, target, K, options);
  emit(out_path, problem_to_json(result.problem));
  if (!diagnostics_path.empty()) {
    std::ostringstream diag;
    diag.precision(17);
    diag << "{\n  \"delta\": " << result.dist.total
         << ",\n  \"condition\": " << result.condition
         << ",\n  \"r1_residual\": " << result.r1_residual
         << ",\n  \"r2_residual\": " << result.r2_residual
         << ",\n  \"K\": " << result.K
         << ",\n  \"N_prefix\": " << result.prefix << "\n}\n";
    emit(diagnostics_path, diag.str());
  }
  return 0;
}

int run_roundtrip(const std::string& model_path,
                  const PerturbationFlags& flags, int K, int grid_m,
                  int skip_N, double tol, const std::string& out_path) {
  BoundaryProblem model = read_problem(model_path, grid_m);
  RoundTripOptions options;
  options.prefix = skip_N;
  RoundTripReport report =
      roundtrip(model, parse_perturbation(flags), K, options);
  emit(out_path, roundtrip_report_to_json(report));

  bool ok = true;
  auto check = [&ok](const char* label, double value, double bound) {
    bool pass = value <= bound;
    std::printf("%s %s: %.3e (bound %.3e)\n", pass ? "PASS" : "FAIL", label,
                value, bound);
    ok = ok && pass;
  };
  check("closure", report.closure_error.value_or(0.0), tol);
  if (report.prefix_closure_error)
    check("prefix-closure", *report.prefix_closure_error, tol);
  check("r1-residual", report.r1_residual, 1e-6);
  check("r2-residual", report.r2_residual, 1e-6);
  return ok ? 0 : 1;
}

int run_sweep(const std::string& model_path, const PerturbationFlags& flags,
              std::vector<double> deltas, int K, int grid_m, int skip_N,
              const std::string& out_path) {
  BoundaryProblem model = read_problem(model_path, grid_m);
  for (size_t s = 1; s < deltas.size(); ++s)
    if (deltas[s] >= deltas[s - 1])
      fail(Err::BadValue, "deltas must be strictly decreasing");

  Perturbation direction = parse_perturbation(flags);
  double base = 0.0;
  {
    // Realized delta per unit scale, so the requested deltas land on target.
    std::vector<double> per_entry;
    auto bump = [&per_entry](int index, double amount) {
      if (index >= static_cast<int>(per_entry.size()))
        per_entry.resize(static_cast<size_t>(index) + 1, 0.0);
      per_entry[static_cast<size_t>(index)] += amount;
    };
    for (const auto& [index, shift] : direction.rho_shifts)
      bump(index, std::abs(shift));
    for (const auto& [index, shift] : direction.alpha_shifts)
      bump(index, std::abs(shift));
    for (double amount : per_entry) base = std::max(base, amount);
  }
  if (base == 0.0) fail(Err::BadValue, "sweep needs a nonzero perturbation");

  std::vector<double> scales;
  for (double d : deltas) scales.push_back(d / base);

  RoundTripOptions options;
  options.prefix = skip_N;
  SweepReport report = stability_sweep(model, direction, scales, K, options);
  emit(out_path, sweep_report_to_json(report));

  const char* names[3] = {"sigma", "r1", "r2"};
  bool ok = true;
  for (int c = 0; c < 3; ++c) {
    const auto& slope = report.slopes[static_cast<size_t>(c)];
    if (!slope) {
      std::printf("PASS %s-slope: channel at roundoff, no fit\n", names[c]);
      continue;
    }
    bool pass = *slope >= 0.8 && *slope <= 1.2;
    std::printf("%s %s-slope: %.4f (C=%.4e)\n", pass ? "PASS" : "FAIL",
                names[c], *slope,
                report.constants[static_cast<size_t>(c)].value_or(0.0));
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Forward and inverse solver for Sturm-Liouville problems with "
      "polynomial boundary conditions"};
  app.require_subcommand(1);

  std::string problem_path, data_path, out_path, deltas_path;
  std::string diagnostics_path;
  int n_max = 20, grid_m = 0, K = 0, skip_N = 0;
  double tol = 1e-5;
  bool allow_multiple = false;
  PerturbationFlags flags;
  std::vector<double> sweep_deltas{4e-3, 2e-3, 1e-3, 5e-4};

  CLI::App* forward = app.add_subcommand(
      "forward", "Compute spectral data {rho_n, alpha_n} of a problem file");
  forward->add_option("problem", problem_path, "problem JSON file")
      ->required();
  forward->add_option("--n-max", n_max, "number of spectral entries");
  forward->add_option("--grid-m", grid_m, "override the sigma grid");
  forward->add_option("--out", out_path, "spectral data output (default stdout)");
  forward->add_option(
      "--deltas", deltas_path,
      "also write characteristic-function samples as CSV with columns "
      "lambda_re,lambda_im,delta_re,delta_im");
  forward->add_flag("--allow-multiple", allow_multiple,
                    "accept multiple eigenvalues as groups");

  CLI::App* inverse = app.add_subcommand(
      "inverse", "Reconstruct a problem from spectral data near a model");
  inverse->add_option("model", problem_path, "model problem JSON file")
      ->required();
  inverse->add_option("data", data_path, "spectral data JSON file")
      ->required();
  inverse->add_option("--K", K, "truncation level (default: all entries)");
  inverse->add_option("--grid-m", grid_m, "override the sigma grid");
  inverse->add_option("--skip-N", skip_N,
                      "freeze the first N entries (prefix mode)");
  inverse->add_option("--out", out_path, "reconstructed problem output");
  inverse->add_option("--diagnostics", diagnostics_path,
                      "write delta/condition diagnostics JSON");

  CLI::App* round = app.add_subcommand(
      "roundtrip",
      "Perturb the model's own data, reconstruct, and verify closure");
  round->add_option("model", problem_path, "model problem JSON file")
      ->required();
  round->add_option("--rho-shift", flags.rho,
                    "shift rho_n: index:re[,im] (repeatable, 1-based)");
  round->add_option("--alpha-shift", flags.alpha,
                    "shift alpha_n: index:re[,im] (repeatable, 1-based)");
  round->add_option("--K", K, "truncation level")->required();
  round->add_option("--grid-m", grid_m, "override the sigma grid");
  round->add_option("--skip-N", skip_N, "prefix length held fixed");
  round->add_option("--tol", tol, "closure tolerance for PASS/FAIL");
  round->add_option("--out", out_path, "report JSON output");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Scale one perturbation direction and fit stability slopes");
  sweep->add_option("model", problem_path, "model problem JSON file")
      ->required();
  sweep->add_option("--rho-shift", flags.rho,
                    "direction in rho_n: index:re[,im] (repeatable)");
  sweep->add_option("--alpha-shift", flags.alpha,
                    "direction in alpha_n: index:re[,im] (repeatable)");
  sweep->add_option("--deltas", sweep_deltas,
                    "target data distances, strictly decreasing");
  sweep->add_option("--K", K, "truncation level")->required();
  sweep->add_option("--grid-m", grid_m, "override the sigma grid");
  sweep->add_option("--skip-N", skip_N, "prefix length held fixed");
  sweep->add_option("--out", out_path, "report JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (forward->parsed())
      return run_forward(problem_path, n_max, grid_m, out_path, deltas_path,
                         allow_multiple);
    if (inverse->parsed())
      return run_inverse(problem_path, data_path, K, grid_m, skip_N, out_path,
                         diagnostics_path);
    if (round->parsed())
      return run_roundtrip(problem_path, flags, K, grid_m, skip_N, tol,
                           out_path);
    if (sweep->parsed())
      return run_sweep(problem_path, flags, sweep_deltas, K, grid_m, skip_N,
                       out_path);
  } catch (const Error& error) {
    std::fprintf(stderr, "error [%s]: %s\n", err_name(error.code()),
                 error.what());
    return exit_code_for(error.code());
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  }
  return 2;
}
