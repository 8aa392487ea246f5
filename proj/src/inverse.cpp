#include "slpoly/inverse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace slpoly {

namespace {

bool exactly_equal(Complex a, Complex b) {
  return a.real() == b.real() && a.imag() == b.imag();
}

int multiplicity_at(const SpectralData& data, int n) {
  return data.multiplicity.empty() ? 1
                                   : data.multiplicity[static_cast<size_t>(n)];
}

}  // namespace

DistanceSequences distances(const SpectralData& target,
                            const SpectralData& model, int prefix) {
  validate_spectral_data(target);
  validate_spectral_data(model);
  if (target.count() != model.count())
    fail(Err::CountMismatch, "target has " + std::to_string(target.count()) +
                                 " entries, model has " +
                                 std::to_string(model.count()));
  int count = target.count();
  if (prefix < 0 || prefix > count)
    fail(Err::BadValue, "prefix out of range");
  for (int n = 0; n < prefix; ++n) {
    if (!exactly_equal(target.rho[static_cast<size_t>(n)],
                       model.rho[static_cast<size_t>(n)]) ||
        !exactly_equal(target.alpha[static_cast<size_t>(n)],
                       model.alpha[static_cast<size_t>(n)]))
      fail(Err::PrefixMismatch,
           "entry " + std::to_string(n + 1) +
               " differs from the model inside the declared prefix");
  }
  for (int n = prefix; n < count; ++n) {
    if (multiplicity_at(target, n) != 1 || multiplicity_at(model, n) != 1)
      fail(Err::BadValue,
           "multiple eigenvalue outside the declared prefix at entry " +
               std::to_string(n + 1));
  }

  DistanceSequences out;
  out.prefix = prefix;
  out.delta.assign(static_cast<size_t>(count), 0.0);
  out.chi.assign(static_cast<size_t>(count), 0.0);
  for (int n = prefix; n < count; ++n) {
    double d = std::abs(target.rho[static_cast<size_t>(n)] -
                        model.rho[static_cast<size_t>(n)]) +
               std::abs(target.alpha[static_cast<size_t>(n)] -
                        model.alpha[static_cast<size_t>(n)]);
    out.delta[static_cast<size_t>(n)] = d;
    out.chi[static_cast<size_t>(n)] = d > 0.0 ? 1.0 / d : 0.0;
    out.total = std::max(out.total, d);
  }
  return out;
}

ModelTables::ModelTables(const BoundaryProblem& model,
                         const SpectralData& target,
                         const SpectralData& model_data, int prefix)
    : model_(std::make_shared<BoundaryProblem>(model)),
      K_(target.count()),
      prefix_(prefix) {
  if (model_data.count() != K_)
    fail(Err::CountMismatch, "model data entry count mismatch");
  if (prefix_ < 0 || prefix_ > K_) fail(Err::BadValue, "prefix out of range");

  int active_count = active();
  lambda_.resize(static_cast<size_t>(active_count));
  rho_.resize(static_cast<size_t>(active_count));
  alpha_.resize(static_cast<size_t>(active_count));
  phi_.resize(static_cast<size_t>(active_count));
  quasi_at_pi_.resize(static_cast<size_t>(active_count));
  for (int f = 0; f < active_count; ++f) {
    int n = prefix_ + f / 2;
    const SpectralData& source = (f % 2 == 0) ? target : model_data;
    rho_[static_cast<size_t>(f)] = source.rho[static_cast<size_t>(n)];
    lambda_[static_cast<size_t>(f)] = source.lambda(n);
    alpha_[static_cast<size_t>(f)] = source.alpha[static_cast<size_t>(n)];
    SolutionTable table = phi_table(model, lambda_[static_cast<size_t>(f)]);
    phi_[static_cast<size_t>(f)] = std::move(table.y);
    quasi_at_pi_[static_cast<size_t>(f)] = table.yq.back();
  }

  // Running trapezoid integrals for every unordered pair of solutions.
  const Grid& grid = model.sigma.grid();
  int points = grid.point_count();
  double h = grid.spacing();
  overlaps_.resize(static_cast<size_t>(active_count) * (active_count + 1) / 2);
  size_t pair = 0;
  for (int a = 0; a < active_count; ++a) {
    for (int b = a; b < active_count; ++b, ++pair) {
      auto& running = overlaps_[pair];
      running.resize(static_cast<size_t>(points));
      const auto& fa = phi_[static_cast<size_t>(a)];
      const auto& fb = phi_[static_cast<size_t>(b)];
      Complex acc = 0.0;
      running[0] = 0.0;
      for (int j = 1; j < points; ++j) {
        acc += 0.5 * h *
               (fa[static_cast<size_t>(j - 1)] * fb[static_cast<size_t>(j - 1)] +
                fa[static_cast<size_t>(j)] * fb[static_cast<size_t>(j)]);
        running[static_cast<size_t>(j)] = acc;
      }
    }
  }
}

const Grid& ModelTables::grid() const { return model_->sigma.grid(); }

Complex ModelTables::phi_at_pi(int flat) const {
  return phi_[static_cast<size_t>(flat)].back();
}

Complex ModelTables::phi_quasi_at_pi(int flat) const {
  return quasi_at_pi_[static_cast<size_t>(flat)];
}

Complex ModelTables::overlap(int j, int a, int b) const {
  if (a > b) std::swap(a, b);
  size_t pair = static_cast<size_t>(a) * (2 * active() - a + 1) / 2 +
                static_cast<size_t>(b - a);
  return overlaps_[pair][static_cast<size_t>(j)];
}

MainEquation build_main_equation(const ModelTables& tables,
                                 const DistanceSequences& dist, int x_index) {
  int a_count = tables.active();
  MainEquation out;
  out.matrix.assign(static_cast<size_t>(a_count) * a_count, Complex(0.0));
  out.rhs.assign(static_cast<size_t>(a_count), Complex(0.0));
  auto at = [&](int row, int col) -> Complex& {
    return out.matrix[static_cast<size_t>(row) * a_count + col];
  };

  for (int n = tables.prefix(); n < tables.total(); ++n) {
    int r = 2 * (n - tables.prefix());
    double chi_n = dist.chi[static_cast<size_t>(n)];
    double delta_n = dist.delta[static_cast<size_t>(n)];
    for (int k = tables.prefix(); k < tables.total(); ++k) {
      int c = 2 * (k - tables.prefix());
      double delta_k = dist.delta[static_cast<size_t>(k)];
      Complex p00 = tables.alpha_at(c) * tables.overlap(x_index, r, c);
      Complex p10 = tables.alpha_at(c) * tables.overlap(x_index, r + 1, c);
      Complex p01 = tables.alpha_at(c + 1) * tables.overlap(x_index, r, c + 1);
      Complex p11 =
          tables.alpha_at(c + 1) * tables.overlap(x_index, r + 1, c + 1);
      at(r, c) = chi_n * delta_k * (p00 - p10);
      at(r, c + 1) = chi_n * ((p00 - p10) - (p01 - p11));
      at(r + 1, c) = delta_k * p10;
      at(r + 1, c + 1) = p10 - p11;
    }
    at(r, r) += 1.0;
    at(r + 1, r + 1) += 1.0;
    Complex target_phi = tables.phi(r)[static_cast<size_t>(x_index)];
    Complex model_phi = tables.phi(r + 1)[static_cast<size_t>(x_index)];
    out.rhs[static_cast<size_t>(r)] = chi_n * (target_phi - model_phi);
    out.rhs[static_cast<size_t>(r + 1)] = model_phi;
    if (delta_n == 0.0) {
      // Unperturbed entry: pin its accelerated component to zero exactly.
      for (int c = 0; c < a_count; ++c) at(r, c) = 0.0;
      at(r, r) = 1.0;
      out.rhs[static_cast<size_t>(r)] = 0.0;
    }
  }
  return out;
}

namespace {

struct SolveChunkResult {
  double condition = 0.0;
  std::exception_ptr error;
};

void solve_range(const ModelTables& tables, const DistanceSequences& dist,
                 int j_begin, int j_end, MainEquationSolution& out,
                 SolveChunkResult& result) {
  int a_count = tables.active();
  try {
    Eigen::MatrixXcd mat(a_count, a_count);
    Eigen::VectorXcd rhs(a_count);
    for (int j = j_begin; j < j_end; ++j) {
      MainEquation system = build_main_equation(tables, dist, j);
      for (int r = 0; r < a_count; ++r) {
        rhs(r) = system.rhs[static_cast<size_t>(r)];
        for (int c = 0; c < a_count; ++c)
          mat(r, c) = system.matrix[static_cast<size_t>(r) * a_count + c];
      }
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(mat);
      double rcond = lu.rcond();
      if (!(rcond > 1e-12))
        fail(Err::SingularSystem,
             "reduced system is numerically singular at grid index " +
                 std::to_string(j) + " (reciprocal condition " +
                 std::to_string(rcond) + ")");
      result.condition = std::max(result.condition, 1.0 / rcond);
      Eigen::VectorXcd sol = lu.solve(rhs);
      for (int n = tables.prefix(); n < tables.total(); ++n) {
        int r = 2 * (n - tables.prefix());
        Complex accel = sol(r);
        Complex plain = sol(r + 1);
        double delta_n = dist.delta[static_cast<size_t>(n)];
        out.phi[static_cast<size_t>(r)][static_cast<size_t>(j)] =
            delta_n * accel + plain;
        out.phi[static_cast<size_t>(r + 1)][static_cast<size_t>(j)] = plain;
      }
    }
  } catch (...) {
    result.error = std::current_exception();
  }
}

}  // namespace

MainEquationSolution solve_main_equation(const ModelTables& tables,
                                         const DistanceSequences& dist,
                                         int threads) {
  int points = tables.grid().point_count();
  MainEquationSolution out;
  out.phi.assign(static_cast<size_t>(tables.active()),
                 std::vector<Complex>(static_cast<size_t>(points)));

  int worker_count = threads > 0
                         ? threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  worker_count = std::clamp(worker_count, 1, 16);
  worker_count = std::min(worker_count, std::max(1, points / 32));

  std::vector<SolveChunkResult> results(static_cast<size_t>(worker_count));
  if (worker_count == 1) {
    solve_range(tables, dist, 0, points, out, results[0]);
  } else {
    std::vector<std::thread> pool;
    int chunk = (points + worker_count - 1) / worker_count;
    for (int w = 0; w < worker_count; ++w) {
      int begin = w * chunk;
      int end = std::min(points, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(solve_range, std::cref(tables), std::cref(dist), begin,
                        end, std::ref(out), std::ref(results[static_cast<size_t>(w)]));
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    out.condition = std::max(out.condition, r.condition);
  }
  return out;
}

SampledFunction reconstruct_sigma(const ModelTables& tables,
                                  const MainEquationSolution& solution) {
  const Grid& grid = tables.grid();
  std::vector<Complex> values(tables.model().sigma.values());
  for (int f = 0; f < tables.active(); ++f) {
    double sign = (f % 2 == 0) ? 1.0 : -1.0;
    Complex alpha = tables.alpha_at(f);
    const auto& model_phi = tables.phi(f);
    const auto& solved_phi = solution.phi[static_cast<size_t>(f)];
    for (int j = 0; j < grid.point_count(); ++j)
      values[static_cast<size_t>(j)] -=
          2.0 * sign * alpha *
          (model_phi[static_cast<size_t>(j)] * solved_phi[static_cast<size_t>(j)] -
           0.5);
  }
  return SampledFunction(grid, std::move(values));
}

Complex eigen_ratio_product(const ModelTables& tables, Complex lambda) {
  Complex out = 1.0;
  for (int n = tables.prefix(); n < tables.total(); ++n) {
    int f = 2 * (n - tables.prefix());
    Complex target_lambda = tables.lambda_at(f);
    Complex model_lambda = tables.lambda_at(f + 1);
    if (std::abs(lambda - model_lambda) < 1e-6 ||
        std::abs(lambda - target_lambda) < 1e-6)
      fail(Err::NearPole, "eigenvalue ratio product evaluated too close to "
                          "one of its poles");
    out *= (lambda - target_lambda) / (lambda - model_lambda);
  }
  return out;
}

ExtractedPoly extract_polynomial(const std::vector<Complex>& points,
                                 const std::vector<Complex>& values,
                                 int degree_cap, bool monic) {
  if (degree_cap < 0) fail(Err::BadValue, "degree cap must be non-negative");
  if (points.size() != values.size())
    fail(Err::BadValue, "one value per sample point required");
  int rows = static_cast<int>(points.size());
  if (rows < degree_cap + 3)
    fail(Err::BadValue, "need at least degree_cap + 3 sample points");
  for (int a = 0; a < rows; ++a)
    for (int b = a + 1; b < rows; ++b)
      if (exactly_equal(points[static_cast<size_t>(a)], points[static_cast<size_t>(b)]))
        fail(Err::BadValue, "sample points must be distinct");

  int columns = monic ? degree_cap : degree_cap + 1;
  Eigen::MatrixXcd vand(rows, columns);
  Eigen::VectorXcd rhs(rows);
  for (int r = 0; r < rows; ++r) {
    Complex z = points[static_cast<size_t>(r)];
    Complex power = 1.0;
    for (int c = 0; c < columns; ++c) {
      vand(r, c) = power;
      power *= z;
    }
    Complex top = 1.0;
    if (monic)
      for (int p = 0; p < degree_cap; ++p) top *= z;
    rhs(r) = values[static_cast<size_t>(r)] - (monic ? top : Complex(0.0));
  }

  ExtractedPoly out;
  out.coeffs.assign(static_cast<size_t>(degree_cap + 1), Complex(0.0));
  if (columns > 0) {
    Eigen::VectorXcd fit = vand.colPivHouseholderQr().solve(rhs);
    for (int c = 0; c < columns; ++c)
      out.coeffs[static_cast<size_t>(c)] = fit(c);
  }
  if (monic) out.coeffs.back() = 1.0;

  double scale = 0.0;
  for (Complex v : values) scale = std::max(scale, std::abs(v));
  for (int r = 0; r < rows; ++r) {
    double gap = std::abs(poly_eval(out.coeffs, points[static_cast<size_t>(r)]) -
                          values[static_cast<size_t>(r)]);
    out.residual = std::max(out.residual, gap);
  }
  if (out.residual > 1e-6 * (1.0 + scale))
    fail(Err::ExtractionResidual,
         "polynomial fit residual " + std::to_string(out.residual) +
             " exceeds tolerance");
  return out;
}

namespace {

// Boundary polynomial samples on the imaginary axis reconstructed from the
// solved system; the quasi-derivatives at pi are re-anchored to the
// recovered potential.
struct BoundarySamples {
  std::vector<Complex> points;
  std::vector<Complex> r1_values;
  std::vector<Complex> r2_values;
};

BoundarySamples boundary_samples(const ModelTables& tables,
                                 const MainEquationSolution& solution,
                                 const SampledFunction& sigma_rec) {
  const BoundaryProblem& model = tables.model();
  int degree = model.degree();
  int sample_count = degree + 5;
  int a_count = tables.active();

  std::vector<Complex> solved_quasi_at_pi(static_cast<size_t>(a_count));
  for (int f = 0; f < a_count; ++f) {
    SolutionTable table =
        solve_ivp(sigma_rec, tables.lambda_at(f), Anchor::Left, 1.0, 0.0);
    solved_quasi_at_pi[static_cast<size_t>(f)] = table.yq.back();
  }

  BoundarySamples out;
  for (int s = 0; s < sample_count; ++s) {
    Complex lambda(0.0, 1.0 + s);
    Complex r1v = poly_eval(model.boundary.r1, lambda);
    Complex r2v = poly_eval(model.boundary.r2, lambda);
    Complex sum_s = 0.0, sum_u1 = 0.0, sum_u2 = 0.0;
    for (int f = 0; f < a_count; ++f) {
      double sign = (f % 2 == 0) ? 1.0 : -1.0;
      Complex alpha = tables.alpha_at(f);
      Complex phi_pi = solution.phi[static_cast<size_t>(f)].back();
      Complex core = alpha *
                     (r1v * tables.phi_quasi_at_pi(f) +
                      r2v * tables.phi_at_pi(f)) /
                     (lambda - tables.lambda_at(f));
      sum_s += sign * phi_pi * core;
      sum_u2 += sign * solved_quasi_at_pi[static_cast<size_t>(f)] * core;
      sum_u1 += sign * alpha * (tables.phi_at_pi(f) * phi_pi - 1.0);
    }
    Complex ratio = eigen_ratio_product(tables, lambda);
    out.points.push_back(lambda);
    out.r1_values.push_back(ratio * (r1v - sum_s));
    out.r2_values.push_back(ratio * (r2v + (-r1v * sum_u1 + sum_u2)));
  }
  return out;
}

SpectralData truncated(const SpectralData& data, int count) {
  SpectralData out;
  out.rho.assign(data.rho.begin(), data.rho.begin() + count);
  out.alpha.assign(data.alpha.begin(), data.alpha.begin() + count);
  if (!data.multiplicity.empty())
    out.multiplicity.assign(data.multiplicity.begin(),
                            data.multiplicity.begin() + count);
  out.prefix = std::min(data.prefix, count);
  return out;
}

}  // namespace

ReconstructionResult inverse_solve(const BoundaryProblem& model,
                                   const SpectralData& target, int K,
                                   const InverseOptions& options) {
  if (K < 1) fail(Err::BadValue, "K must be at least 1");
  validate_spectral_data(target);
  if (target.count() < K)
    fail(Err::CountMismatch, "target data holds " +
                                 std::to_string(target.count()) +
                                 " entries, K = " + std::to_string(K));
  int prefix = options.prefix;
  if (prefix < 0 || prefix >= K)
    fail(Err::BadValue, "prefix must lie inside [0, K)");

  SpectralData target_k = truncated(target, K);
  SpectralData model_k;
  if (options.model_data) {
    if (options.model_data->count() < K)
      fail(Err::CountMismatch, "supplied model data is shorter than K");
    model_k = truncated(*options.model_data, K);
  } else {
    EigenOptions eigen_options;
    eigen_options.allow_multiple = prefix > 0;
    model_k = spectral_data(model, K, eigen_options);
  }

  DistanceSequences dist = distances(target_k, model_k, prefix);
  ModelTables tables(model, target_k, model_k, prefix);

  MainEquationSolution solution;
  try {
    solution = solve_main_equation(tables, dist, options.threads);
  } catch (const Error& e) {
    if (e.code() == Err::SingularSystem)
      fail(Err::DeltaTooLarge,
           "data distance " + std::to_string(dist.total) +
               " lies outside the solvable ball: " + e.what());
    throw;
  }

  SampledFunction sigma_rec = reconstruct_sigma(tables, solution);
  BoundarySamples samples = boundary_samples(tables, solution, sigma_rec);
  int degree = model.degree();
  ExtractedPoly r1_fit =
      extract_polynomial(samples.points, samples.r1_values, degree, true);
  ExtractedPoly r2_fit =
      extract_polynomial(samples.points, samples.r2_values, degree, false);

  ReconstructionResult result{
      BoundaryProblem{std::move(sigma_rec),
                      make_polynomial_pair(r1_fit.coeffs, r2_fit.coeffs)},
      std::move(dist),
      solution.condition,
      r1_fit.residual,
      r2_fit.residual,
      K,
      prefix};
  return result;
}

}  // namespace slpoly
