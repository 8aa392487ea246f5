#include "slpoly/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace slpoly {

namespace {

constexpr double kPi = std::numbers::pi;

int multiplicity_at(const SpectralData& data, int n) {
  return data.multiplicity.empty() ? 1
                                   : data.multiplicity[static_cast<size_t>(n)];
}

double l2_gap(const SampledFunction& a, const SampledFunction& b) {
  std::vector<Complex> diff(a.values());
  const auto& other = b.values();
  if (diff.size() != other.size())
    fail(Err::GridMismatch, "potentials live on different grids");
  for (size_t j = 0; j < diff.size(); ++j) diff[j] -= other[j];
  return l2_norm(SampledFunction(a.grid(), std::move(diff)));
}

}  // namespace

double suggested_radius(const SpectralData& data, int index) {
  if (index < 0 || index >= data.count())
    fail(Err::BadValue, "entry index out of range");
  Complex lambda = data.lambda(index);
  double gap = 1.0;
  for (int k = 0; k < data.count(); ++k) {
    double dist = std::abs(data.lambda(k) - lambda);
    if (dist > 1e-12 * std::max(1.0, std::abs(lambda)))
      gap = std::min(gap, dist);
  }
  return 0.5 * gap;
}

Complex residue_alpha_oracle(const BoundaryProblem& problem,
                             const SpectralData& data, int index,
                             double radius) {
  if (index < 0 || index >= data.count())
    fail(Err::BadValue, "entry index out of range");
  if (multiplicity_at(data, index) != 1)
    fail(Err::BadValue,
         "residue oracle applies to simple eigenvalues; use contour moments "
         "for groups");
  if (radius <= 0.0) radius = suggested_radius(data, index);
  Complex lambda = data.lambda(index);
  for (int k = 0; k < data.count(); ++k) {
    if (k == index) continue;
    double dist = std::abs(data.lambda(k) - lambda);
    if (dist <= 1e-12 * std::max(1.0, std::abs(lambda))) continue;
    if (dist < 2.0 * radius)
      fail(Err::NearbyEigenvalue,
           "eigenvalue " + std::to_string(k + 1) + " sits within twice the "
           "contour radius");
  }
  return contour_moment(problem, lambda, radius, 0);
}

SpectralData apply_perturbation(const SpectralData& data,
                                const Perturbation& perturbation,
                                double scale) {
  SpectralData out = data;
  for (const auto& [index, shift] : perturbation.rho_shifts) {
    if (index < 0 || index >= out.count())
      fail(Err::BadValue, "rho shift index out of range");
    out.rho[static_cast<size_t>(index)] += scale * shift;
  }
  for (const auto& [index, shift] : perturbation.alpha_shifts) {
    if (index < 0 || index >= out.count())
      fail(Err::BadValue, "alpha shift index out of range");
    out.alpha[static_cast<size_t>(index)] += scale * shift;
  }
  return out;
}

RoundTripReport roundtrip(const BoundaryProblem& model,
                          const Perturbation& perturbation, int K,
                          const RoundTripOptions& options) {
  EigenOptions eigen_options;
  eigen_options.allow_multiple = options.prefix > 0;
  SpectralData model_data = spectral_data(model, K, eigen_options);
  SpectralData target = apply_perturbation(model_data, perturbation);

  InverseOptions inverse_options;
  inverse_options.prefix = options.prefix;
  inverse_options.threads = options.threads;
  inverse_options.model_data = &model_data;
  ReconstructionResult rec = inverse_solve(model, target, K, inverse_options);

  RoundTripReport report;
  report.delta = rec.dist.total;
  report.condition = rec.condition;
  report.r1_residual = rec.r1_residual;
  report.r2_residual = rec.r2_residual;
  report.K = K;
  report.prefix = options.prefix;
  report.sigma_error = l2_gap(rec.problem.sigma, model.sigma);
  report.r1_error = sup_difference_on_disk(
      rec.problem.boundary.r1, model.boundary.r1, options.channel_radius);
  report.r2_error = sup_difference_on_disk(
      rec.problem.boundary.r2, model.boundary.r2, options.channel_radius);

  if (options.closure) {
    SpectralData recon_data = spectral_data(rec.problem, K, eigen_options);
    double worst = 0.0;
    for (int n = options.prefix; n < K; ++n) {
      double gap = std::abs(recon_data.lambda(n) - target.lambda(n)) +
                   std::abs(recon_data.alpha[static_cast<size_t>(n)] -
                            target.alpha[static_cast<size_t>(n)]);
      worst = std::max(worst, gap);
    }
    report.closure_error = worst;

    if (options.prefix > 0) {
      // The held prefix is verified through contour moments around each
      // group; individual residues of a numerically split multiple root are
      // meaningless while its moments stay accurate.
      double worst_prefix = 0.0;
      int n = 0;
      while (n < options.prefix) {
        int q = std::min(multiplicity_at(model_data, n), options.prefix - n);
        Complex center = model_data.lambda(n);
        double radius = suggested_radius(model_data, n);
        for (int j = 0; j < q; ++j) {
          Complex moment = contour_moment(rec.problem, center, radius, j);
          worst_prefix = std::max(
              worst_prefix,
              std::abs(moment - target.alpha[static_cast<size_t>(n + j)]));
        }
        n += q;
      }
      report.prefix_closure_error = worst_prefix;
    }
  }
  return report;
}

SweepReport stability_sweep(const BoundaryProblem& model,
                            const Perturbation& direction,
                            const std::vector<double>& scales, int K,
                            const RoundTripOptions& options) {
  if (scales.size() < 3)
    fail(Err::DegenerateSweep, "need at least three scales to fit a slope");
  for (double s : scales)
    if (!(s > 0.0)) fail(Err::DegenerateSweep, "scales must be positive");

  RoundTripOptions per_run = options;
  per_run.closure = false;

  SweepReport report;
  report.K = K;
  for (double s : scales) {
    Perturbation scaled;
    for (auto [index, shift] : direction.rho_shifts)
      scaled.rho_shifts.emplace_back(index, s * shift);
    for (auto [index, shift] : direction.alpha_shifts)
      scaled.alpha_shifts.emplace_back(index, s * shift);
    RoundTripReport run = roundtrip(model, scaled, K, per_run);
    report.deltas.push_back(run.delta);
    report.sigma_errors.push_back(run.sigma_error);
    report.r1_errors.push_back(run.r1_error);
    report.r2_errors.push_back(run.r2_error);
  }

  for (size_t s = 1; s < report.deltas.size(); ++s) {
    bool same_direction = (scales[s] > scales[s - 1]) ==
                          (report.deltas[s] > report.deltas[s - 1]);
    if (!same_direction || report.deltas[s] == report.deltas[s - 1])
      fail(Err::DegenerateSweep,
           "realized data distances are not monotone in the scale");
  }

  const std::vector<double>* channels[3] = {
      &report.sigma_errors, &report.r1_errors, &report.r2_errors};
  bool any_slope = false;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> xs, ys;
    for (size_t s = 0; s < report.deltas.size(); ++s) {
      double err = (*channels[c])[s];
      if (err > 1e-13) {
        xs.push_back(std::log(report.deltas[s]));
        ys.push_back(std::log(err));
      }
    }
    if (xs.size() < 3) continue;
    double mx = 0.0, my = 0.0;
    for (size_t s = 0; s < xs.size(); ++s) {
      mx += xs[s];
      my += ys[s];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double cov = 0.0, var = 0.0;
    for (size_t s = 0; s < xs.size(); ++s) {
      cov += (xs[s] - mx) * (ys[s] - my);
      var += (xs[s] - mx) * (xs[s] - mx);
    }
    if (var == 0.0) continue;
    double slope = cov / var;
    report.slopes[static_cast<size_t>(c)] = slope;
    report.constants[static_cast<size_t>(c)] = std::exp(my - slope * mx);
    any_slope = true;
  }
  if (!any_slope)
    fail(Err::DegenerateSweep, "every error channel is at roundoff level");
  return report;
}

BoundaryProblem random_problem(std::uint64_t seed, int degree, Grid grid) {
  if (degree < 0) fail(Err::BadValue, "degree must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int attempt = 0; attempt < 24; ++attempt) {
    double a[4], b[4], c[4], d[4];
    for (int k = 0; k < 4; ++k) {
      a[k] = u(rng);
      b[k] = u(rng);
      c[k] = u(rng);
      d[k] = u(rng);
    }
    std::vector<Complex> values(static_cast<size_t>(grid.point_count()));
    for (int j = 0; j < grid.point_count(); ++j) {
      double x = grid.point(j);
      Complex v = 0.0;
      for (int k = 0; k < 4; ++k) {
        double mode = k + 1.0;
        v += Complex(a[k] * std::cos(mode * x) + b[k] * std::sin(mode * x),
                     0.3 * (c[k] * std::cos(mode * x) +
                            d[k] * std::sin(mode * x)));
      }
      values[static_cast<size_t>(j)] = v;
    }
    double target_norm = 0.1 + 0.35 * std::abs(u(rng));
    double norm = l2_norm(SampledFunction(grid, values));
    if (norm == 0.0) continue;
    for (auto& v : values) v *= target_norm / norm;

    // Monic r1 from random roots, r2 from random coefficients.
    std::vector<Complex> r1{Complex(1.0)};
    for (int k = 0; k < degree; ++k) {
      Complex root(1.4 * u(rng), 1.4 * u(rng));
      std::vector<Complex> next(r1.size() + 1, Complex(0.0));
      for (size_t i = 0; i < r1.size(); ++i) {
        next[i] -= root * r1[i];
        next[i + 1] += r1[i];
      }
      r1 = std::move(next);
    }
    std::vector<Complex> r2(static_cast<size_t>(degree + 1));
    for (auto& coeff : r2) coeff = Complex(0.5 * u(rng), 0.5 * u(rng));

    try {
      BoundaryProblem problem{SampledFunction(grid, values),
                              make_polynomial_pair(r1, r2)};
      find_eigenvalues(problem, 8);
      return problem;
    } catch (const Error&) {
      continue;
    }
  }
  fail(Err::BadValue, "no well-posed random problem found for this seed");
}

double sup_difference_on_disk(const std::vector<Complex>& p,
                              const std::vector<Complex>& q, double radius) {
  // The difference is a polynomial, so its maximum modulus over the disk is
  // attained on the boundary circle.
  double sup = 0.0;
  for (int k = 0; k < 64; ++k) {
    double angle = 2.0 * kPi * k / 64;
    Complex z = radius * Complex(std::cos(angle), std::sin(angle));
    sup = std::max(sup, std::abs(poly_eval(p, z) - poly_eval(q, z)));
  }
  return sup;
}

}  // namespace slpoly
