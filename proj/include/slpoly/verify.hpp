#pragma once

#include "slpoly/core.hpp"
#include "slpoly/forward.hpp"
#include "slpoly/inverse.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace slpoly {

// Weight number recomputed as the residue of the Weyl function at
// lambda_n, fully independent of the closed-form route. The contour must
// stay clear of other eigenvalues: the nearest other eigenvalue has to be
// at least twice the radius away or NearbyEigenvalue is raised.
Complex residue_alpha_oracle(const BoundaryProblem& problem,
                             const SpectralData& data, int index,
                             double radius = 0.0);

// Half the distance from entry `index` to the nearest distinct eigenvalue,
// capped at 1/2.
double suggested_radius(const SpectralData& data, int index);

struct Perturbation {
  std::vector<std::pair<int, Complex>> rho_shifts;
  std::vector<std::pair<int, Complex>> alpha_shifts;
};

SpectralData apply_perturbation(const SpectralData& data,
                                const Perturbation& perturbation,
                                double scale = 1.0);

struct RoundTripOptions {
  int prefix = 0;
  int threads = 0;
  bool closure = true;  // re-solve the forward problem on the reconstruction
  double channel_radius = 20.0;
};

struct RoundTripReport {
  double delta = 0.0;           // distance between target and model data
  double condition = 0.0;
  double sigma_error = 0.0;     // L2 against the model potential
  double r1_error = 0.0;        // sup over |lambda| <= channel_radius
  double r2_error = 0.0;
  double r1_residual = 0.0;
  double r2_residual = 0.0;
  // max over non-prefix n <= K of |lambda_n - lambda_n(target)| +
  // |alpha_n - alpha_n(target)| for the reconstructed problem.
  std::optional<double> closure_error;
  // max over prefix groups and moment orders of the contour-moment defect.
  std::optional<double> prefix_closure_error;
  int K = 0;
  int prefix = 0;
};

// Perturbs the model's own data, reconstructs, and reports channel errors
// against the model problem itself.
RoundTripReport roundtrip(const BoundaryProblem& model,
                          const Perturbation& perturbation, int K,
                          const RoundTripOptions& options = {});

struct SweepReport {
  std::vector<double> deltas;             // realized data distances
  std::vector<double> sigma_errors;
  std::vector<double> r1_errors;
  std::vector<double> r2_errors;
  // log-log regression per channel: error ~ constant * delta^slope. A
  // channel whose errors sit below 1e-13 throughout is degenerate and
  // slope-less.
  std::array<std::optional<double>, 3> slopes;
  std::array<std::optional<double>, 3> constants;
  int K = 0;
};

// Scales one perturbation direction through the given factors and fits
// error-vs-delta lines in log-log coordinates. Fewer than three usable
// scales, or non-monotone deltas, raise DegenerateSweep.
SweepReport stability_sweep(const BoundaryProblem& model,
                            const Perturbation& direction,
                            const std::vector<double>& scales, int K,
                            const RoundTripOptions& options = {});

// Deterministic pseudo-random test problem: smooth sigma with L2 norm at
// most 0.5 plus a boundary pair of the requested degree with simple
// spectrum (checked).
BoundaryProblem random_problem(std::uint64_t seed, int degree, Grid grid);

// sup |p(lambda) - q(lambda)| over the disk |lambda| <= radius, sampled on
// its boundary circle.
double sup_difference_on_disk(const std::vector<Complex>& p,
                              const std::vector<Complex>& q, double radius);

}  // namespace slpoly
