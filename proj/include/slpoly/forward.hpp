#pragma once

#include "slpoly/core.hpp"

namespace slpoly {

// Values of one solution of -(y^[1])' - sigma*y^[1] - sigma^2*y = lambda*y
// along the grid, together with its quasi-derivative y^[1] = y' - sigma*y.
struct SolutionTable {
  Grid grid;
  Complex lambda;
  std::vector<Complex> y;
  std::vector<Complex> yq;
};

enum class Anchor { Left, Right };

// Fourth-order one-step propagation of the first-order system
//   y' = sigma*y + y^[1],  (y^[1])' = -sigma*y^[1] - (sigma^2 + lambda)*y
// from the anchored end across the whole grid. Magnitudes above 1e150 abort
// with Overflow.
SolutionTable solve_ivp(const SampledFunction& sigma, Complex lambda,
                        Anchor anchor, Complex y0, Complex yq0);

// phi: y(0) = 1, y^[1](0) = 0. psi: y(pi) = r1(lambda), y^[1](pi) = -r2(lambda).
SolutionTable phi_table(const BoundaryProblem& problem, Complex lambda);
SolutionTable psi_table(const BoundaryProblem& problem, Complex lambda);

// r1(lambda)*phi^[1](pi) + r2(lambda)*phi(pi); entire in lambda, zeros are
// the eigenvalues.
Complex characteristic(const BoundaryProblem& problem, Complex lambda);
// The same function computed as -psi^[1](0); agreement of the two routes is
// a consistency check on the propagation.
Complex characteristic_from_right(const BoundaryProblem& problem,
                                  Complex lambda);

// psi(0)/psi^[1](0). Guards |characteristic| >= 1e-6 * max(1, |lambda|^M1).
Complex weyl_function(const BoundaryProblem& problem, Complex lambda);

// (1/2 pi i) * contour integral of (lambda - center)^moment * M(lambda) over
// the circle of the given radius; moment 0 is the residue when a single
// simple pole lies inside.
Complex contour_moment(const BoundaryProblem& problem, Complex center,
                       double radius, int moment, int nodes = 64);

struct EigenOptions {
  // Accept multiple eigenvalues (stored as groups with generalized weights)
  // instead of failing the simplicity check.
  bool allow_multiple = false;
  // Re-count all roots in one enclosing box and fail with MissedRoot on a
  // count mismatch.
  bool verify_count = true;
};

// First n_max eigenvalues ordered by (Re rho, Im rho); weights left empty.
SpectralData find_eigenvalues(const BoundaryProblem& problem, int n_max,
                              const EigenOptions& options = {});

// Fills data.alpha. Simple entries use the closed form
//   1/alpha_n = int_0^pi phi_n^2 dx
//             - (phi_n(pi)/r1(lambda_n)) * (r1'*phi_n^[1](pi) + r2'*phi_n(pi)),
// groups of multiplicity q use the first q contour moments of the Weyl
// function around the group.
void weight_numbers(const BoundaryProblem& problem, SpectralData& data);

SpectralData spectral_data(const BoundaryProblem& problem, int n_max,
                           const EigenOptions& options = {});

}  // namespace slpoly
