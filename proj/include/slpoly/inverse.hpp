#pragma once

#include "slpoly/core.hpp"
#include "slpoly/forward.hpp"

#include <memory>

namespace slpoly {

// Interleaved index (n, i): i = 0 refers to the target data, i = 1 to the
// model data. Entries with n below the declared prefix never enter the
// reduced system; flat(n, i) = 2*(n - prefix) + i counts the active ones.
struct DistanceSequences {
  std::vector<double> delta;  // |rho_n - rho~_n| + |alpha_n - alpha~_n|
  std::vector<double> chi;    // 1/delta_n, or 0 where delta_n == 0
  double total = 0.0;         // max over active n
  int prefix = 0;
};

DistanceSequences distances(const SpectralData& target,
                            const SpectralData& model, int prefix = 0);

// Everything about the model problem the reduced system needs: solutions at
// the interleaved spectral points and running overlap integrals
//   P(x; a, b) = int_0^x phi~_a(t) phi~_b(t) dt
// for all active flat indices a, b.
class ModelTables {
 public:
  ModelTables(const BoundaryProblem& model, const SpectralData& target,
              const SpectralData& model_data, int prefix = 0);

  const Grid& grid() const;
  int total() const { return K_; }           // entries in the data, incl. prefix
  int prefix() const { return prefix_; }
  int active() const { return 2 * (K_ - prefix_); }

  Complex lambda_at(int flat) const { return lambda_[static_cast<size_t>(flat)]; }
  Complex rho_at(int flat) const { return rho_[static_cast<size_t>(flat)]; }
  Complex alpha_at(int flat) const { return alpha_[static_cast<size_t>(flat)]; }
  // Solution of the model problem at the flat spectral point, tabulated on
  // the grid.
  const std::vector<Complex>& phi(int flat) const {
    return phi_[static_cast<size_t>(flat)];
  }
  Complex phi_at_pi(int flat) const;
  Complex phi_quasi_at_pi(int flat) const;
  // Running integral P(x_j; a, b).
  Complex overlap(int j, int a, int b) const;

  const BoundaryProblem& model() const { return *model_; }

 private:
  std::shared_ptr<const BoundaryProblem> model_;
  int K_ = 0;
  int prefix_ = 0;
  std::vector<Complex> lambda_, rho_, alpha_;
  std::vector<Complex> quasi_at_pi_;
  std::vector<std::vector<Complex>> phi_;
  // Packed upper triangle of the symmetric pair index (a <= b), one running
  // integral per grid point.
  std::vector<std::vector<Complex>> overlaps_;
};

// Dense linear system (I + H(x)) psi(x) = psi~(x) at one grid point, in the
// accelerated variables; solutions convert back through
//   phi_{n,0} = delta_n * psi_{n,0} + psi_{n,1},  phi_{n,1} = psi_{n,1}.
struct MainEquation {
  std::vector<Complex> matrix;  // row-major active x active
  std::vector<Complex> rhs;
};

MainEquation build_main_equation(const ModelTables& tables,
                                 const DistanceSequences& dist, int x_index);

struct MainEquationSolution {
  // phi[flat][j]: reconstructed solutions at every grid point.
  std::vector<std::vector<Complex>> phi;
  double condition = 0.0;  // largest 1/rcond seen across grid points
};

// Solves the system at every grid point (optionally on several threads) and
// converts back to the phi variables. Reciprocal condition below 1e-12 at
// any grid point raises SingularSystem.
MainEquationSolution solve_main_equation(const ModelTables& tables,
                                         const DistanceSequences& dist,
                                         int threads = 0);

SampledFunction reconstruct_sigma(const ModelTables& tables,
                                  const MainEquationSolution& solution);

// prod over active n of (lambda - lambda_n0)/(lambda - lambda_n1); guards
// sample points against the poles.
Complex eigen_ratio_product(const ModelTables& tables, Complex lambda);

struct ExtractedPoly {
  std::vector<Complex> coeffs;
  double residual = 0.0;
};

// Least-squares fit of a polynomial of degree <= degree_cap through the
// samples; monic pins the leading coefficient to exactly 1. Residual above
// 1e-6 * (1 + max|value|) raises ExtractionResidual.
ExtractedPoly extract_polynomial(const std::vector<Complex>& points,
                                 const std::vector<Complex>& values,
                                 int degree_cap, bool monic);

struct ReconstructionResult {
  BoundaryProblem problem;
  DistanceSequences dist;
  double condition = 0.0;
  double r1_residual = 0.0;
  double r2_residual = 0.0;
  int K = 0;
  int prefix = 0;
};

struct InverseOptions {
  int prefix = 0;
  int threads = 0;
  // Model spectral data reused when already known; must hold at least K
  // entries computed from the same model problem.
  const SpectralData* model_data = nullptr;
};

// Recovers (sigma, r1, r2) from the first K entries of the target data by
// the reduced-system route anchored at the given model problem. A singular
// reduced system is reported as DeltaTooLarge carrying the measured distance.
ReconstructionResult inverse_solve(const BoundaryProblem& model,
                                   const SpectralData& target, int K,
                                   const InverseOptions& options = {});

}  // namespace slpoly
