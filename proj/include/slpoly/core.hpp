#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace slpoly {

using Complex = std::complex<double>;

enum class Err {
  BadValue,
  NonMonic,
  DegreeMismatch,
  CommonRoot,
  GridMismatch,
  Overflow,
  MissedRoot,
  MultipleEigenvalue,
  VanishingR1,
  NearPole,
  CountMismatch,
  PrefixMismatch,
  SingularSystem,
  DeltaTooLarge,
  ExtractionResidual,
  NearbyEigenvalue,
  DegenerateSweep,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message);
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& message);

// Uniform grid 0 = x_0 < x_1 < ... < x_m = pi.
class Grid {
 public:
  explicit Grid(int intervals);
  int intervals() const { return m_; }
  int point_count() const { return m_ + 1; }
  double spacing() const;
  double point(int j) const;
  friend bool operator==(const Grid& a, const Grid& b) { return a.m_ == b.m_; }

 private:
  int m_;
};

// Function on [0, pi] represented by its values at the grid points and
// extended between them by linear interpolation.
class SampledFunction {
 public:
  SampledFunction(Grid grid, std::vector<Complex> values);
  static SampledFunction zero(Grid grid);
  const Grid& grid() const { return grid_; }
  const std::vector<Complex>& values() const { return values_; }
  Complex value(int j) const { return values_[static_cast<size_t>(j)]; }
  Complex interpolate(double x) const;

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

// Coefficients are stored lowest degree first; r1 is monic of degree M1 and
// r2 has degree at most M1 (padded with zeros to the same length).
struct PolynomialPair {
  std::vector<Complex> r1;
  std::vector<Complex> r2;
  int degree() const { return static_cast<int>(r1.size()) - 1; }
};

// Validates monicity of r1 (leading coefficient within 1e-12 of 1, then
// snapped to exactly 1), deg r2 <= deg r1, and approximate coprimality: no
// root of r1 may lie within 1e-8 of a root of r2.
PolynomialPair make_polynomial_pair(std::vector<Complex> r1,
                                    std::vector<Complex> r2);

Complex poly_eval(const std::vector<Complex>& coeffs, Complex z);
std::vector<Complex> poly_derivative(const std::vector<Complex>& coeffs);
// Roots of the polynomial via the companion matrix of the trimmed
// coefficient vector; constants (and the zero polynomial) have none.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs);

struct BoundaryProblem {
  SampledFunction sigma;
  PolynomialPair boundary;
  int degree() const { return boundary.degree(); }
};

// Spectral data as (rho_n, alpha_n) with lambda_n = rho_n^2 and rho_n the
// principal square root. A group of equal eigenvalues of multiplicity q is
// stored as q consecutive entries sharing rho and carrying the generalized
// weights in order; `prefix` marks how many leading entries are declared to
// coincide with the model when an inverse solve is asked to skip them.
struct SpectralData {
  std::vector<Complex> rho;
  std::vector<Complex> alpha;
  std::vector<int> multiplicity;
  int prefix = 0;

  int count() const { return static_cast<int>(rho.size()); }
  Complex lambda(int n) const { return rho[static_cast<size_t>(n)] * rho[static_cast<size_t>(n)]; }
};

void validate_spectral_data(const SpectralData& data);

// Principal branch: Re >= 0, and Im >= 0 on the cut Re == 0.
Complex principal_sqrt(Complex lambda);

// Trapezoid rule for f*g over [x_0, x_j]; end_index = m integrates over the
// whole interval. Both factors must live on the same grid.
Complex integrate_product(const SampledFunction& f, const SampledFunction& g,
                          int end_index);

double l2_norm(const SampledFunction& f);

// rho_n - (n - degree - 1) for the tail entries n > degree + 1, the quantity
// that must stay square-summable for data of the admissible class (1-based n).
std::vector<Complex> asymptotic_residuals(const SpectralData& data, int degree);

}  // namespace slpoly
