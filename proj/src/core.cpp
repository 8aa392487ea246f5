#include "slpoly/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace slpoly {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace

const char* err_name(Err code) {
  switch (code) {
    case Err::BadValue: return "BadValue";
    case Err::NonMonic: return "NonMonic";
    case Err::DegreeMismatch: return "DegreeMismatch";
    case Err::CommonRoot: return "CommonRoot";
    case Err::GridMismatch: return "GridMismatch";
    case Err::Overflow: return "Overflow";
    case Err::MissedRoot: return "MissedRoot";
    case Err::MultipleEigenvalue: return "MultipleEigenvalue";
    case Err::VanishingR1: return "VanishingR1";
    case Err::NearPole: return "NearPole";
    case Err::CountMismatch: return "CountMismatch";
    case Err::PrefixMismatch: return "PrefixMismatch";
    case Err::SingularSystem: return "SingularSystem";
    case Err::DeltaTooLarge: return "DeltaTooLarge";
    case Err::ExtractionResidual: return "ExtractionResidual";
    case Err::NearbyEigenvalue: return "NearbyEigenvalue";
    case Err::DegenerateSweep: return "DegenerateSweep";
  }
  return "Unknown";
}

Error::Error(Err code, const std::string& message)
    : std::runtime_error(std::string(err_name(code)) + ": " + message),
      code_(code) {}

void fail(Err code, const std::string& message) { throw Error(code, message); }

Grid::Grid(int intervals) : m_(intervals) {
  if (intervals < 16)
    fail(Err::BadValue, "grid needs at least 16 intervals, got " +
                            std::to_string(intervals));
}

double Grid::spacing() const { return kPi / m_; }

double Grid::point(int j) const { return kPi * j / m_; }

SampledFunction::SampledFunction(Grid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.point_count())
    fail(Err::BadValue,
         "sample count " + std::to_string(values_.size()) +
             " does not match grid with " +
             std::to_string(grid_.point_count()) + " points");
  for (Complex v : values_)
    if (!finite(v)) fail(Err::BadValue, "sample values must be finite");
}

SampledFunction SampledFunction::zero(Grid grid) {
  return SampledFunction(
      grid, std::vector<Complex>(static_cast<size_t>(grid.point_count())));
}

Complex SampledFunction::interpolate(double x) const {
  if (x <= 0.0) return values_.front();
  if (x >= kPi) return values_.back();
  double t = x / grid_.spacing();
  int j = std::min(static_cast<int>(t), grid_.intervals() - 1);
  double w = t - j;
  return (1.0 - w) * values_[static_cast<size_t>(j)] +
         w * values_[static_cast<size_t>(j + 1)];
}

namespace {

std::vector<Complex> trimmed(const std::vector<Complex>& coeffs) {
  double scale = 0.0;
  for (Complex c : coeffs) scale = std::max(scale, std::abs(c));
  std::vector<Complex> out = coeffs;
  while (!out.empty() && std::abs(out.back()) <= 1e-14 * scale)
    out.pop_back();
  return out;
}

}  // namespace

PolynomialPair make_polynomial_pair(std::vector<Complex> r1,
                                    std::vector<Complex> r2) {
  if (r1.empty()) fail(Err::BadValue, "r1 must have at least one coefficient");
  for (Complex c : r1)
    if (!finite(c)) fail(Err::BadValue, "r1 coefficients must be finite");
  for (Complex c : r2)
    if (!finite(c)) fail(Err::BadValue, "r2 coefficients must be finite");
  if (std::abs(r1.back() - 1.0) > 1e-12)
    fail(Err::NonMonic, "leading coefficient of r1 must equal 1");
  r1.back() = 1.0;

  std::vector<Complex> r2t = trimmed(r2);
  if (r2t.size() > r1.size())
    fail(Err::DegreeMismatch, "degree of r2 exceeds degree of r1");
  r2 = std::move(r2t);
  r2.resize(r1.size(), Complex(0.0));

  const double tau_gcd = 1e-8;
  std::vector<Complex> roots2 = poly_roots(r2);
  for (Complex root : poly_roots(r1))
    for (Complex other : roots2)
      if (std::abs(root - other) < tau_gcd)
        fail(Err::CommonRoot, "r1 and r2 share a root near " +
                                  std::to_string(root.real()) + "+" +
                                  std::to_string(root.imag()) + "i");
  return PolynomialPair{std::move(r1), std::move(r2)};
}

Complex poly_eval(const std::vector<Complex>& coeffs, Complex z) {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<Complex> poly_derivative(const std::vector<Complex>& coeffs) {
  if (coeffs.size() <= 1) return {Complex(0.0)};
  std::vector<Complex> out(coeffs.size() - 1);
  for (size_t k = 1; k < coeffs.size(); ++k)
    out[k - 1] = static_cast<double>(k) * coeffs[k];
  return out;
}

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  std::vector<Complex> c = trimmed(coeffs);
  if (c.size() <= 1) return {};
  int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) roots[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

void validate_spectral_data(const SpectralData& data) {
  size_t n = data.rho.size();
  if (data.alpha.size() != n)
    fail(Err::BadValue, "spectral data needs one weight per eigenvalue");
  if (!data.multiplicity.empty() && data.multiplicity.size() != n)
    fail(Err::BadValue, "multiplicity list length mismatch");
  for (size_t i = 0; i < n; ++i) {
    if (!finite(data.rho[i]) || !finite(data.alpha[i]))
      fail(Err::BadValue, "spectral data must be finite");
    if (data.rho[i].real() < -1e-12 ||
        (std::abs(data.rho[i].real()) <= 1e-12 && data.rho[i].imag() < -1e-12))
      fail(Err::BadValue, "rho values must lie on the principal branch");
  }
  for (int mult : data.multiplicity)
    if (mult < 1) fail(Err::BadValue, "multiplicities must be positive");
  if (data.prefix < 0 || data.prefix > static_cast<int>(n))
    fail(Err::BadValue, "prefix must lie between 0 and the entry count");
}

Complex principal_sqrt(Complex lambda) {
  Complex r = std::sqrt(lambda);
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  return r;
}

Complex integrate_product(const SampledFunction& f, const SampledFunction& g,
                          int end_index) {
  if (!(f.grid() == g.grid()))
    fail(Err::GridMismatch, "factors must share one grid");
  if (end_index < 0 || end_index > f.grid().intervals())
    fail(Err::BadValue, "integration end index out of range");
  double h = f.grid().spacing();
  Complex acc = 0.0;
  for (int j = 1; j <= end_index; ++j) {
    Complex a = f.value(j - 1) * g.value(j - 1);
    Complex b = f.value(j) * g.value(j);
    acc += 0.5 * h * (a + b);
  }
  return acc;
}

double l2_norm(const SampledFunction& f) {
  double h = f.grid().spacing();
  double acc = 0.0;
  for (int j = 1; j <= f.grid().intervals(); ++j) {
    double a = std::norm(f.value(j - 1));
    double b = std::norm(f.value(j));
    acc += 0.5 * h * (a + b);
  }
  return std::sqrt(acc);
}

std::vector<Complex> asymptotic_residuals(const SpectralData& data,
                                          int degree) {
  std::vector<Complex> out;
  for (int n = degree + 2; n <= data.count(); ++n)
    out.push_back(data.rho[static_cast<size_t>(n - 1)] -
                  Complex(n - degree - 1));
  return out;
}

}  // namespace slpoly
