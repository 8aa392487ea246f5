#pragma once

#include "slpoly/core.hpp"
#include "slpoly/verify.hpp"

#include <iosfwd>
#include <string>

namespace slpoly {

// Problem files carry sigma either as explicit samples or as a named
// expression (zero, constant, cosine, piecewise-linear) plus the boundary
// coefficient arrays; complex numbers are [re, im] pairs. grid_override > 0
// re-evaluates an expression-backed sigma on that grid and linearly
// resamples a sample-backed one (exact when the new grid refines the old by
// an integer factor).
BoundaryProblem read_problem(const std::string& path, int grid_override = 0);
BoundaryProblem parse_problem(const std::string& text, int grid_override = 0);
void write_problem(const std::string& path, const BoundaryProblem& problem);
std::string problem_to_json(const BoundaryProblem& problem);

// Spectral data files list entries {n, rho, alpha} with n contiguous from 1,
// plus meta {M1, N_prefix, source}. Consecutive equal rho values are read
// back as one multiplicity group.
SpectralData read_spectral(const std::string& path);
SpectralData parse_spectral(const std::string& text);
void write_spectral(const std::string& path, const SpectralData& data,
                    int degree, const std::string& source);
std::string spectral_to_json(const SpectralData& data, int degree,
                             const std::string& source);

std::string roundtrip_report_to_json(const RoundTripReport& report);
std::string sweep_report_to_json(const SweepReport& report);

// Samples of the characteristic function along the real axis, one line per
// lambda: lambda_re,lambda_im,delta_re,delta_im.
void write_delta_csv(const std::string& path, const BoundaryProblem& problem,
                     double lambda_min, double lambda_max, int samples);

}  // namespace slpoly
