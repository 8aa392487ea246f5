#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slpoly/io.hpp"
#include "slpoly/verify.hpp"

namespace py = pybind11;
using namespace slpoly;

namespace {

BoundaryProblem make_problem(const std::vector<Complex>& sigma_values,
                             const std::vector<Complex>& r1,
                             const std::vector<Complex>& r2) {
  Grid grid(static_cast<int>(sigma_values.size()) - 1);
  return BoundaryProblem{SampledFunction(grid, sigma_values),
                         make_polynomial_pair(r1, r2)};
}

Perturbation make_perturbation(
    const std::vector<std::pair<int, Complex>>& rho_shifts,
    const std::vector<std::pair<int, Complex>>& alpha_shifts) {
  Perturbation out;
  out.rho_shifts = rho_shifts;
  out.alpha_shifts = alpha_shifts;
  return out;
}

}  // namespace

PYBIND11_MODULE(_slpoly, m) {
  m.doc() =
      "Forward and inverse Sturm-Liouville solver with polynomials of the "
      "spectral parameter in the boundary condition";

  py::register_exception<Error>(m, "SolverError");

  py::class_<BoundaryProblem>(m, "Problem")
      .def(py::init(&make_problem), py::arg("sigma"), py::arg("r1"),
           py::arg("r2"),
           "sigma: samples on the uniform grid over [0, pi] (length m+1); "
           "r1, r2: polynomial coefficients, constant term first")
      .def_property_readonly(
          "sigma",
          [](const BoundaryProblem& p) { return p.sigma.values(); })
      .def_property_readonly(
          "r1", [](const BoundaryProblem& p) { return p.boundary.r1; })
      .def_property_readonly(
          "r2", [](const BoundaryProblem& p) { return p.boundary.r2; })
      .def_property_readonly("degree", &BoundaryProblem::degree)
      .def_property_readonly("grid_intervals",
                             [](const BoundaryProblem& p) {
                               return p.sigma.grid().intervals();
                             })
      .def("__repr__", [](const BoundaryProblem& p) {
        return "<slpoly.Problem degree=" + std::to_string(p.degree()) +
               " m=" + std::to_string(p.sigma.grid().intervals()) + ">";
      });

  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("rho", &SpectralData::rho)
      .def_readonly("alpha", &SpectralData::alpha)
      .def_readonly("multiplicity", &SpectralData::multiplicity)
      .def_readonly("prefix", &SpectralData::prefix)
      .def("__len__", &SpectralData::count)
      .def("lam", &SpectralData::lambda, py::arg("n"),
           "eigenvalue lambda_n = rho_n^2 (0-based index)");

  py::class_<ReconstructionResult>(m, "Reconstruction")
      .def_readonly("problem", &ReconstructionResult::problem)
      .def_property_readonly(
          "delta",
          [](const ReconstructionResult& r) { return r.dist.total; })
      .def_readonly("condition", &ReconstructionResult::condition)
      .def_readonly("r1_residual", &ReconstructionResult::r1_residual)
      .def_readonly("r2_residual", &ReconstructionResult::r2_residual)
      .def_readonly("K", &ReconstructionResult::K)
      .def_readonly("prefix", &ReconstructionResult::prefix);

  py::class_<RoundTripReport>(m, "RoundTripReport")
      .def_readonly("delta", &RoundTripReport::delta)
      .def_readonly("condition", &RoundTripReport::condition)
      .def_readonly("sigma_error", &RoundTripReport::sigma_error)
      .def_readonly("r1_error", &RoundTripReport::r1_error)
      .def_readonly("r2_error", &RoundTripReport::r2_error)
      .def_readonly("r1_residual", &RoundTripReport::r1_residual)
      .def_readonly("r2_residual", &RoundTripReport::r2_residual)
      .def_readonly("closure_error", &RoundTripReport::closure_error)
      .def_readonly("prefix_closure_error",
                    &RoundTripReport::prefix_closure_error)
      .def_readonly("K", &RoundTripReport::K)
      .def_readonly("prefix", &RoundTripReport::prefix);

  m.def(
      "characteristic",
      [](const BoundaryProblem& p, Complex lambda) {
        return characteristic(p, lambda);
      },
      py::arg("problem"), py::arg("lam"),
      "entire function whose zeros are the eigenvalues");

  m.def(
      "weyl",
      [](const BoundaryProblem& p, Complex lambda) {
        return weyl_function(p, lambda);
      },
      py::arg("problem"), py::arg("lam"));

  m.def(
      "spectral_data",
      [](const BoundaryProblem& p, int n_max, bool allow_multiple) {
        EigenOptions options;
        options.allow_multiple = allow_multiple;
        return spectral_data(p, n_max, options);
      },
      py::arg("problem"), py::arg("n_max"), py::arg("allow_multiple") = false,
      "first n_max eigenvalue square roots and weight numbers");

  m.def(
      "inverse_solve",
      [](const BoundaryProblem& model, const std::vector<Complex>& rho,
         const std::vector<Complex>& alpha, int K, int prefix, int threads) {
        SpectralData target;
        target.rho = rho;
        target.alpha = alpha;
        target.prefix = prefix;
        if (prefix > 0) {
          // Rebuild multiplicity groups from repeated rho values.
          size_t start = 0;
          while (start < target.rho.size()) {
            size_t stop = start + 1;
            while (stop < target.rho.size() &&
                   target.rho[stop] == target.rho[start])
              ++stop;
            for (size_t j = start; j < stop; ++j)
              target.multiplicity.push_back(static_cast<int>(stop - start));
            start = stop;
          }
        }
        validate_spectral_data(target);
        if (K <= 0) K = target.count();
        InverseOptions options;
        options.prefix = prefix;
        options.threads = threads;
        return inverse_solve(model, target, K, options);
      },
      py::arg("model"), py::arg("rho"), py::arg("alpha"), py::arg("K") = 0,
      py::arg("prefix") = 0, py::arg("threads") = 0,
      "reconstruct sigma, r1, r2 from spectral data near the model");

  m.def(
      "roundtrip",
      [](const BoundaryProblem& model,
         const std::vector<std::pair<int, Complex>>& rho_shifts,
         const std::vector<std::pair<int, Complex>>& alpha_shifts, int K,
         int prefix) {
        RoundTripOptions options;
        options.prefix = prefix;
        return roundtrip(model, make_perturbation(rho_shifts, alpha_shifts),
                         K, options);
      },
      py::arg("model"), py::arg("rho_shifts"), py::arg("alpha_shifts"),
      py::arg("K"), py::arg("prefix") = 0,
      "perturb the model's own data, reconstruct, and measure the errors");

  m.def("problem_to_json", &problem_to_json, py::arg("problem"));
  m.def("problem_from_json", &parse_problem, py::arg("text"),
        py::arg("grid_override") = 0);
}
