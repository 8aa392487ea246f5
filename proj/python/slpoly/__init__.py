"""Forward and inverse Sturm-Liouville solver with polynomial boundary
conditions in the spectral parameter."""

try:
    from ._slpoly import (
        Problem,
        Reconstruction,
        RoundTripReport,
        SolverError,
        SpectralData,
        characteristic,
        inverse_solve,
        problem_from_json,
        problem_to_json,
        roundtrip,
        spectral_data,
        weyl,
    )
except ImportError:  # extension built next to the package, not inside it
    from _slpoly import (
        Problem,
        Reconstruction,
        RoundTripReport,
        SolverError,
        SpectralData,
        characteristic,
        inverse_solve,
        problem_from_json,
        problem_to_json,
        roundtrip,
        spectral_data,
        weyl,
    )

__all__ = [
    "Problem",
    "Reconstruction",
    "RoundTripReport",
    "SolverError",
    "SpectralData",
    "characteristic",
    "inverse_solve",
    "problem_from_json",
    "problem_to_json",
    "roundtrip",
    "spectral_data",
    "weyl",
]
