"""Massless Coulomb-Dirac operators on the half-line: solutions, spectral transform, eigenvalue counting."""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("acceptance", "cli", "counting", "errors", "grids", "params", "potentials",
               "solutions", "specialfn", "spectral", "twodim", "virtual")

# imported lazily so that the command-line entry point can pin BLAS threads first
_EXPORTS = {
    "make_params": "params",
    "classify_regime": "params",
    "Regime": "params",
    "OperatorParams": "params",
    "kummer_m": "specialfn",
    "kummer_u": "specialfn",
    "phi_m": "solutions",
    "phi_u": "solutions",
    "phi_infinity": "solutions",
    "phi_zero": "solutions",
    "spectral_density": "spectral",
    "green_kernel": "spectral",
    "SpectralTransform": "spectral",
    "PotentialSpec": "potentials",
    "count_negative": "counting",
    "lt_sum": "counting",
    "detect_virtual_level": "virtual",
    "analyze_2d": "twodim",
}

__all__ = ["__version__", *_EXPORTS]


def __getattr__(name):
    if name in _EXPORTS:
        return getattr(importlib.import_module(f".{_EXPORTS[name]}", __name__), name)
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
