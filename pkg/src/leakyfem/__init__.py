"""Finite-element spectra of Schrodinger operators with delta-type
interactions supported on curves, plus the verification tooling for the
eigenvalue comparison between the delta and delta-prime couplings."""

__version__ = "0.1.0"

from . import (eigensolver, femforms, geometry, meshing, oracles, pipeline,
               spectral_analysis)

__all__ = [
    "geometry",
    "meshing",
    "femforms",
    "eigensolver",
    "oracles",
    "pipeline",
    "spectral_analysis",
    "__version__",
]
