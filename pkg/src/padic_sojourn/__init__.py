"""Sojourn statistics of a hierarchical random walk on the p-adic integers.

The walk is lumped exactly to a continuous-time Markov chain over norm
levels; this package derives its constants, evaluates the sojourn-time
theory (series, Laplace transforms, limit laws), simulates paths with a
counter-based RNG, and cross-validates the two against each other.
"""

from .errors import (
    FitError,
    InversionError,
    NumericalError,
    QuadratureError,
    SeriesError,
)
from .model import DerivedConstants, ModelParams, NormChainGenerator, build_generator, derive_constants

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "NormChainGenerator",
    "derive_constants",
    "build_generator",
    "NumericalError",
    "SeriesError",
    "InversionError",
    "QuadratureError",
    "FitError",
    "__version__",
]
