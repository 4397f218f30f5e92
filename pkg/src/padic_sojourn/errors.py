"""Exception types shared across the package.

Numerical failures (series non-convergence, inversion accuracy, quadrature
refinement, fit degeneracy) raise subclasses of NumericalError so callers and
the CLI can distinguish "the computation could not be done to tolerance"
(exit code 3) from bad user input (exit code 2).
"""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""


class SeriesError(NumericalError):
    """A series evaluator hit max_terms before its stop criterion."""


class InversionError(NumericalError):
    """Laplace inversion self-reported error exceeds the requested tolerance."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class FitError(NumericalError):
    """A regression or calibration fit is degenerate or did not converge."""
