"""Numerical toolkit for the Hermite-Schrodinger flow ``exp(-itH)``, ``H = -d^2/dx^2 + x^2``.

Modules:

* :mod:`.hermite_basis` - Hermite functions, grids, Sobolev norms
* :mod:`.propagators` - Mehler kernel, spectral and free propagation
* :mod:`.mixed_norms` - L^p / mixed norms and the Strichartz equality
* :mod:`.oscillatory` - ``int exp(i(at + bt^2)) |t|^{-1/2} dt`` and its bound
* :mod:`.experiments` - maximal function and counterexample constructions
* :mod:`.cli` - command-line experiment runner
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    HermiteSchrodingerError,
    NumericalError,
    PreconditionError,
    ResolutionError,
    SearchFailure,
    SingularityError,
    TailLeakError,
    TruncationError,
)
from .hermite_basis import Grid, GridFunction, HermiteCoeffs

__all__ = [
    "__version__",
    "ConfigError",
    "ConvergenceError",
    "HermiteSchrodingerError",
    "NumericalError",
    "PreconditionError",
    "ResolutionError",
    "SearchFailure",
    "SingularityError",
    "TailLeakError",
    "TruncationError",
    "Grid",
    "GridFunction",
    "HermiteCoeffs",
]
