"""Normalized Hermite functions on uniform grids.

The basis is ``h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2)`` with
positive leading coefficient, so ``h_0(x) = pi^{-1/4} exp(-x^2/2)``.
Values are produced by the three-term recurrence in the normalized
functions themselves, never through the raw polynomials, which keeps
everything finite well past n = 100.

Inner products use the trapezoid rule on the uniform grid; for smooth
functions that decay at the grid ends this is spectrally accurate.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

from .errors import PreconditionError, ResolutionError, TailLeakError

__all__ = [
    "Grid",
    "GridFunction",
    "HermiteCoeffs",
    "hermite_functions",
    "eval_hermite",
    "analyze",
    "synthesize",
    "sobolev_norm_fourier",
    "sobolev_norm_hermite",
    "max_resolved_degree",
    "max_representable_degree",
    "random_hermite_function",
    "check_tail",
]

PI_QUARTER = np.pi ** -0.25

# Relative edge magnitude above which a function is treated as non-decaying.
TAIL_WARN = 1e-10
TAIL_FAIL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-half_extent, half_extent]`` with endpoints included."""

    half_extent: float = 12.0
    n_points: int = 2048

    def __post_init__(self):
        if not np.isfinite(self.half_extent) or self.half_extent <= 0:
            raise PreconditionError(
                f"half_extent must be positive, got {self.half_extent!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise PreconditionError(
                f"n_points must be an integer >= 2, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "half_extent", float(self.half_extent))

    @property
    def spacing(self):
        return 2.0 * self.half_extent / (self.n_points - 1)

    @property
    def points(self):
        # Half-integer offsets keep the grid exactly symmetric in floating point.
        k = np.arange(self.n_points) - 0.5 * (self.n_points - 1)
        return k * self.spacing

    @property
    def weights(self):
        """Trapezoid weights."""
        w = np.full(self.n_points, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def refined(self, factor=2):
        """Grid with the same extent and ``factor`` times finer spacing (nested nodes)."""
        return Grid(self.half_extent, (self.n_points - 1) * factor + 1)

    def covers(self, lo, hi):
        return -self.half_extent <= lo and hi <= self.half_extent

    @classmethod
    def with_spacing(cls, half_extent, max_spacing):
        """Smallest grid on ``[-half_extent, half_extent]`` whose spacing is <= max_spacing."""
        n = int(np.ceil(2.0 * half_extent / max_spacing)) + 1
        return cls(half_extent, max(n, 2))


@dataclass(frozen=True)
class GridFunction:
    """Complex samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise PreconditionError(
                f"values has shape {values.shape}, grid expects ({self.grid.n_points},)")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("GridFunction values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid, func):
        return cls(grid, func(grid.points))

    @property
    def x(self):
        return self.grid.points

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.grid != self.grid:
            raise PreconditionError("cannot add functions on different grids")
        return GridFunction(self.grid, self.values + other.values)

    def l2_norm(self):
        return float(np.sqrt(np.sum(self.grid.weights * np.abs(self.values) ** 2)))


@dataclass(frozen=True)
class HermiteCoeffs:
    """Coefficients ``c_n`` against ``h_n`` for ``n = 0..n_max``."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise PreconditionError("coefficients must be a non-empty 1-D array")
        if not np.all(np.isfinite(c)):
            raise PreconditionError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self):
        return self.coeffs.size - 1

    def l2_norm(self):
        return float(np.linalg.norm(self.coeffs))


def hermite_functions(n_max, x):
    """Rows ``h_0(x) .. h_{n_max}(x)`` at arbitrary points ``x`` (no resolution check)."""
    if n_max < 0:
        raise PreconditionError(f"n_max must be >= 0, got {n_max}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (x * np.sqrt(2.0 / (n + 1)) * out[n]
                      - np.sqrt(n / (n + 1)) * out[n - 1])
    return out


def _check_resolution(n_max, grid):
    limit = np.pi / np.sqrt(2 * n_max + 1)
    if grid.spacing >= limit:
        raise ResolutionError(
            f"grid spacing {grid.spacing:.3g} does not resolve h_{n_max}; "
            f"need spacing < pi/sqrt(2*n_max+1) = {limit:.3g}")


def max_resolved_degree(grid):
    """Largest n_max passing the spacing guard of :func:`eval_hermite`."""
    # spacing < pi / sqrt(2n+1)  <=>  n < ((pi/spacing)^2 - 1) / 2
    n = int(np.floor(((np.pi / grid.spacing) ** 2 - 1.0) / 2.0))
    while n >= 0 and grid.spacing >= np.pi / np.sqrt(2 * n + 1):
        n -= 1
    return n


def max_representable_degree(grid, edge_tol=1e-12, cap=256):
    """Largest n with ``|h_n| < edge_tol`` at both grid ends (and resolved)."""
    n_hi = min(cap, max_resolved_degree(grid))
    if n_hi < 0:
        return -1
    h = hermite_functions(n_hi, np.array([grid.half_extent]))[:, 0]
    ok = np.abs(h) < edge_tol
    bad = np.nonzero(~ok)[0]
    return int(bad[0] - 1) if bad.size else n_hi


def eval_hermite(n_max, grid):
    """Matrix ``[n_max+1, n_points]`` whose row n holds ``h_n`` on the grid.

    Raises ResolutionError when the spacing cannot carry the oscillation of
    ``h_{n_max}`` (local wavelength about ``pi/sqrt(2n+1)`` near 0).
    """
    if n_max < 0:
        raise PreconditionError(f"n_max must be >= 0, got {n_max}")
    _check_resolution(n_max, grid)
    return hermite_functions(n_max, grid.points)


def analyze(f, n_max):
    """Project a GridFunction onto ``h_0 .. h_{n_max}`` by trapezoid quadrature."""
    basis = eval_hermite(n_max, f.grid)
    return HermiteCoeffs(basis @ (f.grid.weights * f.values))


def synthesize(c, grid):
    basis = eval_hermite(c.n_max, grid)
    return GridFunction(grid, c.coeffs @ basis)


def check_tail(f, warn=TAIL_WARN, fail=TAIL_FAIL):
    """Relative edge magnitude of ``f``; warns or raises when it does not decay."""
    peak = np.max(np.abs(f.values))
    if peak == 0.0:
        return 0.0
    tail = max(abs(f.values[0]), abs(f.values[-1])) / peak
    if tail > fail:
        raise TailLeakError(
            f"function does not decay at the grid ends (edge/max = {tail:.2e} > {fail:.0e})")
    if tail > warn:
        warnings.warn(f"edge/max = {tail:.2e} exceeds {warn:.0e}; "
                      "Fourier quantities may carry truncation error", RuntimeWarning,
                      stacklevel=3)
    return tail


def _padded_spectrum(f, pad):
    grid = f.grid
    m = sp_fft.next_fast_len(pad * grid.n_points)
    spec = sp_fft.fft(grid.weights * f.values, n=m)
    xi = 2.0 * np.pi * sp_fft.fftfreq(m, d=grid.spacing)
    return xi, spec, 2.0 * np.pi / (m * grid.spacing)


def sobolev_norm_fourier(f, s, pad=4):
    """``W^s`` norm: ``sqrt((1/2pi) int (1+xi^2)^s |f^(xi)|^2 dxi)``.

    ``f^`` is the trapezoid Fourier sum ``sum_k w_k f(x_k) exp(-i x_k xi)``,
    evaluated on a zero-padded FFT frequency grid so that ``s = 0`` reproduces
    the grid L2 norm exactly.
    """
    check_tail(f)
    xi, spec, dxi = _padded_spectrum(f, pad)
    total = np.sum((1.0 + xi * xi) ** s * np.abs(spec) ** 2) * dxi / (2.0 * np.pi)
    return float(np.sqrt(total))


def sobolev_norm_hermite(c, s):
    """``W_H^s`` norm: ``sqrt(sum (2n+1)^s |c_n|^2)``."""
    eig = 2.0 * np.arange(c.coeffs.size) + 1.0
    return float(np.sqrt(np.sum(eig ** s * np.abs(c.coeffs) ** 2)))


def random_hermite_function(rng, grid, n_max=12, real=False):
    """Random unit-L2 combination of ``h_0 .. h_{n_max}`` with decaying weights.

    Such functions are band-limited in the practical sense: their Fourier
    transforms are combinations of the same Hermite functions.
    """
    scale = 1.0 / (1.0 + np.arange(n_max + 1)) ** 0.5
    c = rng.standard_normal(n_max + 1)
    if not real:
        c = c + 1j * rng.standard_normal(n_max + 1)
    c = c * scale
    c /= np.linalg.norm(c)
    return synthesize(HermiteCoeffs(c), grid), HermiteCoeffs(c)
