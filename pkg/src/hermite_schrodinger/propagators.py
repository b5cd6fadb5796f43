"""Realizations of ``exp(-itH)``, ``H = -d^2/dx^2 + x^2``, and the free flow.

Three routes to the Hermite propagator are provided and kept independent:

* :func:`propagate_spectral` multiplies Hermite coefficients by
  ``exp(-i(2n+1)t)``;
* :func:`propagate_mehler` integrates against the closed-form Mehler kernel;
* :func:`hermite_via_free` rescales a free Schrodinger evolution,
  ``K_{i arctan(v)/2} f(x) = exp(-i v x^2/2) (1+v^2)^{1/4} L_{iv/2} f(x sqrt(1+v^2))``.

Fourier convention throughout: ``f^(xi) = int f(x) exp(-i x xi) dx``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import czt

from .errors import PreconditionError, ResolutionError, SingularityError
from .hermite_basis import (
    Grid,
    GridFunction,
    HermiteCoeffs,
    analyze,
    check_tail,
    max_representable_degree,
    synthesize,
    _padded_spectrum,
)

__all__ = [
    "FreqFunction",
    "DEFAULT_FREQ_GRID",
    "mehler_kernel",
    "mehler_dense",
    "propagate_spectral",
    "propagate_mehler",
    "propagate",
    "fourier_forward",
    "free_propagate",
    "free_from_spectrum",
    "hermite_via_free",
    "auto_freq_grid",
    "effective_radius",
    "live_slice",
    "batch_spectrum",
    "kernel_symmetry_residuals",
]

DEFAULT_FREQ_GRID = Grid(64.0, 4096)

# Below this |sin 2t| requests are served by the spectral route.
SPECTRAL_ROUTE_SIN = 1e-3
KERNEL_SINGULAR_SIN = 1e-12
_CHUNK = 1 << 22  # complex entries per temporary kernel block


@dataclass(frozen=True)
class FreqFunction:
    """Samples of a Fourier transform on a frequency grid."""

    freq_grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape[0] != self.freq_grid.n_points:
            raise PreconditionError("values length must match the frequency grid")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("FreqFunction values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def xi(self):
        return self.freq_grid.points


def mehler_kernel(t, x, y, d=1):
    """Mehler kernel ``K_{it}(x, y)`` of ``exp(-itH)`` in dimension ``d``.

    For ``d == 1`` ``x`` and ``y`` broadcast elementwise; for ``d > 1`` their
    last axis has length ``d``. The argument of ``(2 pi sin 2t)^{d/2}`` is
    ``floor(2t/pi) * pi d / 2``, with floor semantics also for negative t.
    """
    t = float(t)
    s2 = np.sin(2.0 * t)
    if abs(s2) <= KERNEL_SINGULAR_SIN:
        raise SingularityError(
            f"t = {t!r} is too close to a multiple of pi/2 (|sin 2t| = {abs(s2):.1e})")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if d == 1:
        sq = x * x + y * y
        dot = x * y
    else:
        if x.shape[-1] != d or y.shape[-1] != d:
            raise PreconditionError(f"points must have last axis of length d = {d}")
        sq = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
        dot = np.sum(x * y, axis=-1)
    branch = np.floor(2.0 * t / np.pi)
    c2 = np.cos(2.0 * t)
    phase = 0.5 * (c2 / s2 * sq - 2.0 / s2 * dot)
    pref = (np.exp(-1j * np.pi * d / 4.0 - 1j * branch * np.pi * d / 2.0)
            * abs(2.0 * np.pi * s2) ** (-d / 2.0))
    return pref * np.exp(1j * phase)


def propagate_spectral(c, t):
    """``c_n -> exp(-i(2n+1)t) c_n``; exact for every real t."""
    n = np.arange(c.coeffs.size)
    return HermiteCoeffs(np.exp(-1j * (2.0 * n + 1.0) * t) * c.coeffs)


def _spectral_on_grid(f, t, n_max=None):
    if n_max is None:
        n_max = max_representable_degree(f.grid)
    return synthesize(propagate_spectral(analyze(f, n_max), t), f.grid)


def propagate_mehler(f, t, route_singular=True):
    """Trapezoid quadrature of ``K_{it}(x, y) f(y)`` at every grid point.

    Requests with ``|sin 2t| < 1e-3`` go through the spectral route when
    ``route_singular`` is set; otherwise they raise SingularityError.
    """
    s2 = abs(np.sin(2.0 * t))
    if s2 < SPECTRAL_ROUTE_SIN:
        if route_singular:
            return _spectral_on_grid(f, t)
        if s2 <= 1e-6:
            raise SingularityError(
                f"t = {t!r} is within 1e-6 (in |sin 2t|) of the kernel singularity")
    grid = f.grid
    if grid.spacing * grid.half_extent / s2 > np.pi:
        raise ResolutionError(
            f"Mehler kernel under-resolved at t = {t:.4g}: spacing*half_extent/|sin 2t| = "
            f"{grid.spacing * grid.half_extent / s2:.3g} > pi")
    check_tail(f)
    return GridFunction(grid, _mehler_apply(t, grid, grid.weights * f.values))


def _mehler_apply(t, grid, wf):
    """Trapezoid sum of the kernel against ``wf`` via a chirp-z transform.

    On the symmetric grid ``x_k = h (k - c)`` the cross term
    ``exp(-i x_k y_l / sin 2t)`` factors into chirps around ``exp(-i h^2 k l / sin 2t)``,
    which is exactly a chirp-z transform; the result equals the dense sum.
    """
    s2 = np.sin(2.0 * t)
    h = grid.spacing
    c = 0.5 * (grid.n_points - 1)
    x = grid.points
    k = np.arange(grid.n_points)
    beta = 1.0 / s2
    alpha = 0.5 * np.cos(2.0 * t) / s2
    branch = np.floor(2.0 * t / np.pi)
    pref = np.exp(-0.25j * np.pi - 0.5j * branch * np.pi) * abs(2.0 * np.pi * s2) ** -0.5
    g = wf * np.exp(1j * alpha * x * x) * np.exp(1j * beta * h * h * c * k)
    sums = czt(g, m=grid.n_points, w=np.exp(-1j * beta * h * h), a=1.0)
    cross = np.exp(-1j * beta * h * h * c * c) * np.exp(1j * beta * h * h * c * k)
    return pref * np.exp(1j * alpha * x * x) * cross * sums


def mehler_dense(f, t):
    """Dense-matrix version of :func:`propagate_mehler` (no routing, no checks)."""
    grid = f.grid
    x = grid.points
    wf = grid.weights * f.values
    out = np.empty(grid.n_points, dtype=complex)
    rows = max(1, _CHUNK // grid.n_points)
    for lo in range(0, grid.n_points, rows):
        hi = min(lo + rows, grid.n_points)
        out[lo:hi] = mehler_kernel(t, x[lo:hi, None], x[None, :]) @ wf
    return GridFunction(grid, out)


def propagate(f, t, method="mehler"):
    """Dispatch to one of the grid-to-grid Hermite propagators."""
    if method == "mehler":
        return propagate_mehler(f, t)
    if method == "spectral":
        return _spectral_on_grid(f, t)
    if method == "free":
        # exp(-itH) is pi-antiperiodic and conjugation-symmetric; reduce to [0, pi/4]
        # only where that is exact for the transfer formula (0 <= t < pi/4).
        if not 0.0 <= t < np.pi / 4:
            raise PreconditionError("the transfer route needs 0 <= t < pi/4")
        return hermite_via_free(f, np.tan(2.0 * t))
    raise PreconditionError(f"unknown propagation method {method!r}")


def _uniform_step(a):
    if a.size < 2:
        return None
    d = np.diff(a)
    step = d[0]
    if step != 0.0 and np.all(np.abs(d - step) <= 1e-9 * abs(step)):
        return step
    return None


def _fourier_sum(x, wvals, xi, sign=-1.0):
    """``sum_k wvals[k] exp(sign*i x_k xi_m)`` for all m; wvals may be 2-D.

    When both node sets are uniform the sum is a chirp-z transform and is
    evaluated in O((N+M) log(N+M)); otherwise it is summed directly.
    """
    wvals = np.asarray(wvals)
    h, dxi = _uniform_step(x), _uniform_step(xi)
    if h is not None and dxi is not None and x.size * xi.size > 4096:
        # (x0 + k h)(xi0 + m dxi) = x0 xi0 + x0 dxi m + h xi0 k + h dxi k m
        k = np.arange(x.size)
        m = np.arange(xi.size)
        shape = (-1,) + (1,) * (wvals.ndim - 1)
        g = wvals * np.exp(sign * 1j * h * xi[0] * k).reshape(shape)
        sums = czt(g, m=xi.size, w=np.exp(sign * 1j * h * dxi), a=1.0, axis=0)
        lead = np.exp(sign * 1j * x[0] * (xi[0] + dxi * m))
        return sums * lead.reshape(shape)
    out_shape = (xi.size,) + wvals.shape[1:]
    out = np.empty(out_shape, dtype=complex)
    rows = max(1, _CHUNK // max(1, x.size))
    for lo in range(0, xi.size, rows):
        hi = min(lo + rows, xi.size)
        out[lo:hi] = np.exp(sign * 1j * np.outer(xi[lo:hi], x)) @ wvals
    return out


def live_slice(values, rel_tol=1e-17):
    """Contiguous index range outside of which ``|values|`` is below ``rel_tol`` of its max."""
    mag = np.abs(values)
    if mag.ndim > 1:
        mag = mag.max(axis=tuple(range(1, mag.ndim)))
    idx = np.nonzero(mag > rel_tol * mag.max(initial=0.0))[0]
    if idx.size == 0:
        return slice(0, 0)
    return slice(int(idx[0]), int(idx[-1]) + 1)


def fourier_forward(f, freq_grid=DEFAULT_FREQ_GRID):
    """Trapezoid Fourier sum ``f^(xi) = sum_k w_k f(x_k) exp(-i x_k xi)``."""
    check_tail(f)
    xi = freq_grid.points
    return FreqFunction(freq_grid, _fourier_sum(f.grid.points, f.grid.weights * f.values, xi))


def batch_spectrum(fs, freq_grid=DEFAULT_FREQ_GRID, rel_tol=1e-16):
    """Weighted transforms of functions sharing one grid, trimmed to their joint band.

    Returns ``(xi, wfhat)`` with ``wfhat[m, j] = dxi_m * f_j^(xi_m)``, ready for
    :func:`free_from_spectrum`.
    """
    fs = list(fs)
    if not fs:
        raise PreconditionError("need at least one function")
    grid = fs[0].grid
    if any(f.grid != grid for f in fs):
        raise PreconditionError("all functions must share one grid")
    for f in fs:
        check_tail(f)
    cols = np.stack([grid.weights * f.values for f in fs], axis=1)
    spec = _fourier_sum(grid.points, cols, freq_grid.points)
    keep = live_slice(spec, rel_tol)
    return freq_grid.points[keep], freq_grid.weights[keep, None] * spec[keep]


def effective_radius(points, values, rel_tol=1e-14):
    """Largest ``|point|`` where ``|value|`` exceeds ``rel_tol`` times its maximum."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(points[mag > rel_tol * peak])))


def auto_freq_grid(f, t, out_points, rel_tol=1e-14):
    """Symmetric frequency grid adequate for free-propagating ``f`` to ``out_points``.

    The band is read off a padded FFT of ``f``; the spacing keeps the periodic
    images of the evolved function away from the requested points and keeps
    the phase step ``|t| xi_max dxi`` below pi/2.
    """
    xi, spec, _ = _padded_spectrum(f, 4)
    band = 1.05 * effective_radius(xi, spec, rel_tol) + 1.0
    r_f = effective_radius(f.grid.points, f.values, rel_tol)
    reach = np.max(np.abs(np.asarray(out_points, dtype=float)), initial=0.0)
    span = reach + r_f + 2.0 * abs(t) * band
    dxi = 2.0 * np.pi / (1.25 * (span + 1.0))
    if t != 0.0:
        dxi = min(dxi, 0.5 * np.pi / (abs(t) * band))
    return Grid.with_spacing(band, dxi)


def free_from_spectrum(xi, wfhat, t, out_points):
    """``(1/2pi) sum_m wfhat[m] exp(i x xi_m - i t xi_m^2)`` at each output point.

    ``wfhat`` already carries the frequency quadrature weights and may be
    2-D (one column per function).
    """
    out_points = np.asarray(out_points, dtype=float)
    flat = out_points.ravel()
    chirped = np.exp(-1j * t * xi * xi)
    chirped = chirped.reshape((-1,) + (1,) * (np.ndim(wfhat) - 1)) * wfhat
    vals = _fourier_sum(xi, chirped, flat, sign=1.0) / (2.0 * np.pi)
    return vals.reshape(out_points.shape + np.shape(wfhat)[1:])


def free_propagate(f, t, out_points, freq_grid=DEFAULT_FREQ_GRID, fhat=None):
    """Free Schrodinger evolution ``exp(it d^2/dx^2) f`` at arbitrary points.

    Computed as ``(1/2pi) int exp(i x xi) exp(-i t xi^2) f^(xi) dxi`` by a
    direct frequency sum, so non-uniform output points carry no
    interpolation error. ``freq_grid="auto"`` picks a grid from the data.
    """
    if isinstance(freq_grid, str):
        if freq_grid != "auto":
            raise PreconditionError(f"unknown freq_grid selector {freq_grid!r}")
        freq_grid = auto_freq_grid(f, t, out_points)
    xi_max = freq_grid.half_extent
    if abs(t) * xi_max * freq_grid.spacing >= np.pi:
        raise ResolutionError(
            f"frequency grid too coarse for t = {t:.4g}: |t|*xi_max*dxi = "
            f"{abs(t) * xi_max * freq_grid.spacing:.3g} >= pi")
    if fhat is None:
        fhat = fourier_forward(f, freq_grid)
    elif fhat.freq_grid != freq_grid:
        raise PreconditionError("precomputed transform lives on a different frequency grid")
    keep = live_slice(fhat.values, 1e-16)
    if keep.stop == 0:
        return np.zeros(np.shape(out_points), dtype=complex)
    wfhat = freq_grid.weights[keep] * fhat.values[keep]
    return free_from_spectrum(fhat.xi[keep], wfhat, t, out_points)


def hermite_via_free(f, v, freq_grid=DEFAULT_FREQ_GRID):
    """``K_{i arctan(v)/2} f`` on the grid of ``f`` through the free flow at time v/2."""
    if v < 0:
        raise PreconditionError(f"v must be >= 0, got {v}")
    if v == 0:
        return GridFunction(f.grid, f.values.copy())
    x = f.grid.points
    stretch = np.sqrt(1.0 + v * v)
    u = free_propagate(f, 0.5 * v, x * stretch, freq_grid)
    return GridFunction(f.grid, np.exp(-0.5j * v * x * x) * stretch ** 0.5 * u)


def kernel_symmetry_residuals(x, y, t):
    """Largest violations of the conjugation and quarter-period kernel identities.

    Conjugation: ``K(-t; x, y) = conj K(t; x, y)``. Quarter period:
    ``K(t + pi/2; x, y) = e^{-i pi/2} K(t; -x, y)``. Returned residuals are
    relative to the kernel modulus.
    """
    X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    conj = shift = 0.0
    for t in np.atleast_1d(np.asarray(t, float)):
        k = mehler_kernel(t, X, Y)
        scale = np.abs(k)
        conj = max(conj, float(np.max(np.abs(mehler_kernel(-t, X, Y) - np.conj(k)) / scale)))
        rot = np.exp(-0.5j * np.pi) * mehler_kernel(t, -X, Y)
        shift = max(shift, float(np.max(np.abs(mehler_kernel(t + 0.5 * np.pi, X, Y) - rot) / scale)))
    return conj, shift
