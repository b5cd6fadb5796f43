"""Maximal-function estimates and explicit divergence constructions.

Everything here is phrased through the free flow
``L_{is} = exp(is d^2/dx^2)``: by the transfer identity,
``|K_{it} f(x)| = (1+v^2)^{1/4} |L_{iv/2} f(x sqrt(1+v^2))|`` with
``v = tan 2t``, so suprema over Hermite times become suprema over free
times along a stretched ray.

Profiles (the compactly supported building blocks) are plain callables
with a known support; they are sampled on whatever grid an operation
needs instead of being tied to one grid.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate
from scipy.special import roots_laguerre

from .errors import (
    PreconditionError,
    ResolutionError,
    SearchFailure,
    TruncationError,
)
from .hermite_basis import (
    Grid,
    GridFunction,
    analyze,
    max_representable_degree,
    sobolev_norm_fourier,
    sobolev_norm_hermite,
)
from .propagators import (
    DEFAULT_FREQ_GRID,
    auto_freq_grid,
    batch_spectrum,
    fourier_forward,
    free_from_spectrum,
    free_propagate,
    _fourier_sum,
)

__all__ = [
    "Profile",
    "bump_profile",
    "default_base",
    "SelectorSample",
    "maximal_time_grid",
    "maximal_values",
    "maximal_function",
    "maximal_refinement_gap",
    "local_l1_ratio",
    "local_l1_ratios",
    "ft_grid",
    "ft_family",
    "sobolev_scaling",
    "selector_v",
    "phi_map",
    "PhiScan",
    "scan_phi",
    "LowerBoundScan",
    "lower_bound_scan",
    "free_value_ft",
    "DivergenceReport",
    "divergence_demo",
    "BumpReport",
    "theorem3_bump",
    "bump_growth",
    "LogtailReport",
    "logtail_tau",
    "logtail_value",
    "logtail_sobolev_norm",
    "theorem3_logtail",
    "sobolev_comparison",
]

T_MAX = math.pi / 8.0
T_MIN = 1e-4

_gl_x, _gl_w = np.polynomial.legendre.leggauss(20)
_lag_x, _lag_w = roots_laguerre(96)


def _gauss_nodes(lo, hi, panels, nodes_x=_gl_x, nodes_w=_gl_w):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes_x[None, :]).ravel()
    w = (half[:, None] * nodes_w[None, :]).ravel()
    return x, w


# ---------------------------------------------------------------------------
# Profiles


@dataclass(frozen=True)
class Profile:
    """A function with compact support ``support = (lo, hi)``."""

    func: object
    support: tuple
    name: str = "custom"

    def __post_init__(self):
        lo, hi = (float(v) for v in self.support)
        if not lo < hi:
            raise PreconditionError(f"profile support must satisfy lo < hi, got {self.support}")
        object.__setattr__(self, "support", (lo, hi))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        lo, hi = self.support
        inside = (y > lo) & (y < hi)
        out[inside] = self.func(y[inside])
        return out

    def nodes(self, panels=64):
        """Gauss-Legendre nodes and weights covering the support."""
        return _gauss_nodes(*self.support, panels)

    def integral(self):
        y, w = self.nodes()
        return float(np.sum(w * self(y)))

    def l1_norm(self):
        y, w = self.nodes()
        return float(np.sum(w * np.abs(self(y))))

    def total_variation(self, n=20001):
        y = np.linspace(*self.support, n)
        return float(np.sum(np.abs(np.diff(self(y)))))


def bump_profile(lo=-2.0, hi=-1.0, scale=1.0):
    """``scale * exp(-1/(1-u^2))`` with ``u`` mapping (lo, hi) onto (-1, 1)."""
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def func(y):
        u = (y - mid) / half
        return scale * np.exp(-1.0 / (1.0 - u * u))

    return Profile(func, (lo, hi), f"bump({lo:g},{hi:g})")


def default_base():
    """Smooth bump on (-2, -1), the base profile of the divergence construction."""
    return bump_profile(-2.0, -1.0)


# ---------------------------------------------------------------------------
# Maximal function


def maximal_time_grid(n_t, t_min=T_MIN, t_max=T_MAX):
    """Hermite times sampled for the maximal function.

    Union of ``n_t`` log-spaced points (resolving small times) and ``n_t``
    uniform points (bounding the gap near ``t_max``).
    """
    if int(n_t) != n_t or n_t < 16:
        raise PreconditionError(f"n_t must be an integer >= 16, got {n_t!r}")
    if not 0 < t_min < t_max <= T_MAX:
        raise PreconditionError(f"need 0 < t_min < t_max <= pi/8, got ({t_min}, {t_max})")
    n_t = int(n_t)
    return np.unique(np.concatenate([np.geomspace(t_min, t_max, n_t),
                                     np.linspace(t_min, t_max, n_t)]))


def maximal_values(fs, x, n_t=128, freq_grid=DEFAULT_FREQ_GRID, t_min=T_MIN):
    """Grid maximum of ``|K_{it} f_j(x)|`` over the maximal time grid.

    ``fs`` is a sequence of GridFunctions on one grid; the result has shape
    ``(len(x), len(fs))``. The grid maximum is a lower bound for the
    essential supremum.
    """
    x = np.asarray(x, dtype=float)
    times = maximal_time_grid(n_t, t_min)
    v_max = math.tan(2.0 * times[-1])
    if 0.5 * v_max * freq_grid.half_extent * freq_grid.spacing >= math.pi:
        raise ResolutionError("frequency grid too coarse for the maximal time range")
    xi, wfhat = batch_spectrum(fs, freq_grid)
    out = np.zeros((x.size, wfhat.shape[1]))
    for t in times:
        v = math.tan(2.0 * t)
        stretch = math.sqrt(1.0 + v * v)
        vals = free_from_spectrum(xi, wfhat, 0.5 * v, x * stretch)
        np.maximum(out, math.sqrt(stretch) * np.abs(vals), out=out)
    return out


def maximal_function(f, n_t=128, freq_grid=DEFAULT_FREQ_GRID):
    """``max_t |K_{it} f|`` on the grid of ``f`` (real GridFunction)."""
    vals = maximal_values([f], f.grid.points, n_t, freq_grid)[:, 0]
    return GridFunction(f.grid, vals)


def maximal_refinement_gap(f, n_t=128, freq_grid=DEFAULT_FREQ_GRID):
    """Sup-norm change of the maximal function when ``n_t`` is doubled."""
    a = maximal_values([f], f.grid.points, n_t, freq_grid)
    b = maximal_values([f], f.grid.points, 2 * n_t, freq_grid)
    return float(np.max(np.abs(a - b)))


def _interval_points(I, n_x):
    lo, hi = I
    if not lo < hi:
        raise PreconditionError(f"interval must satisfy lo < hi, got {I}")
    if n_x < 3 or n_x % 2 == 0:
        raise PreconditionError(f"n_x must be odd and >= 3 for Simpson's rule, got {n_x}")
    return np.linspace(lo, hi, n_x)


def local_l1_ratios(fs, I=(-1.0, 1.0), n_t=128, n_x=257, freq_grid=DEFAULT_FREQ_GRID):
    """``int_I Mf / ||f||_{W^{1/4}}`` for each function in ``fs``."""
    fs = list(fs)
    grid = fs[0].grid
    if not grid.covers(*I):
        raise PreconditionError(f"interval {I} is not inside the grid extent")
    norms = np.array([sobolev_norm_fourier(f, 0.25) for f in fs])
    if np.any(norms == 0.0):
        raise PreconditionError("ratio undefined for a function of zero W^{1/4} norm")
    x = _interval_points(I, n_x)
    m = maximal_values(fs, x, n_t, freq_grid)
    return integrate.simpson(m, x=x, axis=0) / norms


def local_l1_ratio(f, I=(-1.0, 1.0), n_t=128, n_x=257, freq_grid=DEFAULT_FREQ_GRID):
    return float(local_l1_ratios([f], I, n_t, n_x, freq_grid)[0])


# ---------------------------------------------------------------------------
# Modulated dilations f_t(y) = f(y/t) exp(2iy/t^2)


def _check_base(base):
    if not isinstance(base, Profile):
        raise PreconditionError("base must be a Profile")
    if base.support[1] > 0.0:
        raise PreconditionError(f"base must be supported in the negative reals, got {base.support}")


def ft_grid(base, t, points_per_wave=8, points_across=256):
    """Grid covering ``t * support``.

    The spacing gives ``points_per_wave`` samples per carrier period and at
    least ``points_across`` samples across the dilated support.
    """
    lo, hi = base.support
    half = 1.25 * t * max(abs(lo), abs(hi))
    spacing = min(math.pi * t * t / points_per_wave, t * (hi - lo) / points_across)
    return Grid.with_spacing(half, spacing)


def ft_family(base, t, grid=None):
    """Samples of ``f(y/t) exp(2iy/t^2)``."""
    _check_base(base)
    if not 0.0 < t < 1.0:
        raise PreconditionError(f"t must lie in (0, 1), got {t}")
    if grid is None:
        grid = ft_grid(base, t)
    limit = math.pi * t * t / 4.0
    if grid.spacing >= limit:
        raise ResolutionError(
            f"grid spacing {grid.spacing:.3g} does not resolve the modulation at t = {t:g}; "
            f"need < pi*t^2/4 = {limit:.3g}")
    lo, hi = base.support
    if not grid.covers(t * lo, t * hi):
        raise PreconditionError(f"grid does not cover the support of f_t at t = {t:g}")
    y = grid.points
    return GridFunction(grid, base(y / t) * np.exp(2j * y / (t * t)))


def sobolev_scaling(base, s_values=(0.1, 0.2, 0.25), t_values=(0.1, 0.05, 0.025, 0.0125)):
    """Fitted exponent of ``t -> ||f_t||_{W^s}`` for each s (expected ``1/2 - 2s``)."""
    t_values = np.asarray(t_values, dtype=float)
    fts = [ft_family(base, t) for t in t_values]
    out = {}
    for s in s_values:
        norms = np.array([sobolev_norm_fourier(f, s) for f in fts])
        slope = np.polyfit(np.log(t_values), np.log(norms), 1)[0]
        out[float(s)] = {"slope": float(slope), "expected": 0.5 - 2.0 * s,
                         "norms": norms.tolist()}
    return out


# ---------------------------------------------------------------------------
# Selector and the profile transform Phi


@dataclass(frozen=True)
class SelectorSample:
    """A point (x, t) together with its selected free time ``v(x, t)``."""

    x: float
    t: float
    v: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "v", float(selector_v(self.x, self.t)))
        q = self.x * self.t * self.t / 2.0
        if abs(self.v / math.sqrt(1.0 + self.v * self.v) - q) > 1e-12:
            raise PreconditionError(f"selector identity fails at x={self.x}, t={self.t}")


def selector_v(x, t):
    """``v(x,t) = x t^2 / sqrt(4 - x^2 t^4)``, so that ``v/sqrt(1+v^2) = x t^2/2``."""
    q = np.asarray(x, dtype=float) * np.asarray(t, dtype=float) ** 2
    if np.any(np.abs(q) > 2.0 - 1e-9):
        raise PreconditionError("selector requires |x| t^2 < 2 (pole at x t^2 = 2)")
    v = q / np.sqrt(4.0 - q * q)
    return float(v) if np.ndim(v) == 0 else v


def phi_map(base, z, max_nodes=4_000_000):
    """``Phi(z) = int f(y) exp(i y^2 / z) dy`` for nonzero (complex) z."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise PreconditionError("Phi is undefined at z = 0")
    lo, hi = base.support
    inv = 1.0 / z
    reach = max(abs(lo), abs(hi))
    variation = float(np.max(np.abs(inv))) * (reach * reach)
    panels = int(math.ceil(variation / 2.0)) + 32
    if panels * _gl_x.size > max_nodes:
        raise ResolutionError(f"phase y^2/z unresolved for |z| = {float(np.min(np.abs(z))):.3g}")
    y, w = base.nodes(panels)
    fy = w * base(y)
    vals = np.exp(1j * np.multiply.outer(inv, y * y)) @ fy
    return complex(vals) if vals.ndim == 0 else vals


@dataclass
class PhiScan:
    z: np.ndarray
    modulus: np.ndarray
    I: tuple  # interval of (1/2, 1) where |Phi| stays above half its max
    phi_min: float  # min |Phi| over I
    c: float  # min over I of |Phi(z)| / sqrt(pi z): lower bound for the free values
    I_prime: tuple
    eps: float

    def as_dict(self):
        return {"I": list(self.I), "phi_min": self.phi_min, "c": self.c,
                "I_prime": list(self.I_prime), "eps": self.eps}


def scan_phi(base, n=512, frac=0.5, max_level=10):
    """Locate a dyadic interval of (1/2, 1) where ``|Phi|`` exceeds ``frac * max``.

    Also returns the derived constant ``c``, a sub-interval ``I'`` and an
    ``eps`` such that ``x in I'`` and ``t < eps`` keep ``x/sqrt(1-x^2 t^4/4)``
    inside ``I``.
    """
    z = 0.5 + 0.5 * (np.arange(n) + 0.5) / n
    mod = np.abs(phi_map(base, z))
    thr = frac * mod.max()
    best = None
    for level in range(max_level + 1):
        width = 0.5 / 2 ** level
        for k in range(2 ** level):
            a = 0.5 + k * width
            inside = (z >= a) & (z <= a + width)
            if inside.any() and np.all(mod[inside] > thr):
                score = float(mod[inside].min())
                if best is None or score > best[0]:
                    best = (score, a, a + width)
        if best is not None:
            break
    if best is None:
        raise SearchFailure("no dyadic interval with |Phi| above threshold",
                            {"max": float(mod.max()), "threshold": thr})
    _, a, b = best
    zf = np.linspace(a, b, 257)
    fine = np.abs(phi_map(base, zf))
    c = float(np.min(fine / np.sqrt(np.pi * zf)))
    xp = (a, a + 0.5 * (b - a))
    x_hi = xp[1]
    eps = min(0.99, (4.0 * (1.0 - (x_hi / b) ** 2) / x_hi ** 2) ** 0.25)
    return PhiScan(z, mod, (a, b), float(fine.min()), c, xp, float(eps))


# ---------------------------------------------------------------------------
# Free flow of f_t


def free_value_ft(base, t, s, X, max_nodes=2_000_000):
    """``L_{is} f_t(X)`` by exact x-space quadrature, or an upper bound.

    ``L_{is} f_t(X) = e^{-i pi/4} (4 pi s)^{-1/2} t e^{iX^2/4s}
    int f(w) exp(i(alpha w + beta w^2)) dw`` with ``alpha = 2/t - X t/(2s)``
    and ``beta = t^2/(4s)``. Returns ``(value, bound)``: when the phase is
    affordable, ``value`` is the quadrature and ``bound`` is 0; otherwise
    ``value`` is None and ``bound`` is a one-step integration-by-parts bound
    on the modulus.
    """
    lo, hi = base.support
    alpha = 2.0 / t - X * t / (2.0 * s)
    beta = t * t / (4.0 * s)
    pref = (4.0 * math.pi * s) ** -0.5 * t
    variation = abs(alpha) * (hi - lo) + abs(beta) * abs(hi * hi - lo * lo)
    panels = int(math.ceil(variation / 2.0)) + 16
    if panels * _gl_x.size <= max_nodes:
        w, wt = base.nodes(panels)
        integral = np.sum(wt * base(w) * np.exp(1j * (alpha * w + beta * w * w)))
        phase = -0.25 * math.pi + X * X / (4.0 * s)
        return pref * np.exp(1j * phase) * integral, 0.0
    d_lo, d_hi = alpha + 2.0 * beta * lo, alpha + 2.0 * beta * hi
    if d_lo * d_hi <= 0:
        # stationary point inside the support: fall back to the L1 bound
        return None, pref * base.l1_norm()
    m = min(abs(d_lo), abs(d_hi))
    ibp = base.total_variation() / m + 2.0 * abs(beta) * base.l1_norm() / (m * m)
    return None, pref * min(ibp, base.l1_norm())


@dataclass
class LowerBoundScan:
    x: np.ndarray
    direct: np.ndarray
    closed: np.ndarray
    min_value: float
    max_deviation: float


def lower_bound_scan(base, t, I_prime, n_x=64):
    """``|L_{iv/2} f_t(x sqrt(1+v^2))|`` at ``v = v(x,t)`` for x in I'.

    The direct values come from the frequency-side free flow; the closed form
    is ``|Phi(z)| / sqrt(pi z)`` with ``z = x / sqrt(1 - x^2 t^4 / 4)``.
    """
    lo, hi = I_prime
    if not (0.5 <= lo < hi <= 1.0):
        raise PreconditionError(f"I' must lie in (1/2, 1), got {I_prime}")
    f_t = ft_family(base, t)
    x = np.linspace(lo, hi, n_x)
    v = selector_v(x, t)
    X = x * np.sqrt(1.0 + v * v)
    z = x / np.sqrt(1.0 - x * x * t ** 4 / 4.0)
    closed = np.abs(phi_map(base, z)) / np.sqrt(np.pi * z)
    fg = auto_freq_grid(f_t, 0.5 * float(v.max()), X)
    fhat = fourier_forward(f_t, fg)
    direct = np.array([abs(free_propagate(f_t, 0.5 * vi, np.array([Xi]), fg, fhat)[0])
                       for vi, Xi in zip(v, X)])
    return LowerBoundScan(x, direct, closed, float(direct.min()),
                          float(np.max(np.abs(direct - closed))))


# ---------------------------------------------------------------------------
# Finite-depth divergence construction


@dataclass
class DivergenceReport:
    scan: PhiScan
    times: list
    halvings: list
    x: np.ndarray
    local_sup: np.ndarray  # (K, n_x): lower estimate of the k-th local sup at each x
    observed: list  # min over x of local_sup[k]
    predicted: list  # c k - sum_{j != k} j 2^{-j}
    s: float
    sobolev_terms: list  # ||f_{t_j}||_{W^s}
    sobolev_bound: float  # sum_j j ||f_{t_j}||_{W^s}
    schedule_sum: float  # sum_j j t_j^{1/2-2s}

    @property
    def exceeds(self):
        return [o > p for o, p in zip(self.observed, self.predicted)]

    def as_dict(self):
        return {
            "scan": self.scan.as_dict(),
            "times": list(self.times),
            "halvings": list(self.halvings),
            "observed": list(self.observed),
            "predicted": list(self.predicted),
            "exceeds": self.exceeds,
            "s": self.s,
            "sobolev_terms": list(self.sobolev_terms),
            "sobolev_bound": self.sobolev_bound,
            "schedule_sum": self.schedule_sum,
        }


def _kernel_condition(base, t, v_min, J):
    """Sup of the free kernel times ``||f_t||_1`` below ``2^{-J}``."""
    return (2.0 * math.pi * v_min) ** -0.5 * t * base.l1_norm() < 2.0 ** -J


def _decay_condition(base, t_new, earlier, xs, n_v=5):
    """``|L_{iv/2} f_{t_j}(x sqrt(1+v^2))| < 2^{-j}`` for v near ``v(x, t_new)``."""
    for x in xs:
        v0 = selector_v(x, t_new)
        for v in np.geomspace(0.5 * v0, 2.0 * v0, n_v):
            X = x * math.sqrt(1.0 + v * v)
            for j, t_j in enumerate(earlier, start=1):
                value, bound = free_value_ft(base, t_j, 0.5 * v, X)
                size = abs(value) if value is not None else bound
                if size >= 2.0 ** -j:
                    return False
    return True


def divergence_demo(base=None, K=5, s=0.2, n_x=16, n_v=9, v_spread=0.01,
                    max_halvings=80, scan=None):
    """Finite-depth version of the divergent series ``phi = sum_j j f_{t_j}``.

    ``t_1 = eps/2`` and each later ``t_J`` halves ``t_{J-1}`` until both the
    kernel-size condition (new term small near earlier selector times) and
    the decay condition (earlier terms small near the new selector time)
    hold on the sample grid. For each k the local sup of ``|L_{iv/2} phi_K|``
    over ``v in v(x, t_k)(1 +- v_spread)`` is compared with
    ``c k - sum_{j != k} j 2^{-j}``.
    """
    base = base or default_base()
    _check_base(base)
    if int(K) != K or K < 2:
        raise PreconditionError(f"depth K must be an integer >= 2, got {K!r}")
    scan = scan or scan_phi(base)
    xs = np.linspace(*scan.I_prime, n_x)
    times = [0.5 * scan.eps]
    halvings = [0]
    for J in range(2, K + 1):
        t = times[-1]
        for step in range(1, max_halvings + 1):
            t *= 0.5
            v_min = 0.5 * selector_v(scan.I_prime[0], times[-1])
            if _kernel_condition(base, t, v_min, J) and _decay_condition(base, t, times, xs):
                break
        else:
            raise SearchFailure(
                f"no admissible t_{J} within {max_halvings} halvings",
                {"J": J, "times": list(times), "last_t": t})
        times.append(t)
        halvings.append(step)

    local = np.zeros((K, xs.size))
    rel = np.linspace(-v_spread, v_spread, n_v)
    for k, t_k in enumerate(times, start=1):
        for ix, x in enumerate(xs):
            best = 0.0
            for v in selector_v(x, t_k) * (1.0 + rel):
                X = x * math.sqrt(1.0 + v * v)
                total, slack = 0.0j, 0.0
                for j, t_j in enumerate(times, start=1):
                    value, bound = free_value_ft(base, t_j, 0.5 * v, X)
                    if value is None:
                        slack += j * bound
                    else:
                        total += j * value
                best = max(best, abs(total) - slack)
            local[k - 1, ix] = best
    observed = local.min(axis=1).tolist()
    predicted = [scan.c * k - sum(j * 2.0 ** -j for j in range(1, K + 1) if j != k)
                 for k in range(1, K + 1)]
    terms = [sobolev_norm_fourier(ft_family(base, t_j), s) for t_j in times]
    return DivergenceReport(
        scan=scan, times=times, halvings=halvings, x=xs, local_sup=local,
        observed=observed, predicted=predicted, s=float(s), sobolev_terms=terms,
        sobolev_bound=float(sum(j * n for j, n in enumerate(terms, start=1))),
        schedule_sum=float(sum(j * t ** (0.5 - 2.0 * s) for j, t in enumerate(times, start=1))),
    )


# ---------------------------------------------------------------------------
# Frequency bumps translated to x0


def _default_tau():
    raw = bump_profile(-1.0, 1.0)
    return bump_profile(-1.0, 1.0, 1.0 / raw.integral())


def _bump_free_value(tau, x0, v, X, panels=64):
    """``L_{iv/2} f(X)`` for ``f^ = 2 pi e^{-i x0 xi} tau``: ``int e^{-iv xi^2/2 + i(X-x0) xi} tau``."""
    xi, w = tau.nodes(panels)
    wt = w * tau(xi)
    phase = np.multiply.outer(np.asarray(v), -0.5 * xi * xi) \
        + np.multiply.outer(np.asarray(X) - x0, xi)
    return np.exp(1j * phase) @ wt


def _bump_on_grid(tau, x0, reach=1000.0, spacing=0.5, n_xi=8193):
    """Samples of f on a grid covering ``x0 +- reach``; f is band-limited to (-1, 1)."""
    grid = Grid.with_spacing(x0 + reach, spacing)
    lo, hi = tau.support
    xi = np.linspace(lo, hi, n_xi)
    wt = tau(xi) * (xi[1] - xi[0])
    # f(x) = int tau(xi) exp(i (x - x0) xi) dxi, trapezoid in xi (tau is flat at the ends)
    vals = _fourier_sum(xi, wt * np.exp(-1j * x0 * xi), grid.points, sign=1.0)
    return GridFunction(grid, vals)


@dataclass
class BumpReport:
    x0: float
    min_real: float  # min over the interval of Re L_{iv(x)/2} f(x0)
    min_real_perturbed: float  # same with v(x) moved by +-perturb
    lower_bound: float  # cos(1/2) * int tau
    maximal_lp: dict  # p -> lower estimate of ||Mf||_p from the interval
    sobolev: float
    s: float

    def as_dict(self):
        return {"x0": self.x0, "min_real": self.min_real,
                "min_real_perturbed": self.min_real_perturbed,
                "lower_bound": self.lower_bound,
                "maximal_lp": {str(k): v for k, v in self.maximal_lp.items()},
                "sobolev": self.sobolev, "s": self.s}


def theorem3_bump(x0, tau=None, p_values=(2.0, 4.0), n_x=256, perturb=0.05, s=0.25,
                  with_sobolev=True):
    """Translated frequency bump: lower bound on ``(x0/sqrt2, x0)`` and ``||Mf||_p`` growth.

    ``f^(xi) = 2 pi e^{-i x0 xi} tau(xi)``. On the interval, the selector
    ``v(x) = sqrt((x0/x)^2 - 1)`` brings ``x sqrt(1+v^2)`` back to x0, where
    the free flow equals ``int exp(-i v xi^2/2) tau``. Modified selectors
    moving the evaluation point to ``x0 + eta`` with ``|eta| <= perturb``
    feed the maximal-function estimate.
    """
    tau = tau or _default_tau()
    lo, hi = tau.support
    if lo < -1.0 or hi > 1.0:
        raise PreconditionError(f"tau must be supported in (-1, 1), got {tau.support}")
    probe = np.linspace(lo, hi, 1001)
    if np.any(tau(probe) < 0):
        raise PreconditionError("tau must be nonnegative")
    if not x0 > 2.0:
        raise PreconditionError(f"x0 must exceed 2, got {x0}")
    a = x0 / math.sqrt(2.0)
    dx = (x0 - a) / n_x
    x = a + dx * (np.arange(n_x) + 0.5)
    v = np.sqrt((x0 / x) ** 2 - 1.0)
    if np.any((v <= 0) | (v >= 1)):
        raise PreconditionError("selector v(x) left (0, 1)")
    base_vals = _bump_free_value(tau, x0, v, np.full_like(x, x0))
    min_real = float(np.min(base_vals.real))

    # slightly modified selectors: v' lands the evaluation point at x0 + eta
    eta = np.linspace(-perturb, perturb, 5)
    vp = np.sqrt(np.clip(((x0 + eta[None, :]) / x[:, None]) ** 2 - 1.0, 1e-24, 1.0 - 1e-12))
    Xp = x[:, None] * np.sqrt(1.0 + vp * vp)
    pert = _bump_free_value(tau, x0, vp.ravel(), Xp.ravel()).reshape(vp.shape)
    min_pert = float(np.min(pert.real))
    mf = np.max((1.0 + vp * vp) ** 0.25 * np.abs(pert), axis=1)
    lp = {float(p): float((np.sum(mf ** p) * dx) ** (1.0 / p)) for p in p_values}
    sob = sobolev_norm_fourier(_bump_on_grid(tau, x0), s) if with_sobolev else float("nan")
    return BumpReport(float(x0), min_real, min_pert, math.cos(0.5) * tau.integral(),
                      lp, float(sob), float(s))


def bump_growth(x0_values=(16.0, 64.0, 256.0, 1024.0), p_values=(2.0, 4.0), **kw):
    """Fitted exponent of ``x0 -> ||Mf||_p`` (expected ``1/p``) plus the per-x0 reports."""
    reports = [theorem3_bump(x0, p_values=p_values, **kw) for x0 in x0_values]
    logs = np.log(np.asarray(x0_values, dtype=float))
    slopes = {}
    for p in p_values:
        vals = np.log([r.maximal_lp[float(p)] for r in reports])
        slopes[float(p)] = float(np.polyfit(logs, vals, 1)[0])
    return slopes, reports


# ---------------------------------------------------------------------------
# Logarithmic frequency tail


def _smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def logtail_tau(xi):
    """``S(xi) xi^{-1} (log xi)^{-2/3}`` with S a smooth step from 1.5 to 2."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape)
    on = xi > 1.5
    x = xi[on]
    out[on] = _smooth_step((x - 1.5) / 0.5) / (x * np.log(x) ** (2.0 / 3.0))
    return out


def _tail_ray(v, start, shift=0.0):
    """``int_start^inf exp(-i v xi^2/2 + i shift xi) tau(xi) dxi`` along ``xi = start - i s``."""
    slope = v * start - shift
    if slope <= 0:
        raise PreconditionError("linear phase too large for the contour split")
    s = _lag_x / slope
    z = start - 1j * s
    g = np.exp(0.5j * v * s * s) / (z * np.log(z) ** (2.0 / 3.0))
    lead = np.exp(-0.5j * v * start * start + 1j * shift * start)
    return -1j * lead / slope * np.sum(_lag_w * g)


def logtail_value(v, cutoff=math.inf, shift=0.0):
    """``lim_R int_0^R exp(-i v xi^2/2 + i shift xi) tau(xi) dxi``, or up to ``cutoff``."""
    if v <= 0:
        raise PreconditionError(f"v must be positive, got {v}")
    split = max(4.0, 16.0 / math.sqrt(v))
    end = min(split, cutoff)
    # log-spaced panels follow the 1/(xi log^{2/3} xi) profile
    edges = np.concatenate([np.linspace(1.5, 2.0, 9)[:-1],
                            np.geomspace(2.0, max(end, 2.0 + 1e-12), 64)])
    edges = edges[edges <= end]
    if edges[-1] < end:
        edges = np.append(edges, end)
    total = 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        xi = 0.5 * (a + b) + 0.5 * (b - a) * _gl_x
        phase = -0.5 * v * xi * xi + shift * xi
        total += 0.5 * (b - a) * np.sum(_gl_w * np.exp(1j * phase) * logtail_tau(xi))
    if cutoff > split:
        total += _tail_ray(v, split, shift)
        if math.isfinite(cutoff):
            total -= _tail_ray(v, cutoff, shift)
    return complex(total)


def _tau_sq_integral(a, b=math.inf):
    """``int_a^b tau^2`` for ``a >= 2`` in the variable ``u = log xi``."""
    ua, ub = math.log(a), (math.log(b) if math.isfinite(b) else math.inf)
    return integrate.quad(lambda u: math.exp(-u) * u ** (-4.0 / 3.0), ua, ub,
                          epsabs=0.0, epsrel=1e-12, limit=200)[0]


def _l2_cutoff(rel_tol=1e-6, cap=1e300):
    """Smallest frequency whose L2 tail of tau is below ``rel_tol`` of the norm."""
    head = integrate.quad(lambda x: logtail_tau(np.array([x]))[0] ** 2, 1.5, 2.0)[0]
    total = head + _tau_sq_integral(2.0)
    target = (rel_tol ** 2) * total
    lo, hi = 2.0, 4.0
    while _tau_sq_integral(hi) > target:
        lo, hi = hi, hi * hi
        if hi > cap:
            raise TruncationError(f"L2 tail of tau stays above {rel_tol:g} up to {cap:g}")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if _tau_sq_integral(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-9:
            break
    return hi


def logtail_sobolev_norm(s=0.5, xi_max=math.inf):
    """``||f||_{W^s} = sqrt(2 pi int tau^2 (1+xi^2)^s)`` up to ``xi_max``."""
    head = integrate.quad(lambda x: logtail_tau(np.array([x]))[0] ** 2 * (1 + x * x) ** s,
                          1.5, 2.0, epsabs=0.0, epsrel=1e-12)[0]
    ub = math.log(xi_max) if math.isfinite(xi_max) else math.inf
    # tau^2 (1+xi^2)^s dxi = u^{-4/3} e^{(2s-1)u} (1 + e^{-2u})^s du with xi = e^u
    tail = integrate.quad(
        lambda u: u ** (-4.0 / 3.0) * math.exp((2.0 * s - 1.0) * u) * (1.0 + math.exp(-2.0 * u)) ** s,
        math.log(2.0), ub, epsabs=0.0, epsrel=1e-10, limit=500)[0]
    return math.sqrt(2.0 * math.pi * (head + tail))


@dataclass
class LogtailReport:
    v0: float
    x0: float
    I: tuple
    min_modulus: float
    min_modulus_perturbed: float
    ratio: float  # min_modulus / (log 1/v0)^{1/3}
    cutoff: float
    truncation_gap: float  # max change of the value when truncated at the cutoff

    def as_dict(self):
        return {"v0": self.v0, "x0": self.x0, "I": list(self.I),
                "min_modulus": self.min_modulus,
                "min_modulus_perturbed": self.min_modulus_perturbed,
                "ratio": self.ratio, "cutoff": self.cutoff,
                "truncation_gap": self.truncation_gap}


def theorem3_logtail(v0, x0=4.0, n_x=64, perturb=0.01, rel_tol=1e-6):
    """Logarithmic tail: ``|L_{iv(x)/2} f(x sqrt(1+v(x)^2))|`` on the interval I.

    The free value reduces to ``int exp(-i v xi^2/2) tau`` with
    ``v in (v0/2, v0)``; the oscillatory tail is evaluated exactly by a
    contour rotation. The L2 cutoff frequency is reported with the change
    the truncation would cause.
    """
    if not 0.0 < v0 < 1e-2:
        raise PreconditionError(f"v0 must lie in (0, 1e-2), got {v0}")
    if not x0 > 0:
        raise PreconditionError(f"x0 must be positive, got {x0}")
    I = (x0 / math.sqrt(1.0 + v0 * v0), x0 / math.sqrt(1.0 + 0.25 * v0 * v0))
    x = I[0] + (I[1] - I[0]) * (np.arange(n_x) + 0.5) / n_x
    v = np.sqrt((x0 / x) ** 2 - 1.0)
    cutoff = _l2_cutoff(rel_tol)
    vals = np.array([logtail_value(vi) for vi in v])
    gap = max(abs(logtail_value(vi, cutoff) - val) for vi, val in zip(v[[0, -1]], vals[[0, -1]]))
    # a perturbed v no longer maps x back to x0; the offset enters as a linear phase
    pert = []
    for vi, xi_ in zip(v, x):
        for r in (-perturb, perturb):
            vp = vi * (1.0 + r)
            shift = xi_ * math.sqrt(1.0 + vp * vp) - x0
            pert.append(abs(logtail_value(vp, shift=shift)))
    m = float(np.min(np.abs(vals)))
    return LogtailReport(float(v0), float(x0), I, m, float(min(pert)),
                         m / math.log(1.0 / v0) ** (1.0 / 3.0), cutoff, float(gap))


# ---------------------------------------------------------------------------
# Sobolev norms in the Hermite scale


def sobolev_comparison(f, s, n_max=None):
    """``(||f||_{W^s}, ||f||_{W_H^s}, ratio)`` for a decaying grid function."""
    if n_max is None:
        n_max = max_representable_degree(f.grid)
    fourier = sobolev_norm_fourier(f, s)
    hermite = sobolev_norm_hermite(analyze(f, n_max), s)
    return fourier, hermite, hermite / fourier if fourier else math.nan
