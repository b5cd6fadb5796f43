"""Oscillatory integrals ``int_J exp(i(a t + b t^2)) |t|^{-1/2} dt``.

Each half-line piece is reduced to ``int_alpha^beta`` over ``t > 0`` with
``b >= 0`` (conjugation handles ``b < 0``). The interval is cut into

* direct pieces (near 0, and around the stationary point ``-a/2b``),
  integrated by Gauss-Legendre in ``u = sqrt(t)``, which removes the
  ``t^{-1/2}`` singularity;
* monotone-phase pieces, integrated exactly by deforming onto vertical
  rays ``t0 + i*sigma*s`` where the integrand decays like
  ``exp(-s |phi'(t0)|)``. No truncation or tail estimate is needed, and
  infinite endpoints contribute nothing.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import mpmath
import numpy as np
from scipy.special import roots_laguerre

from .errors import ConvergenceError, PreconditionError

__all__ = [
    "OscParams",
    "osc_integral",
    "bound_denominator",
    "bound_ratio",
    "SweepResult",
    "bound_sweep",
    "default_sweep_values",
    "subinterval_ratios",
]

# Phase swept by the direct window at the origin.
_ORIGIN_PHASE = 100.0
# Half-width of the stationary window in units of b^{-1/2}.
_STAT_WIDTH = 8.0
_GL_NODES = 24
_LAG_NODES = 96

_gl_x, _gl_w = np.polynomial.legendre.leggauss(_GL_NODES)
_lag_x, _lag_w = roots_laguerre(_LAG_NODES)


@dataclass(frozen=True)
class OscParams:
    """Coefficients of the phase ``a t + b t^2`` and the interval ``J``."""

    a: float
    b: float
    J: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise PreconditionError(f"a and b must be finite, got a={a!r}, b={b!r}")
        if a == 0.0 and b == 0.0:
            raise PreconditionError("(a, b) must not both be zero")
        lo, hi = (float(v) for v in self.J)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise PreconditionError(f"J must satisfy lo < hi, got {self.J!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "J", (lo, hi))


def _expi(phase):
    """``exp(i phase)`` for an exact rational phase, reduced mod 2 pi in high precision."""
    with mpmath.workdps(30 + int(abs(phase)).bit_length() // 3):
        return complex(mpmath.expj(mpmath.mpf(phase.numerator) / phase.denominator))


# Points on (0, inf) are pairs (star, off): t = off, or t = t* + off when
# ``star`` is set. Far from the origin the phase is huge (a^2/4b at t*) and
# t* + off may not even be representable, so both the phase and the slope
# are formed from the offset.


class _Half:
    """``int t^{-1/2} exp(i(a t + b t^2))`` pieces on (0, inf) for ``b >= 0``."""

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.fa, self.fb = Fraction(a), Fraction(b)
        self.t_star = -a / (2.0 * b) if b > 0 and a < 0 else None

    def t(self, pt):
        star, off = pt
        return self.t_star + off if star else off

    def slope(self, pt):
        star, off = pt
        return 2.0 * self.b * off if star else self.a + 2.0 * self.b * off

    def unit_phase(self, pt):
        star, off = pt
        fo = Fraction(off)
        if star:
            phase = -self.fa * self.fa / (4 * self.fb) + self.fb * fo * fo
        else:
            phase = self.fa * fo + self.fb * fo * fo
        return _expi(phase)

    def ray(self, pt):
        """Integral from ``pt`` to infinity along the vertical descent ray."""
        if math.isinf(pt[1]):
            return 0.0j
        slope = self.slope(pt)
        sigma = 1.0 if slope > 0 else -1.0
        k = abs(slope)
        s = _lag_x / k
        z = self.t(pt) + 1j * sigma * s
        vals = np.exp(-1j * self.b * s * s) / np.sqrt(z)
        return 1j * sigma * self.unit_phase(pt) / k * np.sum(_lag_w * vals)

    def origin_window(self, t2):
        """``2 int_0^{sqrt t2} exp(i(a u^2 + b u^4)) du`` by composite Gauss-Legendre."""
        a, b = self.a, self.b
        root = math.sqrt(t2)
        probe = np.linspace(0.0, root, 257)
        variation = float(np.sum(np.abs(np.diff(a * probe**2 + b * probe**4))))
        u, w = _panels(0.0, root, int(math.ceil(variation / 3.0)) + 2)
        return 2.0 * np.sum(w * np.exp(1j * (a * u * u + b * u**4)))

    def window(self, p1, p2):
        """Gauss-Legendre between two points away from the origin, in the offset variable."""
        star, o1 = p1
        o2 = p2[1]
        if o2 <= o1:
            return 0.0j
        b = self.b
        base = self.t_star if star else 0.0
        # phase relative to p1: (o - o1)(slope(p1) + b (o - o1))
        variation = abs(self.slope(p1)) * (o2 - o1) + b * (o2 - o1) ** 2
        o, w = _panels(o1, o2, int(math.ceil(variation / 3.0)) + 2)
        d = o - o1
        rel = d * (self.slope(p1) + b * d)
        return self.unit_phase(p1) * np.sum(w * np.exp(1j * rel) / np.sqrt(base + o))

    def pieces(self):
        """Split (0, inf) into an origin window, stationary window and descent rays."""
        a, b = self.a, self.b
        # positive root of |a| d + b d^2 = phase, in the form free of cancellation
        d0 = 2.0 * _ORIGIN_PHASE / (abs(a) + math.sqrt(a * a + 4.0 * b * _ORIGIN_PHASE))
        if not np.isfinite(d0) or d0 <= 0:
            raise ConvergenceError(
                f"cannot place the origin window for a={a:g}, b={b:g}", achieved=d0)
        inf = (False, math.inf)
        if self.t_star is None:
            return [("origin", (False, 0.0), (False, d0)), ("ray", (False, d0), inf)]
        w = _STAT_WIDTH / math.sqrt(b)
        if self.t_star - w <= 2.0 * d0:
            top = max(self.t_star + w, d0)
            return [("origin", (False, 0.0), (False, top)), ("ray", (False, top), inf)]
        return [("origin", (False, 0.0), (False, d0)),
                ("ray", (False, d0), (True, -w)),
                ("window", (True, -w), (True, w)),
                ("ray", (True, w), inf)]

    def point(self, T):
        """Representation of the finite endpoint ``T``."""
        if self.t_star is not None and T >= 0.5 * self.t_star:
            return (True, T - self.t_star)
        return (False, T)

    def integral(self, T):
        """``int_0^T`` for ``0 < T <= inf``."""
        total = 0.0j
        for kind, p1, p2 in self.pieces():
            if self.t(p1) >= T:
                break
            if self.t(p2) > T:
                p2 = self.point(T)
                if p1[0] and not p2[0]:
                    p2 = (True, T - self.t_star)
            if kind == "origin":
                total += self.origin_window(self.t(p2))
            elif kind == "window":
                total += self.window(p1, p2)
            else:
                total += self.ray(p1) - self.ray(p2)
        return total


def _panels(lo, hi, panels):
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _gl_x[None, :]).ravel()
    w = (half[:, None] * _gl_w[None, :]).ravel()
    return x, w


def _half_line(a, b, T):
    """``int_0^T exp(i(a t + b t^2)) t^{-1/2} dt`` for ``0 <= T <= inf``."""
    if T <= 0:
        return 0.0j
    if a == 0.0 and b == 0.0:
        if math.isinf(T):
            raise ConvergenceError("integral of t^{-1/2} over (0, inf) diverges",
                                   achieved=math.inf)
        return 2.0 * math.sqrt(T) + 0.0j
    if b < 0:
        return np.conj(_half_line(-a, -b, T))
    return _Half(a, b).integral(T)


def _positive_part(a, b, lo, hi):
    """``int_{(lo,hi) and (0,inf)}``."""
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0j
    return _half_line(a, b, hi) - _half_line(a, b, lo)


def osc_integral(params):
    """Value of ``int_J exp(i(a t + b t^2)) |t|^{-1/2} dt``."""
    if not isinstance(params, OscParams):
        raise PreconditionError("osc_integral expects an OscParams instance")
    a, b = params.a, params.b
    lo, hi = params.J
    # t -> -t maps the negative half onto the positive one with a -> -a.
    value = _positive_part(a, b, lo, hi) + _positive_part(-a, b, -hi, -lo)
    if not np.isfinite(value):
        raise ConvergenceError(f"non-finite value for a={a:g}, b={b:g}", achieved=value)
    return complex(value)


def bound_denominator(a, b):
    """``min(|a|^{-1/2}, |b|^{-1/4})``, dropping the term of a zero coefficient."""
    terms = []
    if a != 0:
        terms.append(abs(a) ** -0.5)
    if b != 0:
        terms.append(abs(b) ** -0.25)
    if not terms:
        raise PreconditionError("(a, b) must not both be zero")
    return min(terms)


def bound_ratio(a, b, J=(-math.inf, math.inf)):
    return abs(osc_integral(OscParams(a, b, J))) / bound_denominator(a, b)


def default_sweep_values():
    k = np.arange(-2, 5, dtype=float)
    pos = 10.0**k
    return np.concatenate([-pos[::-1], pos])


@dataclass
class SweepResult:
    a_values: np.ndarray
    b_values: np.ndarray
    ratios: np.ndarray  # shape (len(a_values), len(b_values))
    max_ratio: float
    argmax: tuple  # (a, b) at the maximum
    interior: bool
    extensions: int

    def rows(self):
        for i, a in enumerate(self.a_values):
            for j, b in enumerate(self.b_values):
                yield float(a), float(b), float(self.ratios[i, j])


def _scaled_a(a, b):
    """Scale-invariant coordinate ``|a| / sqrt|b|`` (ratio depends only on it and signs)."""
    return abs(a) / math.sqrt(abs(b)) if b != 0 else math.inf


def _evaluate(a_values, b_values, J):
    ratios = np.empty((a_values.size, b_values.size))
    for i, a in enumerate(a_values):
        for j, b in enumerate(b_values):
            ratios[i, j] = bound_ratio(float(a), float(b), J)
    return ratios


def bound_sweep(a_values, b_values, J=(-math.inf, math.inf), auto_extend=True, max_extensions=4):
    """Ratios ``|I| / min(|a|^{-1/2}, |b|^{-1/4})`` over a grid of (a, b).

    The maximum counts as interior when its scale-invariant coordinate
    ``|a|/sqrt|b|`` lies strictly inside the range covered by the sweep.
    Otherwise, with ``auto_extend``, the a-range is widened by a decade on
    the offending side and the sweep repeated.
    """
    a_values = np.asarray(a_values, dtype=float)
    b_values = np.asarray(b_values, dtype=float)
    if a_values.ndim != 1 or b_values.ndim != 1 or not a_values.size or not b_values.size:
        raise PreconditionError("a_values and b_values must be non-empty 1-D arrays")
    if np.any((a_values[:, None] == 0) & (b_values[None, :] == 0)):
        raise PreconditionError("sweep grid contains (a, b) = (0, 0)")
    extensions = 0
    while True:
        ratios = _evaluate(a_values, b_values, J)
        i, j = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
        scaled = np.array([[_scaled_a(a, b) for b in b_values] for a in a_values])
        finite = scaled[np.isfinite(scaled)]
        s = scaled[i, j]
        lo, hi = (finite.min(), finite.max()) if finite.size else (s, s)
        interior = bool(np.isfinite(s) and lo < s < hi)
        if interior or not auto_extend or extensions >= max_extensions:
            break
        nonzero = np.abs(a_values[a_values != 0])
        if s <= lo and nonzero.size:
            new = nonzero.min() / 10.0
        else:
            new = (nonzero.max() if nonzero.size else 1.0) * 10.0
        a_values = np.unique(np.concatenate([a_values, [-new, new]]))
        extensions += 1
    return SweepResult(a_values, b_values, ratios, float(ratios[i, j]),
                       (float(a_values[i]), float(b_values[j])), interior, extensions)


def subinterval_ratios(a_values, b_values, intervals):
    """Largest bound ratio over sub-intervals, for each interval in ``intervals``."""
    out = []
    for J in intervals:
        out.append(float(_evaluate(np.asarray(a_values, float), np.asarray(b_values, float),
                                   tuple(J)).max()))
    return out
