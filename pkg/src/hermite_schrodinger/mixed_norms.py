"""Spatial L^p norms, mixed L^q_t L^p_x norms and the Strichartz equality.

For ``1/p + 2/q = 1/2`` the Hermite flow over ``t in (0, pi/4)`` and the free
flow over ``v in (0, inf)`` have equal mixed norms. :func:`strichartz_check`
computes the two sides through unrelated pipelines:

* Hermite side: spectral propagation on a uniform t-grid (closed trapezoid);
* free side: ``||exp(iv d^2/dx^2) f||_p`` on Gauss-Legendre panels in v up to
  ``v_max`` plus an analytic tail from the far-field limit
  ``||L_{iv} f||_p ~ (4 pi v)^{-1/2} (2v)^{1/p} ||f^||_p``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PreconditionError, TruncationError
from .hermite_basis import (
    Grid,
    analyze,
    eval_hermite,
    max_representable_degree,
    _padded_spectrum,
)
from .propagators import (
    DEFAULT_FREQ_GRID,
    _fourier_sum,
    effective_radius,
    fourier_forward,
    free_from_spectrum,
    live_slice,
    propagate_mehler,
)

__all__ = [
    "MixedNormSpec",
    "StrichartzResult",
    "lp_norm",
    "mixed_norm",
    "change_of_variables_weight",
    "is_admissible",
    "free_lp_norm",
    "hermite_side_integral",
    "free_side_integral",
    "strichartz_check",
    "substitution_consistency",
    "periodicity_residual",
]

INF = math.inf
V_MAX = 200.0
# Below this free time the frequency-sum route is used, above it the far-field one.
FAR_FIELD_SWITCH = 0.25


def _inv(p):
    return 0.0 if p == INF else 1.0 / p


def _check_exponent(name, p):
    if not (p == INF or 1.0 <= p < INF):
        raise PreconditionError(f"{name} must lie in [1, inf], got {p!r}")


@dataclass(frozen=True)
class MixedNormSpec:
    p: float
    q: float
    t_interval: tuple = (0.0, math.pi / 4)
    n_t: int = 257

    def __post_init__(self):
        _check_exponent("p", self.p)
        _check_exponent("q", self.q)
        lo, hi = self.t_interval
        if not lo < hi:
            raise ConfigError(f"t_interval must satisfy t_lo < t_hi, got {self.t_interval}")
        if self.n_t < 2:
            raise ConfigError(f"n_t must be >= 2, got {self.n_t}")

    @property
    def times(self):
        return np.linspace(self.t_interval[0], self.t_interval[1], self.n_t)


def _lp_of_samples(values, weights, p):
    mag = np.abs(values)
    if p == INF:
        return float(mag.max(axis=-1)) if mag.ndim == 1 else mag.max(axis=-1)
    return np.sum(weights * mag ** p, axis=-1) ** (1.0 / p)


def lp_norm(f, p):
    """Trapezoid ``(int |f|^p)^{1/p}``; ``p = inf`` is the grid maximum."""
    _check_exponent("p", p)
    return float(_lp_of_samples(f.values, f.grid.weights, p))


def _time_reduce(norms, times, q):
    norms = np.asarray(norms, dtype=float)
    if q == INF:
        return float(norms.max())
    return float(np.trapezoid(norms ** q, times) ** (1.0 / q))


def mixed_norm(u, spec):
    """``L^q_t L^p_x`` norm of a family sampled at ``spec.times``."""
    if len(u) != spec.n_t:
        raise ConfigError(f"family has {len(u)} members, spec expects n_t = {spec.n_t}")
    norms = [lp_norm(g, spec.p) for g in u]
    return _time_reduce(norms, spec.times, spec.q)


def change_of_variables_weight(v, p, q, d=1):
    """``(1+v^2)^{-q(d/p + 2/q - d/2)/2}``.

    For ``q = inf`` this returns the limit of the q-th root,
    ``(1+v^2)^{-(d/p - d/2)/2}``, i.e. the factor relating the sup-in-time
    norms of the two flows.
    """
    if np.any(np.asarray(v) < 0):
        raise PreconditionError("v must be >= 0")
    v = np.asarray(v, dtype=float)
    if q == INF:
        expo = -(d * _inv(p) - d / 2.0) / 2.0
    else:
        expo = -q * (d * _inv(p) + 2.0 / q - d / 2.0) / 2.0
    out = (1.0 + v * v) ** expo
    return float(out) if out.ndim == 0 else out


def is_admissible(p, q, d=1, tol=1e-12):
    return abs(d * _inv(p) + 2.0 * _inv(q) - d / 2.0) <= tol


def hermite_side_integral(f, p, q, n_t=257, n_max=None):
    """``||exp(-itH) f||_{L^q((0,pi/4); L^p)}`` on a closed uniform t-grid.

    The flow is spectral: ``f`` is projected onto ``h_0..h_{n_max}`` once and
    each time sample is a synthesis. Returns (norm, per-time L^p norms, times).
    """
    if n_max is None:
        n_max = max_representable_degree(f.grid)
    c = analyze(f, n_max)
    basis = eval_hermite(n_max, f.grid)
    times = np.linspace(0.0, math.pi / 4, n_t)
    phases = np.exp(-1j * np.outer(times, 2.0 * np.arange(n_max + 1) + 1.0))
    fields = (phases * c.coeffs) @ basis
    norms = _lp_of_samples(fields, f.grid.weights, p)
    if np.ndim(norms) == 0:
        norms = np.abs(fields).max(axis=1)
    return _time_reduce(norms, times, q), np.asarray(norms), times


def _far_field_norm(x, wf, s, p, r_f, band):
    """``||L_{is} f||_p`` via ``L_{is}f(x) = c s^{-1/2} e^{ix^2/4s} g^(x/2s)``, ``g = e^{iy^2/4s} f``.

    ``x``/``wf`` are the grid nodes and trapezoid-weighted samples where f is non-negligible.
    """
    reach = band + r_f / (2.0 * s) + 2.0
    dxi = np.pi / (max(p if p != INF else 8.0, 2.0) * (r_f + 1.0))
    xi = Grid.with_spacing(reach, dxi)
    g = wf * np.exp(0.25j * x * x / s)
    ghat = _fourier_sum(x, g, xi.points)
    if p == INF:
        return float((4.0 * np.pi * s) ** -0.5 * np.abs(ghat).max())
    integral = np.sum(xi.weights * np.abs(ghat) ** p)
    return float(((4.0 * np.pi * s) ** (-p / 2.0) * 2.0 * s * integral) ** (1.0 / p))


def _near_field_norm(fhat, s, p, r_f, band):
    """``||L_{is} f||_p`` by the direct frequency sum on an x-grid wide enough for the spread."""
    reach = r_f + 2.0 * s * band + 2.0
    dx = np.pi / (max(p if p != INF else 8.0, 2.0) * band)
    xg = Grid.with_spacing(reach, dx)
    keep = live_slice(fhat.values, 1e-16)
    wfhat = fhat.freq_grid.weights[keep] * fhat.values[keep]
    u = free_from_spectrum(fhat.xi[keep], wfhat, s, xg.points)
    return float(_lp_of_samples(u, xg.weights, p))


class _FreeNorms:
    """Caches what ``||L_{is} f||_p`` needs for many values of s."""

    def __init__(self, f, p, freq_grid=DEFAULT_FREQ_GRID):
        self.f = f
        self.p = p
        self.r_f = effective_radius(f.grid.points, f.values, 1e-15)
        xi, spec, dxi = _padded_spectrum(f, 4)
        self.band = effective_radius(xi, spec, 1e-15) + 1.0
        self.fhat = fourier_forward(f, freq_grid)
        self.fhat_lp = self._fhat_lp(xi, spec, dxi)
        live = live_slice(f.values)
        self.x_live = f.grid.points[live]
        self.wf_live = (f.grid.weights * f.values)[live]

    def _fhat_lp(self, xi, spec, dxi):
        order = np.argsort(xi)
        mag = np.abs(spec[order])
        if self.p == INF:
            return float(mag.max())
        return float((np.sum(mag ** self.p) * dxi) ** (1.0 / self.p))

    def __call__(self, s):
        if s <= 0:
            return lp_norm(self.f, self.p)
        if s < FAR_FIELD_SWITCH:
            return _near_field_norm(self.fhat, s, self.p, self.r_f, self.band)
        return _far_field_norm(self.x_live, self.wf_live, s, self.p, self.r_f, self.band)

    def far_field_constant(self):
        """``lim_{s->inf} s^{1/2 - 1/p} ||L_{is} f||_p``."""
        return (4.0 * np.pi) ** -0.5 * 2.0 ** _inv(self.p) * self.fhat_lp


def free_lp_norm(f, s, p):
    """``||exp(is d^2/dx^2) f||_p`` for a single free time ``s >= 0``."""
    _check_exponent("p", p)
    return _FreeNorms(f, p)(s)


def _gauss_panels(v_max, first=0.125, nodes=16):
    edges = [0.0, first]
    while edges[-1] * 2 < v_max:
        edges.append(edges[-1] * 2)
    edges.append(v_max)
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    pts, wts = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        pts.append(0.5 * (b - a) * gx + 0.5 * (b + a))
        wts.append(0.5 * (b - a) * gw)
    return np.concatenate(pts), np.concatenate(wts)


def free_side_integral(f, p, q, v_max=V_MAX, time_scale=1.0, weight=None, nodes=16):
    """``int_0^inf w(v) ||L_{i time_scale v} f||_p^q dv`` with an analytic tail.

    The integrand must decay like ``v^-2`` (true on the admissible line and for
    the weighted substitution integrand). Returns ``(value, tail, details)``;
    for ``q = inf`` the supremum over the v nodes is returned and tail is 0.
    """
    norms_of = _FreeNorms(f, p)
    v, w = _gauss_panels(v_max, nodes=nodes)
    norms = np.array([norms_of(time_scale * vi) for vi in v])
    wt = np.ones_like(v) if weight is None else weight(v)
    details = {"v": v, "norms": norms}
    if q == INF:
        vals = norms * wt
        return float(max(vals.max(), lp_norm(f, p))), 0.0, details
    integrand = wt * norms ** q
    head = float(np.sum(w * integrand))
    # integrand ~ C v^-2: C from the far-field limit of the free flow
    c_inf = (norms_of.far_field_constant() * time_scale ** (_inv(p) - 0.5)) ** q
    w_inf = 1.0
    if weight is not None:
        # leading coefficient of weight(v) ~ w_inf * v^(q(1/2 - 1/p) - 2)
        big = 1e8
        w_inf = float(weight(np.array([big]))[0]) / big ** (q * (0.5 - _inv(p)) - 2.0)
    c_tail = c_inf * w_inf
    tail = c_tail / v_max
    details.update(c_tail=c_tail, c_data=float(integrand[-1] * v[-1] ** 2))
    return head + tail, tail, details


@dataclass
class StrichartzResult:
    lhs: float
    rhs: float
    rel_err: float
    p: float
    q: float
    tail: float
    details: dict = field(default_factory=dict, repr=False)

    def as_dict(self):
        return {"p": self.p, "q": self.q, "lhs": self.lhs, "rhs": self.rhs,
                "rel_err": self.rel_err, "tail": self.tail}


def strichartz_check(f, p, q, n_t=257, v_max=V_MAX, tail_tol=0.01, nodes=16):
    """Both sides of ``||e^{-itH}f||_{L^q(0,pi/4;L^p)} = ||e^{it Lap}f||_{L^q(0,inf;L^p)}``.

    Raises PreconditionError off the line ``1/p + 2/q = 1/2`` and
    TruncationError when the analytic tail exceeds ``tail_tol`` of the
    free-side integral.
    """
    _check_exponent("p", p)
    _check_exponent("q", q)
    if not is_admissible(p, q):
        raise PreconditionError(
            f"(p, q) = ({p}, {q}) violates 1/p + 2/q = 1/2 "
            f"(got {_inv(p) + 2.0 * _inv(q):.6g})")
    lhs, _, _ = hermite_side_integral(f, p, q, n_t=n_t)
    rhs_q, tail, details = free_side_integral(f, p, q, v_max=v_max, nodes=nodes)
    if q == INF:
        rhs = rhs_q
        rel_tail = 0.0
    else:
        rhs = rhs_q ** (1.0 / q)
        rel_tail = tail / rhs_q if rhs_q > 0 else 0.0
    if rel_tail > tail_tol:
        raise TruncationError(
            f"free-side tail beyond v = {v_max} is {rel_tail:.2e} of the integral "
            f"(tolerance {tail_tol:.0e}); increase v_max")
    rel_err = abs(lhs - rhs) / rhs if rhs > 0 else 0.0
    return StrichartzResult(lhs, rhs, rel_err, p, q, tail, details)


def substitution_consistency(f, p, q, n_t=257, v_max=V_MAX, nodes=16):
    """Hermite-side ``int_0^{pi/4} ||K_{it}f||_p^q dt`` two ways.

    Directly on a t-grid, and as ``(1/2) int_0^inf ||L_{iv/2} f||_p^q w(v) dv``
    with ``w = change_of_variables_weight``; any finite ``q`` is allowed.
    Returns ``(direct, substituted, rel_diff)``.
    """
    if q == INF:
        raise PreconditionError("substitution consistency needs finite q")
    direct, _, _ = hermite_side_integral(f, p, q, n_t=n_t)
    direct_q = direct ** q
    val, _, _ = free_side_integral(
        f, p, q, v_max=v_max, time_scale=0.5, nodes=nodes,
        weight=lambda v: change_of_variables_weight(v, p, q))
    subst = 0.5 * val
    return direct_q, subst, abs(direct_q - subst) / abs(direct_q)


def periodicity_residual(f, p, times):
    """Largest relative change of ``||K_{it} f||_p`` under ``t -> t + pi/2`` and ``t -> -t``."""
    worst = 0.0
    for t in times:
        base = lp_norm(propagate_mehler(f, t), p)
        for other in (t + 0.5 * math.pi, -t):
            worst = max(worst, abs(lp_norm(propagate_mehler(f, other), p) - base) / base)
    return worst
