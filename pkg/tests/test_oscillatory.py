import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hermite_schrodinger.errors import PreconditionError
from hermite_schrodinger.oscillatory import (
    OscParams,
    bound_denominator,
    bound_ratio,
    bound_sweep,
    default_sweep_values,
    osc_integral,
    subinterval_ratios,
)

CEILING = 8.0


def half_line_oracle(a, b):
    """int_0^inf t^{-1/2} exp(i(a t + b t^2)) dt via the parabolic cylinder function D_{-1/2}."""
    # the phase a^2/4b must be resolved mod 2 pi, so precision grows with it
    digits = 30
    if a and b:
        digits += max(0, int(mp.log10(mp.mpf(a) ** 2 / abs(b))))
    with mp.workdps(digits):
        a, b = mp.mpf(a), mp.mpf(b)
        if b == 0:
            return mp.sqrt(mp.pi / abs(a)) * mp.expjpi(mp.sign(a) / 4)
        beta = mp.mpc(0, -b)
        gamma = mp.mpc(0, -a)
        return ((2 * beta) ** -0.25 * mp.gamma(0.5) * mp.exp(gamma ** 2 / (8 * beta))
                * mp.pcfd(-0.5, gamma / mp.sqrt(2 * beta)))


def line_oracle(a, b):
    return complex(half_line_oracle(a, b) + half_line_oracle(-a, b))


def finite_oracle(a, b, lo, hi):
    """Adaptive quadrature in u = sqrt|t| on each side of the origin."""
    def side(sign, end):
        if end <= 0:
            return mp.mpc(0)
        root = mp.sqrt(end)
        variation = abs(a) * end + abs(b) * end * end
        nodes = mp.linspace(0, root, int(variation) + 4)
        return 2 * mp.quad(lambda u: mp.expj(sign * a * u * u + b * u ** 4), nodes)
    with mp.workdps(20):
        pos = side(1, hi) - side(1, lo) if lo > 0 else side(1, hi) if hi > 0 else 0
        neg = side(-1, -lo) - side(-1, -hi) if hi < 0 else side(-1, -lo) if lo < 0 else 0
        return complex(pos + neg)


def test_spot_values():
    v = osc_integral(OscParams(0.0, 1.0))
    assert abs(v) == pytest.approx(math.gamma(0.25), abs=1e-10)
    assert math.atan2(v.imag, v.real) == pytest.approx(math.pi / 8, abs=1e-10)
    assert osc_integral(OscParams(1.0, 0.0)) == pytest.approx(math.sqrt(2 * math.pi), abs=1e-10)


@pytest.mark.parametrize("a, b", [(0, 0), (float("nan"), 1), (1, float("inf"))])
def test_invalid_coefficients(a, b):
    with pytest.raises(PreconditionError):
        OscParams(a, b)


@pytest.mark.parametrize("J", [(1.0, 1.0), (2.0, -1.0), (float("nan"), 1.0)])
def test_invalid_interval(J):
    with pytest.raises(PreconditionError):
        OscParams(1.0, 1.0, J)


def test_requires_params_object():
    with pytest.raises(PreconditionError):
        osc_integral((1.0, 1.0))


@pytest.mark.parametrize("a, b", [
    (3.0, -2.0), (-1000.0, 100.0), (-1000.0, -10000.0), (50.0, 0.01), (0.01, 50.0),
    (-7.0, 0.3), (1e4, 1e-2), (-1e4, 1e-2), (1e-2, -1e4), (-2.0, 0.0),
    # a far-away stationary point still contributes about sqrt(2 pi / |a|)
    (1.0, 1e-232), (3.0, -1e-232), (-2.0, 1e-40), (7.0, 1e-9),
])
def test_line_integral_matches_parabolic_cylinder_oracle(a, b):
    assert osc_integral(OscParams(a, b)) == pytest.approx(line_oracle(a, b), rel=1e-9)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_line_integral_oracle_property(a, b):
    assume(abs(a) > 1e-3 or abs(b) > 1e-3)
    assert osc_integral(OscParams(a, b)) == pytest.approx(line_oracle(a, b), rel=1e-8, abs=1e-10)


@given(st.sampled_from([-1.0, 1.0]), st.floats(-6, 6), st.sampled_from([-1.0, 1.0]),
       st.floats(-200, 6))
def test_line_integral_oracle_across_magnitudes(sa, ka, sb, kb):
    a, b = sa * 10.0 ** ka, sb * 10.0 ** kb
    assert osc_integral(OscParams(a, b)) == pytest.approx(line_oracle(a, b), rel=1e-8)


@given(st.floats(-20, 20), st.floats(-20, 20), st.floats(-4, 4), st.floats(0.05, 4))
def test_finite_interval_matches_quadrature_oracle(a, b, lo, width):
    assume(abs(a) > 1e-3 or abs(b) > 1e-3)
    hi = lo + width
    got = osc_integral(OscParams(a, b, (lo, hi)))
    assert got == pytest.approx(finite_oracle(a, b, lo, hi), abs=1e-9)


def test_half_line_with_infinite_end():
    got = osc_integral(OscParams(-5.0, 2.0, (0.0, math.inf)))
    assert got == pytest.approx(complex(half_line_oracle(-5.0, 2.0)), rel=1e-10)
    got = osc_integral(OscParams(-5.0, 2.0, (-math.inf, 0.0)))
    assert got == pytest.approx(complex(half_line_oracle(5.0, 2.0)), rel=1e-10)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-3, 3), st.floats(0.1, 3),
       st.floats(0.1, 3))
def test_additivity_over_intervals(a, b, lo, w1, w2):
    assume(abs(a) > 1e-3 or abs(b) > 1e-3)
    mid, hi = lo + w1, lo + w1 + w2
    whole = osc_integral(OscParams(a, b, (lo, hi)))
    parts = osc_integral(OscParams(a, b, (lo, mid))) + osc_integral(OscParams(a, b, (mid, hi)))
    assert whole == pytest.approx(parts, abs=1e-10)


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0.1, 10))
def test_conjugation_symmetries(a, b, r):
    assume(abs(a) > 1e-3 or abs(b) > 1e-3)
    sym = (-r, r)
    v = osc_integral(OscParams(a, b, sym))
    assert osc_integral(OscParams(a, -b, sym)) == pytest.approx(np.conj(osc_integral(
        OscParams(-a, b, sym))), abs=1e-10)
    assert osc_integral(OscParams(a, -b, sym)) == pytest.approx(np.conj(v), abs=1e-10)
    J = (-0.3 * r, r)
    assert osc_integral(OscParams(-a, -b, J)) == pytest.approx(
        np.conj(osc_integral(OscParams(a, b, J))), abs=1e-10)


@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0.01, 100))
def test_ratio_scale_invariance(a, b, lam):
    assume(abs(a) > 1e-2 and abs(b) > 1e-2)
    assert bound_ratio(lam * a, lam * lam * b) == pytest.approx(bound_ratio(a, b), rel=1e-6)


def test_bound_denominator():
    assert bound_denominator(4.0, 0.0) == 0.5
    assert bound_denominator(0.0, 16.0) == 0.5
    assert bound_denominator(4.0, 1.0) == 0.5
    assert bound_denominator(0.01, 1e4) == 0.1
    with pytest.raises(PreconditionError):
        bound_denominator(0.0, 0.0)


def test_singleton_sweep():
    r = bound_sweep([0.0], [1.0], auto_extend=False)
    assert r.max_ratio == pytest.approx(math.gamma(0.25), abs=1e-10)


def test_default_sweep_values():
    v = default_sweep_values()
    assert v.size == 14 and v.min() == -1e4 and v.max() == 1e4 and np.all(v != 0)


def test_full_sweep_bounded_and_interior():
    r = bound_sweep(default_sweep_values(), default_sweep_values())
    assert np.all(np.isfinite(r.ratios)) and np.all(r.ratios >= 0)
    assert r.max_ratio <= CEILING
    assert r.interior
    assert r.max_ratio >= math.gamma(0.25)  # (0, b) is a limit of swept cells
    rows = list(r.rows())
    assert len(rows) == r.a_values.size * r.b_values.size


def test_sweep_extends_when_maximum_on_boundary():
    r = bound_sweep([1.0], [1.0])
    assert r.extensions >= 1 and r.a_values.size > 1
    fixed = bound_sweep([1.0], [1.0], auto_extend=False)
    assert not fixed.interior and fixed.extensions == 0


def test_sweep_rejects_origin_and_empty():
    with pytest.raises(PreconditionError):
        bound_sweep([0.0, 1.0], [0.0])
    with pytest.raises(PreconditionError):
        bound_sweep([], [1.0])


def test_subinterval_ratios_stay_below_ceiling():
    vals = default_sweep_values()
    ratios = subinterval_ratios(vals, vals, [(0.0, math.inf), (-1.0, 1.0), (0.5, 3.0)])
    assert all(0 < r <= CEILING for r in ratios)
