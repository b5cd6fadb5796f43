import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from hermite_schrodinger import GridFunction
from hermite_schrodinger.errors import ConfigError, PreconditionError, TruncationError
from hermite_schrodinger.hermite_basis import eval_hermite, random_hermite_function
from hermite_schrodinger.mixed_norms import (
    MixedNormSpec,
    change_of_variables_weight,
    free_lp_norm,
    hermite_side_integral,
    is_admissible,
    lp_norm,
    mixed_norm,
    periodicity_residual,
    strichartz_check,
    substitution_consistency,
)

INF = math.inf


def gaussian_lp(p):
    """||h_0||_p = pi^{-1/4} (2 pi / p)^{1/(2p)}."""
    return math.pi ** -0.25 * (2 * math.pi / p) ** (1 / (2 * p))


@pytest.fixture(scope="module")
def h0(grid):
    return GridFunction(grid, eval_hermite(0, grid)[0])


def test_gaussian_lp_oracle_by_quadrature():
    for p in (1.0, 3.0, 6.0):
        q = integrate.quad(lambda x: (math.pi ** -0.25 * math.exp(-x * x / 2)) ** p,
                           -np.inf, np.inf, epsabs=1e-14)[0] ** (1 / p)
        assert q == pytest.approx(gaussian_lp(p), rel=1e-12)
    assert gaussian_lp(6.0) == pytest.approx(0.7540178, abs=1e-7)


def test_lp_norm_of_h0(h0):
    assert lp_norm(h0, 2) == pytest.approx(1.0, abs=1e-8)
    assert lp_norm(h0, 6) == pytest.approx(gaussian_lp(6.0), abs=1e-8)
    # grid maximum: below the peak by at most h^2 max|f''| / 8
    h = h0.grid.spacing
    peak = math.pi ** -0.25
    assert peak * (1 - h * h / 8) <= lp_norm(h0, INF) <= peak
    with pytest.raises(PreconditionError):
        lp_norm(h0, 0.5)


def test_mixed_norm_spec_validation():
    with pytest.raises(ConfigError):
        MixedNormSpec(2, 2, (1.0, 0.0))
    with pytest.raises(ConfigError):
        MixedNormSpec(2, 2, (0.0, 1.0), n_t=1)
    with pytest.raises(PreconditionError):
        MixedNormSpec(0.5, 2)


def test_mixed_norm_examples(h0, grid):
    spec = MixedNormSpec(2, 4, (0.0, 1.0), n_t=11)
    assert mixed_norm([h0] * 11, spec) == pytest.approx(1.0, abs=1e-8)
    spec = MixedNormSpec(6, 6, (0.0, math.pi / 4), n_t=33)
    flow = [h0 * np.exp(-1j * t) for t in spec.times]
    expected = gaussian_lp(6.0) * (math.pi / 4) ** (1 / 6)
    assert mixed_norm(flow, spec) == pytest.approx(expected, abs=1e-8)
    zero = GridFunction(grid, np.zeros(grid.n_points))
    assert mixed_norm([zero] * 33, spec) == 0.0
    with pytest.raises(ConfigError):
        mixed_norm([h0] * 3, spec)


def test_mixed_norm_time_sup(h0):
    spec = MixedNormSpec(2, INF, (0.0, 1.0), n_t=3)
    assert mixed_norm([h0, h0 * 2.0, h0 * 0.5], spec) == pytest.approx(2.0, abs=1e-8)


def test_admissibility():
    assert is_admissible(6, 6) and is_admissible(2, INF) and is_admissible(INF, 4)
    assert not is_admissible(4, 4)
    assert is_admissible(4, 4, d=2)


def test_change_of_variables_weight_examples():
    for v in (0.0, 0.3, 7.0):
        assert change_of_variables_weight(v, 6, 6) == pytest.approx(1.0, abs=1e-15)
    assert change_of_variables_weight(1.0, 2, 8) == pytest.approx(0.5, abs=1e-15)
    assert change_of_variables_weight(0.0, 4, 4) == 1.0
    np.testing.assert_allclose(change_of_variables_weight(np.array([0.0, 1.0]), 2, 8), [1, 0.5])
    with pytest.raises(PreconditionError):
        change_of_variables_weight(-1.0, 6, 6)


@given(st.floats(2.0, 50.0), st.floats(0.0, 100.0))
def test_weight_is_identically_one_on_admissible_line(p, v):
    q = 4.0 * p / (p - 2.0) if p > 2 else INF
    assert change_of_variables_weight(v, p, q) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("s", [0.0, 0.1, 0.3, 1.0, 10.0])
@pytest.mark.parametrize("p", [2.0, 6.0, INF])
def test_free_lp_norm_of_gaussian(h0, s, p):
    # |L_{is} h_0(x)| = pi^{-1/4} (1+4s^2)^{-1/4} exp(-x^2 / (2(1+4s^2)))
    a = 1 + 4 * s * s
    if p == INF:
        # sampled maximum: a lower estimate of the peak
        expected = math.pi ** -0.25 * a ** -0.25
        assert expected * (1 - 1e-3) <= free_lp_norm(h0, s, p) <= expected * (1 + 1e-12)
        return
    expected = math.pi ** -0.25 * a ** -0.25 * (2 * math.pi * a / p) ** (1 / (2 * p))
    assert free_lp_norm(h0, s, p) == pytest.approx(expected, rel=1e-8)


def test_hermite_side_for_eigenfunction(h0):
    value, norms, times = hermite_side_integral(h0, 6, 6, n_t=65)
    np.testing.assert_allclose(norms, gaussian_lp(6.0), atol=1e-8)
    assert value == pytest.approx(gaussian_lp(6.0) * (math.pi / 4) ** (1 / 6), abs=1e-8)


def test_strichartz_gaussian_sixth_powers(h0):
    r = strichartz_check(h0, 6, 6)
    target = 1 / (4 * math.sqrt(3))
    assert r.lhs ** 6 == pytest.approx(target, rel=0.01)
    assert r.rhs ** 6 == pytest.approx(target, rel=0.01)
    assert r.rel_err < 0.01


def test_strichartz_h1(grid):
    r = strichartz_check(GridFunction(grid, eval_hermite(1, grid)[1]), 6, 6)
    assert r.rel_err < 0.01


def test_strichartz_endpoints(grid, rng):
    f, _ = random_hermite_function(rng, grid)
    r = strichartz_check(f, 2, INF)
    assert r.lhs == pytest.approx(1.0, abs=1e-8) and r.rhs == pytest.approx(1.0, abs=1e-8)
    r = strichartz_check(f, 10, 5)
    assert r.rel_err < 0.01


def test_strichartz_rejects_inadmissible_pair(h0):
    with pytest.raises(PreconditionError, match="1/p \\+ 2/q"):
        strichartz_check(h0, 4, 4)


def test_strichartz_truncation_error(h0):
    with pytest.raises(TruncationError):
        strichartz_check(h0, 6, 6, v_max=2.0)


def test_strichartz_refinement_within_reported_error(grid, rng):
    f, _ = random_hermite_function(rng, grid)
    coarse = strichartz_check(f, 6, 6)
    fine = strichartz_check(f, 6, 6, n_t=513, nodes=32)
    assert abs(fine.lhs - coarse.lhs) / coarse.lhs < coarse.rel_err
    assert abs(fine.rhs - coarse.rhs) / coarse.rhs < coarse.rel_err


@pytest.mark.parametrize("p, q", [(6, 6), (4, 4), (10, 5)])
def test_substitution_consistency(grid, rng, p, q):
    f, _ = random_hermite_function(rng, grid)
    direct, substituted, rel = substitution_consistency(f, p, q)
    assert rel < 0.005
    assert direct == pytest.approx(substituted, rel=0.005)


def test_norm_periodicity_for_real_data(grid, rng):
    f, _ = random_hermite_function(rng, grid, real=True)
    assert periodicity_residual(f, 4.0, [0.2, 0.5, 0.9, 1.3]) < 1e-6
