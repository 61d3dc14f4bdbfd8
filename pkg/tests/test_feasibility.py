import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sidwave import feasibility as fz


def test_fujita_and_bounds():
    assert fz.fujita_exponent(1) == 3.0
    assert fz.fujita_exponent(2) == 2.0
    assert fz.eps_upper_bound(1, 4.0) == pytest.approx(2.0 / 3.0)
    with pytest.raises(fz.InfeasibleError):
        fz.eps_upper_bound(1, 3.0)
    # large p: the rate bound exceeds 3n/2 and the cap takes over
    assert fz.eps_admissible_bound(1, 100.0) == 1.5


@settings(max_examples=60, deadline=None)
@given(delta=st.floats(1e-4, 50.0), n=st.sampled_from([1, 2, 3]))
def test_delta_roundtrip(delta, n):
    d1 = fz.delta1_of(delta, n)
    assert fz.delta_from_eps(3 * d1, n) == pytest.approx(delta, rel=1e-9)


def _best_t3_constant(delta):
    """Smallest generalized eigenvalue of x^2 - 4xy + (4+delta) y^2 against x^2 + (2+delta) y^2."""
    A = np.array([[1.0, -2.0], [-2.0, 4.0 + delta]])
    B = np.diag([1.0, 2.0 + delta])
    L = np.diag(1 / np.sqrt(np.diag(B)))
    return float(np.min(np.linalg.eigvalsh(L @ A @ L)))


@pytest.mark.parametrize("delta", [0.01, 0.1, 0.5, 1.0, 3.0, 10.0])
def test_delta2_is_a_valid_constant(delta):
    _, d2 = fz.derive_deltas(delta, 1)
    assert 0 < d2 <= _best_t3_constant(delta) + 1e-12


def test_mu_lower_root():
    n, eps, nu, d3 = 1, 0.3, 20.0, 0.01
    m = fz.mu_lower_root(n, eps, nu, d3)
    k = n + 1 - eps
    assert m * m - (4 * nu + 2 + 2 * k) * m - k * nu / d3 == pytest.approx(0.0, abs=1e-6 * m * m)


def test_solve_default():
    fp = fz.solve_feasible(1, 4.0)
    assert fp.eps == pytest.approx(1.0 / 3.0)
    assert fp.delta == pytest.approx(4.0 / 7.0)
    assert fp.violations() == []
    assert fp.sigma == pytest.approx(0.3)


def test_violations_detects_tampering():
    fp = fz.solve_feasible(2, 3.0, 0.2)
    assert "mu_nu" in dataclasses.replace(fp, mu=1.0).violations()
    assert "nu" in dataclasses.replace(fp, nu=0.0).violations()
    assert "eps_3delta1" in dataclasses.replace(fp, delta1=fp.delta1 * 1.1).violations()


@pytest.mark.parametrize("args", [(1, 2.0, None), (1, 4.0, 0.7), (1, 4.0, -0.1), (3, 9.0, None)])
def test_infeasible(args):
    with pytest.raises(fz.InfeasibleError):
        fz.solve_feasible(*args)


@settings(max_examples=100, deadline=None)
@given(n=st.sampled_from([1, 2, 3]), dp=st.floats(0.01, 4.0), frac=st.floats(0.01, 0.99))
def test_random_inputs_sound(n, dp, frac):
    p = fz.fujita_exponent(n) + dp
    if n == 3:
        p = min(p, 3.0)  # sigma <= 1 needs p <= 3 in three dimensions
    eps = frac * fz.eps_admissible_bound(n, p)
    assert fz.solve_feasible(n, p, eps).violations() == []


def test_mu0_curve_monotone_and_slope():
    eps = np.logspace(-3, -1, 7)
    curve = fz.mu0_curve(1, 4.0, eps)
    mus = [fp.mu for _, fp in curve]
    assert all(a > b for a, b in zip(mus, mus[1:]))
    assert -2.5 <= fz.loglog_slope(eps, mus) <= -1.5
    # the min over fractions is never worse than the default construction
    assert mus[0] <= fz.solve_feasible(1, 4.0, eps[0]).mu


def test_loglog_slope_exact():
    x = np.array([1.0, 2.0, 4.0])
    assert fz.loglog_slope(x, 5 * x**-2) == pytest.approx(-2.0)
    assert math.isfinite(fz.gn_sigma(2, 3.0))
