import math

import numpy as np
import pytest

from sidwave import diagnostics as dg
from sidwave.mms import convergence_study
from sidwave.model import (
    ConfigurationError,
    ModelSpec,
    PolynomialBump,
    ScaleInvariant,
    Undamped,
    make_grid,
    sample_initial_data,
)
from sidwave.solver import (
    StepControl,
    first_step,
    laplacian_radial,
    run,
    step,
)

BUMP = PolynomialBump(1.0, 1.0, 4)


def _free(n):
    return ModelSpec(n, Undamped(), nonlinearity="none")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplacian_of_r_squared(n):
    g = make_grid(2.0, 40)
    lap = laplacian_radial(g.r**2, g, n)
    assert np.allclose(lap[:-1], 2.0 * n, atol=1e-9)


def _dalembert(t, r, n):
    F = lambda s: BUMP.shape(np.abs(s))
    if n == 1:
        return 0.5 * (F(r - t) + F(r + t))
    # spherical means: r u is a 1-d wave with odd data r F(r)
    return ((r - t) * F(r - t) + (r + t) * F(r + t)) / (2.0 * r)


@pytest.mark.parametrize("n", [1, 3])
def test_free_wave_matches_closed_form(n):
    errs = []
    for nr in (400, 800):
        g = make_grid(4.0, nr)
        rec = run(_free(n), g, sample_initial_data(BUMP, g), T=2.0, sample_dt=2.0)
        u = rec.meta["final_state"].u_curr
        mask = g.r > 0.25
        errs.append(np.max(np.abs(u[mask] - _dalembert(2.0, g.r[mask], n))))
    assert errs[1] < 5e-4
    assert 3.5 < errs[0] / errs[1] < 4.5  # second order


@pytest.mark.parametrize("n", [1, 2, 3])
def test_free_wave_energy_short(n):
    g = make_grid(6.0, 600)
    rec = run(_free(n), g, sample_initial_data(BUMP, g), T=4.0)
    e = rec.weighted_energy
    assert np.max(np.abs(e / e[0] - 1.0)) < 2e-3


def test_damped_energy_decreases():
    g = make_grid(8.0, 400)
    rec = run(ModelSpec(1, ScaleInvariant(3.0), nonlinearity="none"), g, sample_initial_data(BUMP, g), T=6.0)
    assert np.all(np.diff(rec.weighted_energy) <= 1e-12)


def test_linearity():
    g = make_grid(6.0, 300)
    m = ModelSpec(2, ScaleInvariant(2.0), nonlinearity="none")
    a = run(m, g, sample_initial_data(BUMP, g), T=3.0)
    b = run(m, g, sample_initial_data(PolynomialBump(3.0, 1.0, 4), g), T=3.0)
    assert np.allclose(b.l2, 9.0 * a.l2, rtol=1e-12)
    ua, ub = a.meta["final_state"].u_curr, b.meta["final_state"].u_curr
    assert np.max(np.abs(ub - 3.0 * ua)) < 1e-13 * np.max(np.abs(ub))


@pytest.mark.parametrize("lam", [2.0, 0.5])
def test_scale_invariance(lam):
    """u(t, r) -> u(lam (1+t) - 1, lam r) maps solutions of the linear equation onto solutions.

    On grids scaled by lam (dr and dt alike) the discrete map is exact, so the
    two runs agree to roundoff.
    """
    m = ModelSpec(3, ScaleInvariant(2.5), nonlinearity="none")
    T = 3.0
    ga = make_grid(6.0, 300)
    ra = run(m, ga, sample_initial_data(BUMP, ga), T=T, sample_dt=T)
    gb = make_grid(6.0 * lam, 300)
    bump_b = PolynomialBump(1.0, lam, 4)
    rb = run(m, gb, sample_initial_data(bump_b, gb), T=lam * (1 + T) - 1.0, t0=lam - 1.0, sample_dt=lam * T)
    ua, ub = ra.meta["final_state"].u_curr, rb.meta["final_state"].u_curr
    assert np.allclose(ua, ub, rtol=1e-9, atol=1e-12)


def test_step_api():
    g = make_grid(4.0, 100)
    m = _free(1)
    s0 = first_step(sample_initial_data(BUMP, g), m, g, 0.01)
    assert s0.k == 1 and s0.t == pytest.approx(0.01)
    s1 = step(s0, m, g)
    assert s1.k == 2 and s1.dt_prev == 0.01 and s1.t == pytest.approx(0.02)
    s2 = step(s1, m, g, 0.005)
    assert s2.dt == 0.01 and s2.dt_prev == 0.005
    assert s2.u_curr[-1] == 0.0


def test_variable_step_consistent():
    """Halving the step part-way still reproduces the closed form."""
    g = make_grid(4.0, 800)
    m = _free(1)
    s = first_step(sample_initial_data(BUMP, g), m, g, 0.0025)
    while s.t < 1.0 - 1e-12:
        s = step(s, m, g)
    h = 0.00125
    while s.t < 2.0 - 1e-12:
        s = step(s, m, g, h)
    assert s.t == pytest.approx(2.0)
    assert np.max(np.abs(s.u_curr - _dalembert(2.0, g.r, 1))) < 5e-4


def test_snapshots_land_exactly():
    g = make_grid(5.0, 200)
    rec = run(_free(1), g, sample_initial_data(BUMP, g), T=3.0, snapshot_times=[0.0, 0.3333, 1.0, 2.71])
    assert list(rec.snapshot_times) == pytest.approx([0.0, 0.3333, 1.0, 2.71], abs=1e-12)
    assert rec.snapshots.shape == (4, g.size)


def test_domain_check():
    g = make_grid(3.0, 100)
    with pytest.raises(ConfigurationError):
        run(_free(1), g, sample_initial_data(BUMP, g), T=5.0)


def test_finite_propagation():
    g = make_grid(10.0, 500)
    T = 4.0
    ctrl = StepControl(cfl=0.5)
    rec = run(_free(1), g, sample_initial_data(BUMP, g), ctrl, T, sample_dt=T)
    u = rec.meta["final_state"].u_curr
    steps = round(T / (ctrl.cfl * g.dr))
    # the stencil widens the support by one cell per step
    assert np.all(u[g.r > BUMP.r0 + steps * g.dr + 1e-9] == 0.0)
    # dispersive leakage past the light cone is confined to a thin layer
    assert np.max(np.abs(u[g.r > BUMP.r0 + T + 0.25])) < 1e-8 * np.max(np.abs(u))


def test_blowup_detected_and_stable():
    m = ModelSpec(1, ScaleInvariant(2.0), p=2.0)
    stars = []
    for nr in (400, 800):
        g = make_grid(12.0, nr)
        rec = run(m, g, sample_initial_data(PolynomialBump(1.0), g), T=10.0)
        assert rec.status == dg.BLOWUP
        stars.append(rec.t_star)
    assert stars[0] == pytest.approx(8.859, rel=1e-3)
    assert abs(stars[0] - stars[1]) / stars[1] < 1e-3


def test_cfl_violation_is_unstable():
    g = make_grid(30.0, 300)
    rec = run(_free(1), g, sample_initial_data(BUMP, g), StepControl(cfl=1.5), 25.0)
    assert rec.status == dg.UNSTABLE


def test_zero_data():
    g = make_grid(4.0, 100)
    rec = run(ModelSpec(1, ScaleInvariant(2.0)), g, sample_initial_data(PolynomialBump(0.0), g), T=2.0)
    assert rec.status == dg.COMPLETED
    assert np.all(rec.table()[:, 1:] == 0.0)


@pytest.mark.parametrize("n, nonlin", [(2, "abs_pow"), (1, "signed_pow"), (3, "none")])
def test_manufactured_orders(n, nonlin):
    study = convergence_study(ModelSpec(n, ScaleInvariant(2.0), 2.0, nonlin), nrs=(60, 120, 240))
    assert all(1.9 <= o <= 2.1 for o in study.orders)


def test_time_reversal_free_wave():
    """Leapfrog is time-symmetric: stepping back recovers the data to roundoff."""
    g = make_grid(6.0, 300)
    m = _free(2)
    data = sample_initial_data(BUMP, g)
    s = first_step(data, m, g, 0.01)
    for _ in range(200):
        s = step(s, m, g)
    back = type(s)(s.u_curr, s.u_prev, s.t, s.k, s.dt, s.dt)
    for _ in range(200):
        back = step(back, m, g)
    assert np.allclose(back.u_curr, data.u0, atol=1e-10)


def test_laplacian_of_cos_second_order():
    errs = []
    for nr in (200, 400):
        g = make_grid(4.0, nr)
        lap = laplacian_radial(np.cos(g.r), g, 2)
        r = g.r[1:-1]
        errs.append(np.max(np.abs(lap[1:-1] - (-np.cos(r) - np.sin(r) / r))))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_zero_horizon_record():
    g = make_grid(4.0, 80)
    rec = run(_free(1), g, sample_initial_data(BUMP, g), T=0.0)
    assert rec.status == dg.COMPLETED and list(rec.times) == [0.0]


def test_first_step_from_rest():
    g = make_grid(4.0, 400)
    prof = PolynomialBump(0.0, 1.0, 4, velocity=1.0)
    data = sample_initial_data(prof, g)
    dt = 1e-3
    st = first_step(data, ModelSpec(1, ScaleInvariant(2.0), nonlinearity="none"), g, dt)
    assert np.allclose(st.u_curr, dt * data.u1 * (1 - dt), atol=10 * dt**3)


def test_observers_see_every_sample():
    g = make_grid(4.0, 80)
    seen = []
    rec = run(_free(1), g, sample_initial_data(BUMP, g), T=1.0, sample_dt=0.25,
              observers=[lambda t, u: seen.append((t, float(np.max(np.abs(u)))))])
    assert [t for t, _ in seen] == pytest.approx(list(rec.times))
    assert [s for _, s in seen] == pytest.approx(list(rec.supnorm))
