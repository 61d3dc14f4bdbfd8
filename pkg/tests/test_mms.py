import numpy as np
import pytest

from sidwave.mms import ManufacturedBump, convergence_study
from sidwave.model import ModelSpec, ScaleInvariant, make_grid
from sidwave.solver import laplacian_radial


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplacian_shape(n):
    mb = ManufacturedBump(2.0, 4)
    g = make_grid(3.0, 3000)
    fd = laplacian_radial(mb.shape(g.r), g, n)
    exact = mb.laplacian_shape(g.r, n)
    assert np.max(np.abs(fd[:-1] - exact[:-1])) < 1e-4


def test_forcing_closes_equation():
    """u_tt - Lap u + b u_t - f(u) = s, checked with time differences of the exact field."""
    mb = ManufacturedBump()
    m = ModelSpec(2, ScaleInvariant(3.0), 2.0)
    s = mb.forcing_for(m)
    r = np.linspace(0, 1.9, 30)
    t, h = 0.7, 1e-4
    u = lambda tt: mb.exact(tt, r)
    utt = (u(t + h) - 2 * u(t) + u(t - h)) / h**2
    ut = (u(t + h) - u(t - h)) / (2 * h)
    lhs = utt - np.exp(-t) * mb.laplacian_shape(r, 2) + m.b(t) * ut - m.f(u(t))
    assert np.allclose(lhs, s(t, r), atol=1e-6)


def test_study_shapes():
    st = convergence_study(ModelSpec(1, ScaleInvariant(2.0), nonlinearity="none"), nrs=(60, 120))
    assert len(st.errors) == 2 and len(st.orders) == 1
    assert st.errors[1] < st.errors[0]
