"""Critical exponents, divergence-form transforms and the test-function identity.

Multiplying the equation by ``g(t)`` with ``-g' + g b = c`` (``c = 1`` for
``mu > 1``, ``c = 0`` otherwise) gives

    (g u)_tt - Lap(g u) - (g' u)_t + c u_t = g |u|^p.

Testing against ``Psi = psi_R^q`` (``q = p/(p-1)``) over ``[0, R] x B_R`` yields

    I_R = -int (g(0) u1 + c u0) phi_R^q dx + J1 + J2 + J3,
    J1 = int g u d_t^2 Psi,  J2 = int (g' - c) u d_t Psi,  J3 = -int g u Lap Psi.

For ``mu > 1`` the data term equals ``-g(0) int ((mu-1) u0 + u1) phi_R^q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import RadialGrid, quadrature_weights, radial_integral

SUPERCRITICAL = "supercritical_mu"
SUBCRITICAL = "subcritical_mu"
POWER_LAW = "power_law"
REGIMES = (SUPERCRITICAL, SUBCRITICAL, POWER_LAW)


def regime_for(mu: Optional[float] = None, beta: Optional[float] = None) -> str:
    if beta is not None:
        return POWER_LAW
    return SUPERCRITICAL if mu > 1 else SUBCRITICAL


def critical_exponent(regime: str, n: int, mu_or_beta: Optional[float] = None) -> float:
    """Upper end of the blow-up range of ``p`` in each damping regime."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if regime == SUPERCRITICAL:
        return 1.0 + 2.0 / n
    if regime == SUBCRITICAL:
        if mu_or_beta is None or not 0 < mu_or_beta <= 1:
            raise ValueError("subcritical regime needs 0 < mu <= 1")
        return 1.0 + 2.0 / (n + mu_or_beta - 1.0)
    if regime == POWER_LAW:
        if n == 1:
            raise ValueError("the power-law exponent 1 + 2/(n-1) is degenerate for n = 1")
        return 1.0 + 2.0 / (n - 1.0)
    raise ValueError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class GTransform:
    regime: str
    param: float
    g0: float

    @property
    def target(self) -> float:
        """The constant ``c = -g' + g b``."""
        return 1.0 if self.regime == SUPERCRITICAL else 0.0

    def b(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.regime == POWER_LAW:
            return (1.0 + t) ** (-self.param)
        return self.param / (1.0 + t)

    def g(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.regime == SUPERCRITICAL:
            return (1.0 + t) / (self.param - 1.0)
        if self.regime == SUBCRITICAL:
            return self.g0 * (1.0 + t) ** self.param
        e = 1.0 - self.param
        return self.g0 * np.exp(((1.0 + t) ** e - 1.0) / e)

    def dg(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.regime == SUPERCRITICAL:
            return np.full_like(t, 1.0 / (self.param - 1.0))
        if self.regime == SUBCRITICAL:
            return self.g0 * self.param * (1.0 + t) ** (self.param - 1.0)
        return self.g(t) * (1.0 + t) ** (-self.param)

    def residual(self, t):
        """``-g' + g b - c``, zero for the closed forms."""
        return -self.dg(t) + self.g(t) * self.b(t) - self.target


def g_transform(regime: str, mu_or_beta: float, g0: Optional[float] = None) -> GTransform:
    if regime == SUPERCRITICAL:
        if not mu_or_beta > 1:
            raise ValueError(f"supercritical transform needs mu > 1, got {mu_or_beta}")
        forced = 1.0 / (mu_or_beta - 1.0)
        if g0 is not None and not math.isclose(g0, forced):
            raise ValueError(f"g(0) is forced to 1/(mu-1) = {forced}")
        return GTransform(regime, float(mu_or_beta), forced)
    if regime == SUBCRITICAL:
        if not 0 < mu_or_beta <= 1:
            raise ValueError(f"subcritical transform needs 0 < mu <= 1, got {mu_or_beta}")
    elif regime == POWER_LAW:
        if not mu_or_beta > 1:
            raise ValueError(f"power-law transform needs beta > 1, got {mu_or_beta}")
    else:
        raise ValueError(f"unknown regime {regime!r}")
    g0 = 1.0 if g0 is None else float(g0)
    if not g0 > 0:
        raise ValueError("g(0) must be positive")
    return GTransform(regime, float(mu_or_beta), g0)


def data_sign_functional(u0, u1, grid: RadialGrid, n: int, regime: str, mu: Optional[float] = None) -> float:
    """``int ((mu-1) u0 + u1) dx`` for ``mu > 1``, ``int u1 dx`` otherwise."""
    if regime == SUPERCRITICAL:
        return radial_integral((mu - 1.0) * np.asarray(u0) + np.asarray(u1), grid, n)
    return radial_integral(np.asarray(u1), grid, n)


# ---------------------------------------------------------------------------
# cutoffs


def _cut(s):
    """Value, first and second derivative of the unit cutoff: 1 on [0, 1/2], 0 past 1."""
    s = np.asarray(s, dtype=np.float64)
    x = np.clip(2.0 * s - 1.0, 0.0, 1.0)
    inside = (s > 0.5) & (s < 1.0)
    v = 1.0 - x**3 * (x * (6.0 * x - 15.0) + 10.0)
    d1 = np.where(inside, -2.0 * 30.0 * x**2 * (x - 1.0) ** 2, 0.0)
    d2 = np.where(inside, -4.0 * 60.0 * x * (x - 1.0) * (2.0 * x - 1.0), 0.0)
    return v, d1, d2


def _power_chain(v, d1, d2, q):
    """Value and derivatives of ``v^q`` with ``v'^2 v^(q-2)`` finite where ``v -> 0``."""
    pos = v > 0
    safe = np.where(pos, v, 1.0)
    val = np.where(pos, safe**q, 0.0)
    first = np.where(pos, q * safe ** (q - 1.0) * d1, 0.0)
    second = np.where(pos, q * (q - 1.0) * safe ** (q - 2.0) * d1 * d1 + q * safe ** (q - 1.0) * d2, 0.0)
    return val, first, second


@dataclass(frozen=True)
class TestFunctionPair:
    """``eta(t/R)`` and radial ``phi(r/R)`` with quintic transitions on [1/2, 1]."""

    R: float
    p: float

    __test__ = False  # not a pytest class

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    def eta(self, t):
        return _cut(np.asarray(t) / self.R)[0]

    def phi(self, r):
        return _cut(np.asarray(r) / self.R)[0]

    def eta_q(self, t):
        """``eta_R^q`` with its first and second time derivatives."""
        v, d1, d2 = _cut(np.asarray(t) / self.R)
        return _power_chain(v, d1 / self.R, d2 / self.R**2, self.q)

    def phi_q(self, r, n: int):
        """``phi_R^q`` and its radial Laplacian in dimension ``n``."""
        r = np.asarray(r, dtype=np.float64)
        v, d1, d2 = _cut(r / self.R)
        val, first, second = _power_chain(v, d1 / self.R, d2 / self.R**2, self.q)
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = np.where(r > 0, (n - 1) * first / np.where(r > 0, r, 1.0), 0.0)
        return val, second + radial

    @staticmethod
    def t3_constant(samples: int = 20001) -> float:
        """Sampled ``sup eta'^2 / eta`` over the open transition (unit scale; phi is the same profile)."""
        s = np.linspace(0.5, 1.0, samples)[1:-1]
        v, d1, _ = _cut(s)
        return float(np.max(d1**2 / v))


def make_test_functions(R: float, p: float) -> TestFunctionPair:
    if not R > 0 or not p > 1:
        raise ValueError("need R > 0 and p > 1")
    return TestFunctionPair(float(R), float(p))


@dataclass(frozen=True)
class TestFunctionalReport:
    R: float
    I_R: float
    J1: float
    J2: float
    J3: float
    boundary_term: float
    residual: float
    I_hat: float
    I_tilde: float

    __test__ = False

    @property
    def relative_residual(self) -> float:
        return self.residual / abs(self.I_R) if self.I_R else math.inf

    scaled: float = math.nan


def test_functional(
    times: np.ndarray,
    snapshots: np.ndarray,
    u1: np.ndarray,
    R: float,
    pair: TestFunctionPair,
    gt: GTransform,
    grid: RadialGrid,
    n: int,
    source: Optional[Callable[[float], np.ndarray]] = None,
) -> TestFunctionalReport:
    """Space-time trapezoid evaluation of ``I_R`` and its decomposition.

    ``snapshots[i]`` is ``u(times[i], r)``; ``times`` must start at 0 and reach
    ``R`` with spacing at most ``R/32``. ``u1`` is the initial velocity.
    """
    times = np.asarray(times, dtype=np.float64)
    snaps = np.asarray(snapshots, dtype=np.float64)
    if times[0] != 0.0:
        raise ValueError("trace must start at t = 0")
    if times[-1] < R - 1e-9 * R:
        raise ValueError(f"trace ends at t={times[-1]} before R={R}")
    sel = times <= R + 1e-9 * R
    t, U = times[sel], snaps[sel]
    if np.max(np.diff(t)) > R / 32 + 1e-12:
        raise ValueError(f"trace stride {np.max(np.diff(t)):.4g} exceeds R/32 = {R / 32:.4g}")
    if grid.r_max < R:
        raise ValueError("spatial grid must cover the ball B_R")

    r = grid.r
    wx = quadrature_weights(grid, n)
    wt = np.zeros_like(t)
    dt = np.diff(t)
    wt[:-1] += 0.5 * dt
    wt[1:] += 0.5 * dt

    e_val, e_d1, e_d2 = pair.eta_q(t)
    p_val, p_lap = pair.phi_q(r, n)
    g, gp = gt.g(t), gt.dg(t)
    c = gt.target

    def st(a):  # space-time integral of a (nt, nr) array
        return float(wt @ (a @ wx))

    absu_p = np.abs(U) ** pair.p
    Psi = e_val[:, None] * p_val[None, :]
    I_R = st(g[:, None] * absu_p * Psi)
    J1 = st(g[:, None] * U * e_d2[:, None] * p_val[None, :])
    J2 = st((gp - c)[:, None] * U * e_d1[:, None] * p_val[None, :])
    J3 = -st(g[:, None] * U * e_val[:, None] * p_lap[None, :])
    boundary = -float(wx @ ((gt.g0 * np.asarray(u1) + c * U[0]) * p_val))
    extra = 0.0
    if source is not None:
        extra = st(np.array([gi * source(ti) for gi, ti in zip(g, t)]) * Psi)
    residual = abs(I_R + extra - (boundary + J1 + J2 + J3))

    hat = (t >= R / 2)[:, None] & np.ones_like(p_val, dtype=bool)[None, :]
    tilde = np.ones_like(t, dtype=bool)[:, None] & (r >= R / 2)[None, :]
    base = g[:, None] * absu_p * Psi
    return TestFunctionalReport(
        R=float(R), I_R=I_R, J1=J1, J2=J2, J3=J3, boundary_term=boundary, residual=residual,
        I_hat=st(np.where(hat, base, 0.0)), I_tilde=st(np.where(tilde, base, 0.0)),
        scaled=I_R * R ** (-scaling_exponent(n, pair.p)),
    )


def scaling_exponent(n: int, p: float) -> float:
    """``(n+2)/q - 2`` in ``I_R <~ (I_tilde^{1/p} + I_hat^{1/p}) R^{(n+2)/q - 2}``."""
    q = p / (p - 1.0)
    return (n + 2.0) / q - 2.0


test_functional.__test__ = False
