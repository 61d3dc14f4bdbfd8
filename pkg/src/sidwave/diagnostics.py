"""Weighted functionals, decay-rate fits and termination classification.

The weight is ``exp(2 psi)`` with ``psi(t, r) = a r^2 / (1 + t)^2`` and
``a = mu / (2 (2 + delta))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import SPHERE_MEASURE, RadialGrid, radial_integral

COMPLETED = "completed"
BLOWUP = "blowup_detected"
UNSTABLE = "unstable"

MONOTONE_WINDOW = 20


class WeightOverflowError(FloatingPointError):
    """The Gaussian weight overflowed on a nonzero part of the solution."""


@dataclass(frozen=True)
class WeightSpec:
    mu: float
    delta: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.mu < 0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")

    @property
    def a(self) -> float:
        return self.mu / (2.0 * (2.0 + self.delta))

    @classmethod
    def unweighted(cls) -> "WeightSpec":
        return cls(mu=0.0, delta=1.0)


def psi(t, r, w: WeightSpec):
    return w.a * np.asarray(r) ** 2 / (1.0 + np.asarray(t)) ** 2


def _weighted(values: np.ndarray, psi_values: np.ndarray) -> np.ndarray:
    """``exp(2 psi) * values`` evaluated only where ``values != 0``."""
    out = np.zeros_like(values)
    nz = values != 0
    if np.any(nz):
        with np.errstate(over="ignore"):
            out[nz] = np.sign(values[nz]) * np.exp(2.0 * psi_values[nz] + np.log(np.abs(values[nz])))
        if not np.all(np.isfinite(out[nz])):
            raise WeightOverflowError("exp(2 psi) overflowed where the solution is nonzero")
    return out


def l2_squared(u: np.ndarray, grid: RadialGrid, n: int) -> float:
    return radial_integral(np.asarray(u) ** 2, grid, n)


def weighted_l2(state, grid: RadialGrid, n: int, w: WeightSpec) -> float:
    """``int exp(2 psi) u^2 dx`` at the state's current level."""
    u = state.u_curr
    return radial_integral(_weighted(u * u, psi(state.t, grid.r, w)), grid, n)


def staggered_gradient_weights(grid: RadialGrid, n: int) -> np.ndarray:
    """Face weights ``omega * c_{j+1/2} * dr`` matched to the radial Laplacian stencil.

    With these weights ``sum c (D+ f)(D+ g)`` is exactly the Dirichlet form of
    the discrete Laplacian, so the free-wave leapfrog energy is conserved.
    """
    r = grid.r
    if n == 1:
        c = np.ones(grid.nr)
    elif n == 2:
        c = 0.5 * (r[:-1] + r[1:])
    else:
        c = r[:-1] * r[1:]
    return SPHERE_MEASURE[n] * c * grid.dr


def weighted_energy(state, grid: RadialGrid, n: int, w: WeightSpec) -> float:
    """``int exp(2 psi) (u_t^2 + |grad u|^2) dx`` at the half level ``t - dt/2``.

    ``u_t`` is the backward difference of the two stored levels; the gradient
    term pairs forward differences of both levels on the cell faces.
    """
    h = state.dt_prev
    t_half = state.t - 0.5 * h
    ut = (state.u_curr - state.u_prev) / h
    kinetic = radial_integral(_weighted(ut * ut, psi(t_half, grid.r, w)), grid, n)
    g_now = np.diff(state.u_curr) / grid.dr
    g_old = np.diff(state.u_prev) / grid.dr
    r_face = grid.r[:-1] + 0.5 * grid.dr
    grad = staggered_gradient_weights(grid, n) @ _weighted(g_now * g_old, psi(t_half, r_face, w))
    return kinetic + float(grad)


# ---------------------------------------------------------------------------
# run records


@dataclass
class RunRecord:
    """Sampled diagnostics of one run. Energies are stamped at ``energy_times``."""

    times: np.ndarray
    l2: np.ndarray
    weighted_l2: np.ndarray
    weighted_energy: np.ndarray
    energy_times: np.ndarray
    supnorm: np.ndarray
    peak: np.ndarray
    status: str = COMPLETED
    t_star: Optional[float] = None
    threshold: float = np.inf
    snapshot_times: Optional[np.ndarray] = None
    snapshots: Optional[np.ndarray] = None
    weight: Optional[WeightSpec] = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def table(self) -> np.ndarray:
        return np.column_stack([self.times, self.l2, self.weighted_l2, self.weighted_energy, self.supnorm])


def m_functional(record: RunRecord, n: int, eps: float) -> np.ndarray:
    """Running supremum of ``(1+t)^(n+2-eps) E_w + (1+t)^(n-eps) L_w``."""
    energy = (1.0 + record.energy_times) ** (n + 2.0 - eps) * record.weighted_energy
    mass = (1.0 + record.times) ** (n - eps) * record.weighted_l2
    return np.maximum.accumulate(energy + mass)


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    window: tuple
    residual: float
    intercept: float = 0.0
    samples: int = 0


def fit_decay_rate(times, series, window: Optional[Sequence[float]] = None) -> DecayFit:
    """Least-squares slope of ``log series`` against ``log(1 + t)``.

    ``window`` defaults to the last decade ``[T/10, T]``.
    """
    times = np.asarray(times, dtype=np.float64)
    series = np.asarray(series, dtype=np.float64)
    if window is None:
        window = (max(1.0, times[-1] / 10.0), times[-1])
    lo, hi = float(window[0]), float(window[1])
    if lo < 1.0:
        raise ValueError("fit window must start at t >= 1")
    sel = (times >= lo) & (times <= hi)
    if sel.sum() < 10:
        raise ValueError(f"fit window [{lo}, {hi}] holds {sel.sum()} samples, need >= 10")
    y = series[sel]
    if not np.all(y > 0) or not np.all(np.isfinite(y)):
        raise ValueError("series must be finite and strictly positive on the fit window")
    x = np.log1p(times[sel])
    ly = np.log(y)
    slope, intercept = np.polyfit(x, ly, 1)
    resid = ly - (slope * x + intercept)
    return DecayFit(float(slope), (lo, hi), float(np.sqrt(np.mean(resid**2))), float(intercept), int(sel.sum()))


def classify_termination(record: RunRecord, threshold: Optional[float] = None) -> str:
    """Blow-up, instability or normal completion, from the sup-norm trail.

    Blow-up needs the sup-norm past the threshold while strictly increasing
    over the last 20 samples with a fixed sign at the peak. Sign-flipping
    growth is the signature of a violated CFL bound and counts as unstable.
    """
    if threshold is None:
        threshold = record.threshold
    sup = np.asarray(record.supnorm, dtype=np.float64)
    peak = np.asarray(record.peak, dtype=np.float64)
    finite = np.isfinite(sup)
    if finite.all() and (len(sup) == 0 or sup[-1] <= threshold):
        return COMPLETED
    good = sup[finite]
    pk = peak[finite]
    if len(good) == 0 or good[-1] <= threshold:
        return UNSTABLE
    tail = good[-MONOTONE_WINDOW:]
    signs = np.sign(pk[-MONOTONE_WINDOW:])
    if (
        len(tail) == MONOTONE_WINDOW
        and np.all(np.diff(tail) > 0)
        and np.all(signs == signs[-1])
        and signs[-1] != 0
    ):
        return BLOWUP
    return UNSTABLE
